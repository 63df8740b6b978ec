#include "cyclebench/relations.hpp"

#include <stdexcept>

#include "cyclebench/cycles.hpp"

namespace cyclebench {

bool relation_holds(Vec3 a, Vec3 b, Vec3 right, Vec3 forward, Relation r) {
  Vec3 d = a - b;
  d.z = 0.0;
  switch (r) {
    case Relation::left:
      return dot(d, right) < -kRelationDeadZone;
    case Relation::right:
      return dot(d, right) > kRelationDeadZone;
    case Relation::front:
      return dot(d, forward) < -kRelationDeadZone;
    case Relation::behind:
      return dot(d, forward) > kRelationDeadZone;
  }
  return false;
}

bool relation_at(std::span<const ObjectState> frame_states, const CameraConfig& camera, ObjectId a,
                 ObjectId b, Relation r) {
  if (a == b) throw std::invalid_argument("relation_at needs two distinct objects");
  return relation_holds(frame_states[a.value].position, frame_states[b.value].position,
                        camera.right(), camera.forward(), r);
}

namespace {

RelationTrack make_track(const TemporalScene& scene, Relation r, ObjectId a, ObjectId b,
                         Vec3 right, Vec3 forward) {
  RelationTrack t;
  t.relation = r;
  t.subject = a;
  t.object = b;
  const int frames = scene.frame_count();
  t.frames.resize(static_cast<std::size_t>(frames));
  bool always = true;
  bool ever = false;
  for (int f = 0; f < frames; ++f) {
    const bool v = relation_holds(scene.at(f, a).position, scene.at(f, b).position, right, forward, r);
    t.frames[static_cast<std::size_t>(f)] = v ? 1 : 0;
    always = always && v;
    ever = ever || v;
  }
  t.always = frames > 0 && always;
  t.ever = ever;
  return t;
}

}  // namespace

std::vector<RelationTrack> build_tracks_serial(const TemporalScene& scene) {
  const auto k = scene.object_count();
  std::vector<RelationTrack> out;
  if (k < 2) return out;
  out.resize(kRelations.size() * k * (k - 1));
  const Vec3 right = scene.graph.camera.right();
  const Vec3 forward = scene.graph.camera.forward();
  for (const auto r : kRelations) {
    for (std::uint32_t a = 0; a < k; ++a) {
      for (std::uint32_t b = 0; b < k; ++b) {
        if (a == b) continue;
        out[TemporalScene::track_index(r, {a}, {b}, k)] = make_track(scene, r, {a}, {b}, right, forward);
      }
    }
  }
  return out;
}

std::vector<RelationTrack> build_tracks(const TemporalScene& scene) {
  const auto k = scene.object_count();
  std::vector<RelationTrack> out;
  if (k < 2) return out;
  const auto n = static_cast<long>(kRelations.size() * k * (k - 1));
  out.resize(static_cast<std::size_t>(n));
  const Vec3 right = scene.graph.camera.right();
  const Vec3 forward = scene.graph.camera.forward();
  const long per_rel = static_cast<long>(k * (k - 1));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto r = static_cast<Relation>(i / per_rel);
    const long rem = i % per_rel;
    const auto a = static_cast<std::uint32_t>(rem / static_cast<long>(k - 1));
    auto b = static_cast<std::uint32_t>(rem % static_cast<long>(k - 1));
    if (b >= a) ++b;
    out[static_cast<std::size_t>(i)] = make_track(scene, r, {a}, {b}, right, forward);
  }
  return out;
}

TemporalScene simulate(const SceneGraph& graph) {
  TemporalScene scene = materialize(graph);
  scene.tracks = build_tracks(scene);
  return scene;
}

}  // namespace cyclebench
