#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "support.hpp"

using namespace cyclebench;
using cbtest::object;

namespace {

SceneGraph orbit_scene() {
  auto b = object(0, Shape::cylinder, Color::gray, SizeClass::small, Material::rubber, {});
  auto a = object(1, Shape::sphere, Color::red, SizeClass::small, Material::metal, {});
  cbtest::place_on_orbit(a, b, 2.0, 0.0, Direction::counterclockwise, 1);
  auto c = object(2, Shape::cube, Color::blue, SizeClass::small, Material::metal, {3.0, -3.0, 0.0});
  auto d = object(3, Shape::cone, Color::green, SizeClass::small, Material::rubber, {-3.0, 3.0, 0.0});
  d.cycles.push_back(cbtest::cycle(LinearMotion{{-3.0, -2.0, 0.0}}, 2));
  auto g = cbtest::scene({b, a, c, d});
  g.camera = cbtest::axis_camera();
  return g;
}

bool periodic_with(const std::vector<std::uint8_t>& v, std::size_t p) {
  for (std::size_t i = 0; i + p < v.size(); ++i) {
    if (v[i] != v[i + p]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("camera axes") {
  const auto cam = cbtest::axis_camera();
  CHECK(cbtest::near(cam.forward(), {0, 1, 0}));
  CHECK(cbtest::near(cam.right(), {1, 0, 0}));
}

TEST_CASE("relation_holds examples") {
  const Vec3 right{1, 0, 0}, fwd{0, 1, 0};
  CHECK(relation_holds({-2, 0, 0}, {2, 0, 0}, right, fwd, Relation::left));
  CHECK_FALSE(relation_holds({-2, 0, 0}, {2, 0, 0}, right, fwd, Relation::right));
  CHECK(relation_holds({0, -1, 0}, {0, 1, 0}, right, fwd, Relation::front));
  CHECK(relation_holds({0, 1, 0}, {0, -1, 0}, right, fwd, Relation::behind));
  // Aligned along the camera axis: neither left nor right.
  CHECK_FALSE(relation_holds({0, -1, 0}, {0, 1, 0}, right, fwd, Relation::left));
  CHECK_FALSE(relation_holds({0, -1, 0}, {0, 1, 0}, right, fwd, Relation::right));
  // Mirror images across the camera axis.
  const Vec3 a{-1.5, 0.3, 0}, b{1.5, 0.3, 0};
  for (auto r : kRelations) {
    const Relation flipped = r == Relation::left ? Relation::right : r == Relation::right ? Relation::left : r;
    if (r == Relation::left || r == Relation::right) {
      CHECK(relation_holds(a, b, right, fwd, r) == relation_holds(b, a, right, fwd, flipped));
    }
  }
}

TEST_CASE("orbiting object is left of its center on the half where cos is negative") {
  const auto t = simulate(orbit_scene());
  const auto& track = t.track(Relation::left, ObjectId{1}, ObjectId{0});
  const auto right = t.graph.camera.right();
  int checked = 0;
  for (int f = 0; f < t.frame_count(); ++f) {
    const double angle = 2.0 * std::numbers::pi * f / 160.0;
    const double c = std::cos(angle) * right.x + std::sin(angle) * right.y;
    if (std::abs(c) * 2.0 < 1e-3) continue;  // skip the crossing frames
    CHECK(static_cast<bool>(track.frames[f]) == (c < 0));
    ++checked;
  }
  CHECK(checked >= 158);
}

TEST_CASE("tracks: xor outside the dead zone and aggregates equal folds") {
  for (const auto& g : {orbit_scene(), cbtest::built_scenes(Tier::L4, 1, 12).front()}) {
    const auto t = simulate(g);
    const auto right = g.camera.right(), fwd = g.camera.forward();
    const auto k = static_cast<std::uint32_t>(t.object_count());
    REQUIRE(t.tracks.size() == 4u * k * (k - 1));
    for (std::uint32_t a = 0; a < k; ++a) {
      for (std::uint32_t b = 0; b < k; ++b) {
        if (a == b) continue;
        for (auto r : kRelations) {
          const auto& tr = t.track(r, {a}, {b});
          CHECK(tr.relation == r);
          CHECK(tr.subject == ObjectId{a});
          const bool all = std::all_of(tr.frames.begin(), tr.frames.end(), [](auto x) { return x != 0; });
          const bool any = std::any_of(tr.frames.begin(), tr.frames.end(), [](auto x) { return x != 0; });
          CHECK(tr.always == all);
          CHECK(tr.ever == any);
          CHECK((!tr.always || tr.ever));
        }
        for (int f = 0; f < t.frame_count(); ++f) {
          const Vec3 d = t.at(f, {a}).position - t.at(f, {b}).position;
          if (std::abs(dot(d, right)) > kRelationDeadZone) {
            CHECK((t.track(Relation::left, {a}, {b}).frames[f] ^ t.track(Relation::right, {a}, {b}).frames[f]));
          }
          if (std::abs(dot(d, fwd)) > kRelationDeadZone) {
            CHECK((t.track(Relation::front, {a}, {b}).frames[f] ^ t.track(Relation::behind, {a}, {b}).frames[f]));
          }
        }
      }
    }
  }
}

TEST_CASE("static pairs are constant, moving pairs repeat with the cycle periods") {
  const auto t = simulate(orbit_scene());
  bool constant = false, varying = false;
  for (const auto& tr : t.tracks) {
    const bool static_pair = (tr.subject == ObjectId{0} || tr.subject == ObjectId{2}) &&
                             (tr.object == ObjectId{0} || tr.object == ObjectId{2});
    const bool flat = tr.always || !tr.ever;
    if (static_pair) CHECK(flat);
    constant |= flat;
    varying |= !flat;
    // Object 1 has period 160 and object 3 period 80: every track repeats within lcm = 160.
    CHECK(periodic_with(tr.frames, 160));
    if (tr.subject != ObjectId{1} && tr.object != ObjectId{1}) CHECK(periodic_with(tr.frames, 80));
  }
  CHECK(constant);
  CHECK(varying);
}

TEST_CASE("relations ignore lighting") {
  auto g = orbit_scene();
  const auto base = simulate(g).tracks;
  g.light.modulation = LightModulation{0.3, 80};
  for (auto& s : g.light.sources) s.intensity *= 3.0;
  CHECK(simulate(g).tracks == base);
}

TEST_CASE("parallel track building matches the serial reference") {
  for (auto tier : kTiers) {
    for (const auto& g : cbtest::built_scenes(tier, 2, 40)) {
      const auto t = materialize(g);
      CHECK(build_tracks(t) == build_tracks_serial(t));
    }
  }
}
