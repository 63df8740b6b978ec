#pragma once

#include <span>
#include <vector>

#include "cyclebench/model.hpp"

namespace cyclebench {

// Projected displacements closer to zero than this count as aligned, and no
// planar relation holds while aligned.
inline constexpr double kRelationDeadZone = 1e-6;

// relation(a, b): "a is <relation> of b" as seen from the camera.
bool relation_holds(Vec3 a, Vec3 b, Vec3 right, Vec3 forward, Relation r);

bool relation_at(std::span<const ObjectState> frame_states, const CameraConfig& camera, ObjectId a,
                 ObjectId b, Relation r);

// One track per relation per ordered pair, laid out as
// TemporalScene::track_index expects. Parallel over pairs.
std::vector<RelationTrack> build_tracks(const TemporalScene& scene);
std::vector<RelationTrack> build_tracks_serial(const TemporalScene& scene);

// materialize() followed by build_tracks().
TemporalScene simulate(const SceneGraph& graph);

}  // namespace cyclebench
