#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cyclebench/model.hpp"

namespace cyclebench {

struct TimeGrid {
  int frame_count = kDefaultFrameCount;
  int fps = kDefaultFps;

  double duration() const { return static_cast<double>(frame_count) / fps; }
  double time_of(int frame) const { return static_cast<double>(frame) / fps; }
};

class CyclicOrbitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fractional part of frequency * t in [0, 1). Products within 1e-12 of an
// integer snap to phase 0 so whole periods land exactly on the start state.
double cycle_phase(double frequency, double t);
// 0 -> 1 over the first half period, 1 -> 0 over the second.
double triangle_wave(double phase);

Vec3 eval_linear(Vec3 p0, Vec3 switch_point, double frequency, double t);

Vec3 eval_orbit(Vec3 center_position, double radius, double initial_angle, Direction direction,
                double frequency, double t);

struct SizeSample {
  double scale = kSmallScale;
  NominalSize nominal = NominalSize::small;
};
SizeSample eval_size(SizeClass size0, SizeClass target, double frequency, double t);

// Hue walks the shorter arc towards the target and back; result in [0, 360).
double eval_color(double hue0, double hue_target, double frequency, double t);

double eval_orientation(double orientation0, int turns, double frequency, double t);

double eval_light(double base_intensity, double floor, int period_frames, int frame);

// Shortest signed arc from `from` to `to`, in (-180, 180].
double signed_hue_arc(double from, double to);

// Light intensity of `source` at `frame`, honouring optional modulation.
double light_intensity(const LightConfig& light, const LightSource& source, int frame);

// States of every object at one frame. `order` must be an orbit topological
// order of the graph. Frames past frame_count wrap periodically.
std::vector<ObjectState> evaluate_frame(const SceneGraph& graph,
                                        std::span<const std::uint32_t> order, int frame);

// Fills TemporalScene::states for frames [0, frame_count). Relation tracks
// are left empty; see build_tracks. Parallel over frames.
TemporalScene materialize(const SceneGraph& graph);
// Single-threaded reference implementation with identical output.
TemporalScene materialize_serial(const SceneGraph& graph);

}  // namespace cyclebench
