#include "cyclebench/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <variant>
#include <numbers>

namespace cyclebench {

namespace {

constexpr double kSnap = 1e-12;
constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

// Exact phase of a cycle at an integer frame, computed on integers so that
// the start and switch frames are hit without rounding.
struct FramePhase {
  double phase = 0.0;
  bool at_start = true;
  bool at_half = false;
};

FramePhase frame_phase(int frame, int passes, int frame_count) {
  const std::int64_t num =
      (static_cast<std::int64_t>(frame) * passes) % static_cast<std::int64_t>(frame_count);
  FramePhase p;
  p.phase = static_cast<double>(num) / frame_count;
  p.at_start = num == 0;
  p.at_half = 2 * num == frame_count;
  return p;
}

Vec3 linear_at(Vec3 p0, Vec3 sw, double tri) { return p0 + tri * (sw - p0); }

Vec3 orbit_at(Vec3 center, double radius, double initial_angle, Direction dir, double phase) {
  const double sign = dir == Direction::counterclockwise ? 1.0 : -1.0;
  const double a = (initial_angle + sign * 360.0 * phase) * kDegToRad;
  return {center.x + radius * std::cos(a), center.y + radius * std::sin(a), 0.0};
}

double size_at(SizeClass from, SizeClass to, double tri) {
  const double s0 = size_scale(from);
  return s0 + tri * (size_scale(to) - s0);
}

double color_at(double hue0, double target, double tri) {
  return wrap_degrees(hue0 + tri * signed_hue_arc(hue0, target));
}

double orientation_at(double w0, int turns, double phase) {
  return wrap_degrees(w0 + static_cast<double>(turns) * 360.0 * phase);
}

ObjectState evaluate_object(const SceneGraph& graph, const ObjectSpec& obj,
                            std::span<const ObjectState> resolved, int frame) {
  ObjectState s;
  s.position = obj.position0;
  s.orientation = obj.orientation0;
  s.scale = size_scale(obj.size0);
  s.nominal_size = obj.size0 == SizeClass::small ? NominalSize::small : NominalSize::large;
  s.color_hue = palette_hue(obj.color0);

  for (const auto& cycle : obj.cycles) {
    const FramePhase fp = frame_phase(frame, cycle.passes, graph.frame_count);
    const double tri = triangle_wave(fp.phase);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, LinearMotion>) {
            s.position = linear_at(obj.position0, c.switch_point, tri);
          } else if constexpr (std::is_same_v<T, Orbit>) {
            Vec3 center = resolved[c.center.value].position;
            center.z = 0.0;
            s.position = orbit_at(center, c.radius, c.initial_angle, c.direction, fp.phase);
          } else if constexpr (std::is_same_v<T, SizeChange>) {
            s.scale = size_at(obj.size0, c.target, tri);
            if (fp.at_start) {
              s.nominal_size = static_cast<NominalSize>(obj.size0);
            } else if (fp.at_half) {
              s.nominal_size = static_cast<NominalSize>(c.target);
            } else {
              s.nominal_size = NominalSize::transitional;
            }
          } else if constexpr (std::is_same_v<T, ColorChange>) {
            s.color_hue = color_at(palette_hue(obj.color0), palette_hue(c.target), tri);
          } else if constexpr (std::is_same_v<T, OrientationChange>) {
            s.orientation = orientation_at(obj.orientation0, c.turns, fp.phase);
          }
        },
        cycle.variant);
  }
  s.position.z = s.scale;
  s.nominal_color = nearest_palette_color(s.color_hue);
  return s;
}

std::vector<std::uint32_t> checked_order(const SceneGraph& graph) {
  auto order = orbit_topological_order(graph);
  if (!order) throw CyclicOrbitError("orbit references form a cycle or do not resolve");
  return *order;
}

}  // namespace

double cycle_phase(double frequency, double t) {
  const double x = frequency * t;
  const double nearest = std::round(x);
  if (std::fabs(x - nearest) <= kSnap * std::max(1.0, std::fabs(x))) return 0.0;
  return x - std::floor(x);
}

double triangle_wave(double phase) { return phase < 0.5 ? 2.0 * phase : 2.0 - 2.0 * phase; }

double signed_hue_arc(double from, double to) {
  double d = std::fmod(to - from, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

Vec3 eval_linear(Vec3 p0, Vec3 switch_point, double frequency, double t) {
  return linear_at(p0, switch_point, triangle_wave(cycle_phase(frequency, t)));
}

Vec3 eval_orbit(Vec3 center_position, double radius, double initial_angle, Direction direction,
                double frequency, double t) {
  return orbit_at(center_position, radius, initial_angle, direction, cycle_phase(frequency, t));
}

SizeSample eval_size(SizeClass size0, SizeClass target, double frequency, double t) {
  const double tri = triangle_wave(cycle_phase(frequency, t));
  SizeSample out;
  out.scale = size_at(size0, target, tri);
  if (tri <= kSnap) {
    out.nominal = static_cast<NominalSize>(size0);
  } else if (tri >= 1.0 - kSnap) {
    out.nominal = static_cast<NominalSize>(target);
  } else {
    out.nominal = NominalSize::transitional;
  }
  return out;
}

double eval_color(double hue0, double hue_target, double frequency, double t) {
  return color_at(hue0, hue_target, triangle_wave(cycle_phase(frequency, t)));
}

double eval_orientation(double orientation0, int turns, double frequency, double t) {
  return orientation_at(orientation0, turns, cycle_phase(frequency, t));
}

double eval_light(double base_intensity, double floor, int period_frames, int frame) {
  const int local = frame % period_frames;
  const double c = 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * local / period_frames);
  return base_intensity * (floor + (1.0 - floor) * c);
}

double light_intensity(const LightConfig& light, const LightSource& source, int frame) {
  if (!light.modulation) return source.intensity;
  return eval_light(source.intensity, light.modulation->floor, light.modulation->period_frames,
                    frame);
}

std::vector<ObjectState> evaluate_frame(const SceneGraph& graph,
                                        std::span<const std::uint32_t> order, int frame) {
  std::vector<ObjectState> states(graph.objects.size());
  for (const auto idx : order) {
    states[idx] = evaluate_object(graph, graph.objects[idx], states, frame);
  }
  return states;
}

TemporalScene materialize_serial(const SceneGraph& graph) {
  const auto order = checked_order(graph);
  TemporalScene out;
  out.graph = graph;
  const auto k = graph.objects.size();
  out.states.resize(static_cast<std::size_t>(graph.frame_count) * k);
  for (int f = 0; f < graph.frame_count; ++f) {
    const auto row = evaluate_frame(graph, order, f);
    std::copy(row.begin(), row.end(), out.states.begin() + static_cast<std::ptrdiff_t>(f * k));
  }
  return out;
}

TemporalScene materialize(const SceneGraph& graph) {
  const auto order = checked_order(graph);
  TemporalScene out;
  out.graph = graph;
  const auto k = graph.objects.size();
  const int frames = graph.frame_count;
  out.states.resize(static_cast<std::size_t>(frames) * k);
  ObjectState* dst = out.states.data();
#pragma omp parallel for schedule(static)
  for (int f = 0; f < frames; ++f) {
    ObjectState* row = dst + static_cast<std::size_t>(f) * k;
    // Topological order within the row; rows are independent.
    for (const auto idx : order) {
      row[idx] = evaluate_object(graph, graph.objects[idx], std::span<const ObjectState>(row, k), f);
    }
  }
  return out;
}

}  // namespace cyclebench
