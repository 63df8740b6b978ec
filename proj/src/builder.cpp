#include "cyclebench/builder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cyclebench/cycles.hpp"

namespace cyclebench {

GenerationFailed::GenerationFailed(std::uint64_t seed)
    : std::runtime_error("scene generation failed for seed " + std::to_string(seed)), seed_(seed) {}

namespace {

// Stream tags for CounterRng::split.
enum Stream : std::uint64_t { kPlan = 1, kObject = 2, kStage = 3 };

Vec3 sample_ground_point(CounterRng& rng, const BuildConfig& config) {
  const auto& b = config.bounds;
  const double m = config.margins.boundary_margin;
  return {rng.uniform(b.x_min + m, b.x_max - m), rng.uniform(b.y_min + m, b.y_max - m), 0.0};
}

Vec3 orbit_start(Vec3 center, double radius, double angle_deg) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  return {center.x + radius * std::cos(a), center.y + radius * std::sin(a), 0.0};
}

void sample_orbit(CounterRng& rng, ObjectSpec& obj, Orbit& orbit,
                  const std::vector<ObjectSpec>& placed) {
  const auto& center = placed[static_cast<std::size_t>(rng.below(placed.size()))];
  orbit.center = center.id;
  orbit.radius = rng.uniform(kOrbitRadiusMin, kOrbitRadiusMax);
  orbit.initial_angle = rng.uniform(0.0, 360.0);
  orbit.direction = rng.coin() ? Direction::counterclockwise : Direction::clockwise;
  obj.position0 = orbit_start(center.position0, orbit.radius, orbit.initial_angle);
}

Vec3 sample_switch_point(CounterRng& rng, const BuildConfig& config, Vec3 from) {
  Vec3 p = sample_ground_point(rng, config);
  for (int i = 0; i < 32 && ground_distance(p, from) < config.min_linear_travel; ++i) {
    p = sample_ground_point(rng, config);
  }
  return p;
}

CycleSpec sample_cycle(CounterRng& rng, const BuildConfig& config, CycleType type, ObjectSpec& obj,
                       const std::vector<ObjectSpec>& placed) {
  CycleSpec c;
  c.passes = pick_frequency(rng, config.frame_count, config.fps, config.passes_choices).passes;
  switch (type) {
    case CycleType::linear:
      c.variant = LinearMotion{sample_switch_point(rng, config, obj.position0)};
      break;
    case CycleType::orbit: {
      Orbit orbit;
      sample_orbit(rng, obj, orbit, placed);
      c.variant = orbit;
      break;
    }
    case CycleType::size:
      c.variant = SizeChange{obj.size0 == SizeClass::small ? SizeClass::large : SizeClass::small};
      break;
    case CycleType::color: {
      std::vector<Color> others;
      for (const auto col : kColors) {
        if (col != obj.color0) others.push_back(col);
      }
      c.variant = ColorChange{rng.pick(std::span<const Color>(others))};
      break;
    }
    case CycleType::orientation:
      c.variant = OrientationChange{1};
      break;
  }
  return c;
}

// Resamples the property most likely responsible for `v`: the orbit for
// orbiters, the switch point for linear movers that collide after frame 0,
// otherwise the initial position.
void resample_property(CounterRng& rng, const BuildConfig& config, ObjectSpec& obj,
                       const MarginViolation& v, const std::vector<ObjectSpec>& placed) {
  for (auto& cycle : obj.cycles) {
    if (auto* orbit = std::get_if<Orbit>(&cycle.variant)) {
      sample_orbit(rng, obj, *orbit, placed);
      return;
    }
  }
  for (auto& cycle : obj.cycles) {
    if (auto* lin = std::get_if<LinearMotion>(&cycle.variant)) {
      if (v.frame > 0) {
        lin->switch_point = sample_switch_point(rng, config, obj.position0);
      } else {
        obj.position0 = sample_ground_point(rng, config);
        if (ground_distance(obj.position0, lin->switch_point) < config.min_linear_travel) {
          lin->switch_point = sample_switch_point(rng, config, obj.position0);
        }
      }
      return;
    }
  }
  obj.position0 = sample_ground_point(rng, config);
}

SceneGraph prefix_graph(const BuildConfig& config, const std::vector<ObjectSpec>& objects) {
  SceneGraph g;
  g.frame_count = config.frame_count;
  g.fps = config.fps;
  g.bounds = config.bounds;
  g.objects = objects;
  return g;
}

std::optional<MarginViolation> scan(const TemporalScene& scene, const Margins& margins,
                                    std::optional<ObjectId> focus, int frame_begin, int frame_end) {
  const auto k = static_cast<std::uint32_t>(scene.object_count());
  const auto& b = scene.graph.bounds;
  const double bm = margins.boundary_margin;
  for (int f = frame_begin; f < frame_end; ++f) {
    for (std::uint32_t i = 0; i < k; ++i) {
      const auto& si = scene.at(f, {i});
      const double ri = bounding_radius(scene.graph.objects[i].shape, si.scale);
      for (std::uint32_t j = i; j < k; ++j) {
        if (focus && focus->value != i && focus->value != j) continue;
        if (i == j) {
          const Vec3 p = si.position;
          if (p.x < b.x_min + bm || p.x > b.x_max - bm || p.y < b.y_min + bm || p.y > b.y_max - bm) {
            return MarginViolation{f, {i}, {i}};
          }
          continue;
        }
        const auto& sj = scene.at(f, {j});
        const double rj = bounding_radius(scene.graph.objects[j].shape, sj.scale);
        if (ground_distance(si.position, sj.position) < ri + rj + margins.object_margin) {
          return MarginViolation{f, {i}, {j}};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ObjectSpec sample_object(CounterRng& rng, const BuildConfig& config,
                         const std::vector<ObjectSpec>& existing, bool needs_orientation_shape) {
  ObjectSpec o;
  o.id = ObjectId{static_cast<std::uint32_t>(existing.size())};
  if (needs_orientation_shape) {
    static constexpr std::array kRotatable{Shape::cube, Shape::cone};
    o.shape = rng.pick(std::span<const Shape>(kRotatable));
  } else {
    o.shape = rng.pick(std::span<const Shape>(kShapes));
  }
  o.size0 = rng.pick(std::span<const SizeClass>(kSizes));
  o.material = rng.pick(std::span<const Material>(kMaterials));
  o.color0 = rng.pick(std::span<const Color>(kColors));
  o.position0 = sample_ground_point(rng, config);
  o.orientation0 = rng.uniform(0.0, 360.0);
  o.mesh_ref = default_mesh_ref(o.shape);
  return o;
}

std::optional<std::vector<std::vector<CycleType>>> allocate_cycles(CounterRng& rng,
                                                                   std::vector<CycleType> pool,
                                                                   int slots, bool fill_all_slots) {
  if (slots <= 0) {
    if (pool.empty()) return std::vector<std::vector<CycleType>>{};
    return std::nullopt;
  }
  if (fill_all_slots && static_cast<int>(pool.size()) < slots) return std::nullopt;
  rng.shuffle(std::span<CycleType>(pool));
  std::vector<std::vector<CycleType>> assignment(static_cast<std::size_t>(slots));
  auto conflicts = [](const std::vector<CycleType>& have, CycleType t) {
    return std::any_of(have.begin(), have.end(),
                       [&](CycleType h) { return property_of(h) == property_of(t); });
  };
  std::size_t next = 0;
  if (fill_all_slots) {
    for (; next < static_cast<std::size_t>(slots); ++next) assignment[next].push_back(pool[next]);
  }
  for (; next < pool.size(); ++next) {
    std::vector<std::size_t> candidates;
    for (std::size_t s = 0; s < assignment.size(); ++s) {
      if (!conflicts(assignment[s], pool[next])) candidates.push_back(s);
    }
    if (candidates.empty()) return std::nullopt;
    assignment[candidates[static_cast<std::size_t>(rng.below(candidates.size()))]].push_back(pool[next]);
  }
  std::erase_if(assignment, [](const auto& s) { return s.empty(); });
  return assignment;
}

Frequency pick_frequency(CounterRng& rng, int frame_count, int fps, const std::vector<int>& choices) {
  const int passes = rng.pick(std::span<const int>(choices));
  return {static_cast<double>(passes) * fps / frame_count, passes};
}

std::optional<MarginViolation> check_margins_serial(const TemporalScene& scene,
                                                    const Margins& margins,
                                                    std::optional<ObjectId> focus) {
  return scan(scene, margins, focus, 0, scene.frame_count());
}

std::optional<MarginViolation> check_margins(const TemporalScene& scene, const Margins& margins,
                                             std::optional<ObjectId> focus) {
  const int frames = scene.frame_count();
  std::vector<std::optional<MarginViolation>> per_frame(static_cast<std::size_t>(frames));
#pragma omp parallel for schedule(static)
  for (int f = 0; f < frames; ++f) {
    per_frame[static_cast<std::size_t>(f)] = scan(scene, margins, focus, f, f + 1);
  }
  for (const auto& v : per_frame) {
    if (v) return v;
  }
  return std::nullopt;
}

SceneGraph build_scene(std::uint64_t seed, const BuildConfig& config) {
  const CounterRng root(seed);

  // Scene plan: clutter count and cycle pool allocation.
  std::vector<std::vector<CycleType>> cyclic_slots;
  int clutter = 0;
  {
    CounterRng plan = root.split(kPlan);
    bool planned = false;
    for (int attempt = 0; attempt <= config.limits.global_backtrack_max && !planned; ++attempt) {
      clutter = plan.between(config.clutter_min, config.clutter_max);
      std::vector<CycleType> pool;
      if (config.cycle_counts) {
        for (std::size_t t = 0; t < kCycleTypes.size(); ++t) {
          for (int n = 0; n < (*config.cycle_counts)[t]; ++n) pool.push_back(kCycleTypes[t]);
        }
      } else {
        const int base = config.cyclic_objects.value_or(1);
        const int size = plan.between(base, base + config.extra_cycles_max);
        for (int n = 0; n < size; ++n) pool.push_back(plan.pick(std::span<const CycleType>(kCycleTypes)));
      }
      const int slots = config.cyclic_objects.value_or(static_cast<int>(pool.size()));
      auto alloc = allocate_cycles(plan, pool, slots, config.cyclic_objects.has_value());
      if (alloc) {
        cyclic_slots = std::move(*alloc);
        planned = true;
      }
    }
    if (!planned) throw GenerationFailed(seed);
  }
  // Orbiters need an already placed center; put them last among cyclic objects.
  std::stable_partition(cyclic_slots.begin(), cyclic_slots.end(), [](const auto& slot) {
    return std::find(slot.begin(), slot.end(), CycleType::orbit) == slot.end();
  });

  std::vector<std::vector<CycleType>> plan(static_cast<std::size_t>(clutter));
  plan.insert(plan.end(), cyclic_slots.begin(), cyclic_slots.end());

  std::vector<ObjectSpec> placed;
  std::vector<std::uint64_t> draws(plan.size(), 0);
  int backtracks = 0;
  std::size_t idx = 0;
  while (idx < plan.size()) {
    const auto& types = plan[idx];
    const bool needs_rotatable =
        std::find(types.begin(), types.end(), CycleType::orientation) != types.end();
    const bool needs_center = std::find(types.begin(), types.end(), CycleType::orbit) != types.end();
    std::optional<ObjectSpec> accepted;
    for (int regen = 0; regen < config.limits.object_regen_max && !accepted; ++regen) {
      if (needs_center && placed.empty()) break;
      CounterRng orng = root.split(kObject, idx, draws[idx]++);
      ObjectSpec obj = sample_object(orng, config, placed, needs_rotatable);
      for (const auto t : types) obj.cycles.push_back(sample_cycle(orng, config, t, obj, placed));
      for (int resample = 0; resample <= config.limits.property_resample_max; ++resample) {
        auto candidate = placed;
        candidate.push_back(obj);
        const auto scene = materialize_serial(prefix_graph(config, candidate));
        const auto v = check_margins_serial(scene, config.margins, obj.id);
        if (!v) {
          accepted = std::move(obj);
          break;
        }
        if (resample < config.limits.property_resample_max) {
          resample_property(orng, config, obj, *v, placed);
        }
      }
    }
    if (accepted) {
      placed.push_back(std::move(*accepted));
      ++idx;
      continue;
    }
    if (++backtracks > config.limits.global_backtrack_max) throw GenerationFailed(seed);
    if (idx > 0) {
      placed.pop_back();
      --idx;
    }
  }

  SceneGraph g = prefix_graph(config, placed);
  g.seed = seed;
  g.tier = config.tier;
  CounterRng stage = root.split(kStage);
  const double j = config.jitter;
  const auto jitter = [&](Vec3 v) {
    return Vec3{v.x + stage.uniform(-j, j), v.y + stage.uniform(-j, j), v.z + stage.uniform(-j, j)};
  };
  g.camera.eye = jitter(CameraConfig{}.eye);
  g.light.sources = {{"key", jitter({6.4, -2.9, 6.0}), 1.0},
                     {"fill", jitter({-4.7, -1.0, 3.2}), 0.5},
                     {"back", jitter({-1.2, 4.4, 5.6}), 0.7}};
  if (config.light_cycle) g.light.modulation = LightModulation{config.light_floor, config.frame_count};
  return g;
}

}  // namespace cyclebench
