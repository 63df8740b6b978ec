#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cyclebench/model.hpp"
#include "cyclebench/rng.hpp"

namespace cyclebench {

struct Margins {
  double object_margin = 0.4;
  double boundary_margin = 0.25;
};

struct AttemptLimits {
  int property_resample_max = 10;
  int object_regen_max = 10;
  int global_backtrack_max = 100;
};

struct BuildConfig {
  Tier tier = Tier::L1;
  // Exact number of cyclic objects. nullopt lets the count emerge from the
  // allocation, with at most one object per pool entry.
  std::optional<int> cyclic_objects = 1;
  // Fixed counts per CycleType (indexed by enum value). When absent the pool
  // size is drawn from [cyclic_objects, cyclic_objects + extra_cycles_max]
  // with uniformly chosen types.
  std::optional<std::array<int, 5>> cycle_counts;
  int extra_cycles_max = 1;
  int clutter_min = 2;
  int clutter_max = 3;
  Bounds bounds;
  Margins margins;
  AttemptLimits limits;
  std::vector<int> passes_choices{kPassesChoices.begin(), kPassesChoices.end()};
  bool light_cycle = false;
  double light_floor = 0.2;
  int frame_count = kDefaultFrameCount;
  int fps = kDefaultFps;
  double jitter = 0.5;
  double min_linear_travel = 1.0;
};

class GenerationFailed : public std::runtime_error {
 public:
  explicit GenerationFailed(std::uint64_t seed);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Uniform attributes, uniform position inside bounds shrunk by the boundary
// margin, uniform orientation. The id is existing.size().
ObjectSpec sample_object(CounterRng& rng, const BuildConfig& config,
                         const std::vector<ObjectSpec>& existing,
                         bool needs_orientation_shape = false);

// Distributes the pool over `slots` candidate objects so no object gets two
// cycles on the same property. With `fill_all_slots`, every slot receives
// at least one entry. Returns the non-empty slots, or nullopt when the pool
// cannot be placed (the caller should backtrack).
std::optional<std::vector<std::vector<CycleType>>> allocate_cycles(
    CounterRng& rng, std::vector<CycleType> pool, int slots, bool fill_all_slots);

struct Frequency {
  double hz = 0.0;
  int passes = 1;
};
Frequency pick_frequency(CounterRng& rng, int frame_count, int fps,
                         const std::vector<int>& choices = {1, 2, 5});

struct MarginViolation {
  int frame = 0;
  ObjectId a;
  ObjectId b;  // equals a for a boundary violation
  friend bool operator==(const MarginViolation&, const MarginViolation&) = default;
};

// Earliest violation in (frame, a, b) order over all frames: pairwise
// ground distance below r_a + r_b + object_margin, or a center outside the
// bounds shrunk by boundary_margin. With `focus`, only constraints involving
// that object are checked. Parallel over frames.
std::optional<MarginViolation> check_margins(const TemporalScene& scene, const Margins& margins,
                                             std::optional<ObjectId> focus = std::nullopt);
std::optional<MarginViolation> check_margins_serial(const TemporalScene& scene,
                                                    const Margins& margins,
                                                    std::optional<ObjectId> focus = std::nullopt);

// Deterministic in (seed, config). Throws GenerationFailed once the global
// backtracking budget is spent.
SceneGraph build_scene(std::uint64_t seed, const BuildConfig& config);

}  // namespace cyclebench
