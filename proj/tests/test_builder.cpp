#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "cyclebench/serialize.hpp"
#include "support.hpp"

using namespace cyclebench;
using cbtest::object;

namespace {

// Per-frame distance scan written from the margin definition alone.
std::optional<int> first_violation_frame(const TemporalScene& t, const Margins& m) {
  const auto& g = t.graph;
  for (int f = 0; f < t.frame_count(); ++f) {
    for (std::size_t i = 0; i < g.objects.size(); ++i) {
      const auto& si = t.at(f, g.objects[i].id);
      const double ri = bounding_radius(g.objects[i].shape, si.scale);
      if (si.position.x < g.bounds.x_min + m.boundary_margin || si.position.x > g.bounds.x_max - m.boundary_margin ||
          si.position.y < g.bounds.y_min + m.boundary_margin || si.position.y > g.bounds.y_max - m.boundary_margin) {
        return f;
      }
      for (std::size_t j = i + 1; j < g.objects.size(); ++j) {
        const auto& sj = t.at(f, g.objects[j].id);
        const double rj = bounding_radius(g.objects[j].shape, sj.scale);
        const double dx = si.position.x - sj.position.x, dy = si.position.y - sj.position.y;
        if (std::sqrt(dx * dx + dy * dy) < ri + rj + m.object_margin) return f;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("sample_object is deterministic and uniform over shapes") {
  BuildConfig config;
  CounterRng a(3), b(3);
  CHECK(sample_object(a, config, {}) == sample_object(b, config, {}));

  CounterRng rng(17);
  std::map<Shape, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    CounterRng draw = rng.split(static_cast<std::uint64_t>(i));
    const auto o = sample_object(draw, config, {});
    ++counts[o.shape];
    const double lo = config.bounds.x_min + config.margins.boundary_margin;
    const double hi = config.bounds.x_max - config.margins.boundary_margin;
    REQUIRE(o.position0.x >= lo);
    REQUIRE(o.position0.x <= hi);
    REQUIRE(o.position0.y >= lo);
    REQUIRE(o.position0.y <= hi);
  }
  const double expected = n / 4.0, sigma = std::sqrt(n * 0.25 * 0.75);
  for (auto s : kShapes) CHECK(std::abs(counts[s] - expected) < 3 * sigma);
}

TEST_CASE("allocate_cycles respects the same-property rule") {
  CounterRng rng(8);
  bool together = false, apart = false;
  for (int i = 0; i < 200; ++i) {
    auto alloc = allocate_cycles(rng, {CycleType::orbit, CycleType::color}, 2, false);
    REQUIRE(alloc.has_value());
    if (alloc->size() == 1) {
      CHECK(alloc->front().size() == 2);
      together = true;
    } else {
      CHECK(alloc->size() == 2);
      apart = true;
    }
  }
  CHECK(together);
  CHECK(apart);

  const auto single = allocate_cycles(rng, {CycleType::linear, CycleType::orbit}, 1, false);
  CHECK_FALSE(single.has_value());
  const auto split = allocate_cycles(rng, {CycleType::linear, CycleType::orbit}, 2, false);
  REQUIRE(split.has_value());
  CHECK(split->size() == 2);
  const auto none = allocate_cycles(rng, {}, 3, false);
  REQUIRE(none.has_value());
  CHECK(none->empty());
}

TEST_CASE("pick_frequency maps passes to periods") {
  CounterRng rng(2);
  std::map<int, int> seen;
  for (int i = 0; i < 300; ++i) {
    const auto f = pick_frequency(rng, 160, 32);
    CHECK(f.hz == doctest::Approx(f.passes / 5.0));
    ++seen[160 / f.passes];
  }
  CHECK(seen.size() == 3);
  CHECK(seen.contains(160));
  CHECK(seen.contains(80));
  CHECK(seen.contains(32));
}

TEST_CASE("check_margins examples") {
  const Margins m;
  const auto single = cbtest::scene({object(0, Shape::cube, Color::red, SizeClass::small, Material::metal, {})});
  CHECK_FALSE(check_margins(materialize(single), m).has_value());

  const auto close = cbtest::scene({object(0, Shape::sphere, Color::red, SizeClass::small, Material::metal, {}),
                                    object(1, Shape::sphere, Color::blue, SizeClass::small, Material::metal, {0.1, 0, 0})});
  const auto v = check_margins(materialize(close), m);
  REQUIRE(v.has_value());
  CHECK(v->frame == 0);
}

TEST_CASE("an orbit through a clutter object is caught at the crossing frame") {
  auto center = object(0, Shape::cylinder, Color::gray, SizeClass::small, Material::rubber, {});
  auto clutter = object(1, Shape::sphere, Color::red, SizeClass::small, Material::metal, {0.0, 2.0, 0.0});
  auto orbiter = object(2, Shape::sphere, Color::blue, SizeClass::small, Material::metal, {});
  cbtest::place_on_orbit(orbiter, center, 2.0, 0.0, Direction::counterclockwise, 1);
  const auto t = materialize(cbtest::scene({center, clutter, orbiter}));
  const Margins m;
  const auto v = check_margins(t, m);
  const auto oracle = first_violation_frame(t, m);
  REQUIRE(v.has_value());
  REQUIRE(oracle.has_value());
  CHECK(v->frame == *oracle);
  CHECK(v->frame > 0);
  CHECK(v->frame < 40);  // before the orbiter reaches the clutter at a quarter turn
  CHECK(v->a == ObjectId{1});
  CHECK(v->b == ObjectId{2});
  CHECK(check_margins_serial(t, m) == v);
}

TEST_CASE("build_scene is deterministic and its output passes the independent scan") {
  for (auto tier : kTiers) {
    const auto config = tier_config(tier);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      SceneGraph g;
      try {
        g = build_scene(seed, config);
      } catch (const GenerationFailed&) {
        continue;
      }
      CHECK(dump_document(scene_to_json(g)) == dump_document(scene_to_json(build_scene(seed, config))));
      const auto t = materialize(g);
      CHECK_FALSE(first_violation_frame(t, config.margins).has_value());
      CHECK_FALSE(check_margins(t, config.margins).has_value());
      CHECK(check_margins(t, config.margins) == check_margins_serial(t, config.margins));
    }
  }
}

TEST_CASE("orbit centers precede their orbiters and clutter comes first") {
  for (auto tier : {Tier::L1, Tier::L3, Tier::L4}) {
    for (const auto& g : cbtest::built_scenes(tier, 20, 900)) {
      for (const auto& o : g.objects) {
        if (const auto* orbit = o.find_variant<Orbit>()) CHECK(orbit->center < o.id);
      }
      CHECK(std::is_partitioned(g.objects.begin(), g.objects.end(), [](const auto& o) { return !o.is_cyclic(); }));
    }
  }
}

TEST_CASE("too many objects for the bounds fail cleanly") {
  BuildConfig config;
  config.bounds = {-1.0, 1.0, -1.0, 1.0};
  config.clutter_min = 8;
  config.clutter_max = 8;
  config.limits.global_backtrack_max = 3;
  CHECK_THROWS_AS(build_scene(1, config), GenerationFailed);
}

TEST_CASE("failure rate at the default config stays under 5%") {
  const auto config = tier_config(Tier::L1);
  int failed = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    try {
      build_scene(seed, config);
    } catch (const GenerationFailed&) {
      ++failed;
    }
  }
  MESSAGE("failed seeds: " << failed << " / 1000");
  CHECK(failed < 50);
}
