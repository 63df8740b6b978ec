#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cyclebench/rng.hpp"
#include "support.hpp"

using namespace cyclebench;
using cbtest::near;
using cbtest::object;

namespace {

constexpr double kPi = std::numbers::pi;

// Position along a linear cycle by integrating the constant speed in small
// steps and reflecting at the switch point.
Vec3 linear_by_integration(Vec3 p0, Vec3 sw, double hz, double t) {
  const Vec3 d = sw - p0;
  const double len = norm(d);
  const double speed = 2.0 * len * hz;
  const int steps = 200000;
  const double dt = t / steps;
  double s = 0.0;
  double dir = 1.0;
  for (int i = 0; i < steps; ++i) {
    s += dir * speed * dt;
    if (s >= len) {
      s = 2 * len - s;
      dir = -1.0;
    } else if (s <= 0.0) {
      s = -s;
      dir = 1.0;
    }
  }
  return p0 + (s / len) * d;
}

// Rotates the initial radius vector in many small steps.
Vec3 orbit_by_rotation(double r, double hz, double t, double sign) {
  double x = r, y = 0.0;
  const int steps = 100000;
  const double dtheta = sign * 2.0 * kPi * hz * t / steps;
  const double c = std::cos(dtheta), s = std::sin(dtheta);
  for (int i = 0; i < steps; ++i) {
    const double nx = c * x - s * y;
    y = s * x + c * y;
    x = nx;
  }
  return {x, y, 0.0};
}

}  // namespace

TEST_CASE("linear motion examples") {
  const Vec3 p0{0, 0, 0}, sw{2, 0, 0};
  CHECK(near(eval_linear(p0, sw, 0.2, 2.5), {2, 0, 0}));
  CHECK(near(eval_linear(p0, sw, 0.2, 5.0), {0, 0, 0}));
  CHECK(near(eval_linear(p0, sw, 0.2, 1.25), {1, 0, 0}));
  CHECK(near(eval_linear(p0, sw, 0.2, 1.25), linear_by_integration(p0, sw, 0.2, 1.25), 1e-4));
  CHECK(near(eval_linear(p0, sw, 0.2, 3.3), linear_by_integration(p0, sw, 0.2, 3.3), 1e-4));
}

TEST_CASE("orbit examples") {
  const Vec3 c{0, 0, 0};
  CHECK(near(eval_orbit(c, 2.0, 0.0, Direction::counterclockwise, 0.2, 0.0), {2, 0, 0}));
  CHECK(near(eval_orbit(c, 2.0, 0.0, Direction::counterclockwise, 0.2, 5.0), {2, 0, 0}));
  CHECK(near(eval_orbit(c, 2.0, 0.0, Direction::counterclockwise, 0.2, 1.25), {0, 2, 0}));
  CHECK(near(eval_orbit(c, 2.0, 0.0, Direction::counterclockwise, 0.2, 1.25), orbit_by_rotation(2.0, 0.2, 1.25, 1.0),
             1e-8));
  CHECK(near(eval_orbit(c, 2.0, 0.0, Direction::clockwise, 0.2, 0.7), orbit_by_rotation(2.0, 0.2, 0.7, -1.0), 1e-8));
}

TEST_CASE("size, color, orientation and light examples") {
  const double hz = 0.2;
  auto s = eval_size(SizeClass::small, SizeClass::large, hz, 0.0);
  CHECK(s.scale == doctest::Approx(0.35));
  CHECK(s.nominal == NominalSize::small);
  s = eval_size(SizeClass::small, SizeClass::large, hz, 2.5);
  CHECK(s.scale == doctest::Approx(0.70));
  CHECK(s.nominal == NominalSize::large);
  s = eval_size(SizeClass::small, SizeClass::large, hz, 1.25);
  CHECK(s.scale == doctest::Approx(0.525));
  CHECK(s.nominal == NominalSize::transitional);

  const double red = palette_hue(Color::red), blue = palette_hue(Color::blue);
  CHECK(eval_color(red, blue, hz, 0.0) == doctest::Approx(red));
  CHECK(eval_color(red, blue, hz, 2.5) == doctest::Approx(blue));
  CHECK(near(eval_color(red, blue, hz, 5.0), red));
  // Shorter arc from 0 to 225 goes down through 315: a quarter period sits at 292.5.
  CHECK(eval_color(red, blue, hz, 1.25) == doctest::Approx(292.5));

  CHECK(eval_orientation(10.0, 1, hz, 0.0) == doctest::Approx(10.0));
  CHECK(near(eval_orientation(10.0, 1, hz, 5.0), 10.0));
  CHECK(eval_orientation(10.0, 1, hz, 2.5) == doctest::Approx(190.0));
  double acc = 10.0;
  for (int i = 0; i < 1000; ++i) acc += 360.0 * hz * (2.5 / 1000);
  CHECK(eval_orientation(10.0, 1, hz, 2.5) == doctest::Approx(acc));

  CHECK(eval_light(2.0, 0.2, 160, 0) == doctest::Approx(2.0));
  CHECK(eval_light(2.0, 0.2, 160, 80) == doctest::Approx(0.4));
  CHECK(eval_light(2.0, 0.2, 160, 160) == doctest::Approx(2.0));
}

TEST_CASE("frequency follows passes over duration") {
  const CycleSpec c{ColorChange{}, 2};
  CHECK(c.frequency(160, 32) == doctest::Approx(0.4));
  CHECK(CycleSpec{ColorChange{}, 1}.period_frames(160) == 160);
  CHECK(CycleSpec{ColorChange{}, 5}.period_frames(160) == 32);
}

TEST_CASE("periodicity holds at every whole period for random specs") {
  CounterRng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const double hz = rng.pick(std::span<const int>(kPassesChoices)) / 5.0;
    const Vec3 p0{rng.uniform(-3, 3), rng.uniform(-3, 3), 0};
    const Vec3 sw{rng.uniform(-3, 3), rng.uniform(-3, 3), 0};
    const double r = rng.uniform(1.5, 3.0), g0 = rng.uniform(0, 360);
    const double h0 = rng.uniform(0, 360), h1 = rng.uniform(0, 360), w0 = rng.uniform(0, 360);
    const int turns = rng.between(1, 3);
    for (int l = 0; l <= 3; ++l) {
      const double t = l / hz;
      REQUIRE(near(eval_linear(p0, sw, hz, t), p0));
      REQUIRE(near(eval_orbit(p0, r, g0, Direction::clockwise, hz, t),
                   eval_orbit(p0, r, g0, Direction::clockwise, hz, 0.0)));
      REQUIRE(eval_size(SizeClass::large, SizeClass::small, hz, t).scale == kLargeScale);
      REQUIRE(near(eval_color(h0, h1, hz, t), eval_color(h0, h1, hz, 0.0)));
      REQUIRE(near(eval_orientation(w0, turns, hz, t), w0));
    }
  }
}

namespace {

SceneGraph stacked_scene() {
  auto c = object(0, Shape::cube, Color::red, SizeClass::small, Material::rubber, {-1.0, 0.0, 0.0});
  c.cycles.push_back(cbtest::cycle(LinearMotion{{1.0, 0.5, 0.0}}, 1));
  auto o = object(1, Shape::sphere, Color::blue, SizeClass::large, Material::metal, {});
  cbtest::place_on_orbit(o, c, 2.0, 30.0, Direction::counterclockwise, 5);
  o.cycles.push_back(cbtest::cycle(SizeChange{SizeClass::small}, 2));
  auto k = object(2, Shape::cone, Color::green, SizeClass::small, Material::rubber, {3.0, 3.0, 0.0});
  k.cycles.push_back(cbtest::cycle(OrientationChange{2}, 2));
  k.cycles.push_back(cbtest::cycle(ColorChange{Color::yellow}, 5));
  return cbtest::scene({c, o, k});
}

}  // namespace

TEST_CASE("static scene keeps every frame equal to frame 0") {
  const auto g = cbtest::scene({object(0, Shape::cube, Color::red, SizeClass::small, Material::metal, {1, 1, 0}),
                                object(1, Shape::cone, Color::gray, SizeClass::large, Material::rubber, {-1, 1, 0})});
  const auto t = materialize(g);
  for (int f = 0; f < t.frame_count(); ++f) {
    for (std::uint32_t i = 0; i < 2; ++i) REQUIRE(t.at(f, ObjectId{i}) == t.at(0, ObjectId{i}));
  }
}

TEST_CASE("orbit around a moving center is stacked") {
  const auto g = stacked_scene();
  REQUIRE(validate_graph(g).empty());
  const auto t = materialize(g);
  for (int f = 0; f < t.frame_count(); ++f) {
    const double sec = f / 32.0;
    const Vec3 center = eval_linear({-1.0, 0.0, 0.0}, {1.0, 0.5, 0.0}, 0.2, sec);
    const Vec3 expect = eval_orbit(center, 2.0, 30.0, Direction::counterclockwise, 1.0, sec);
    const Vec3 got = t.at(f, ObjectId{1}).position;
    REQUIRE(near(got.x, expect.x, 1e-9));
    REQUIRE(near(got.y, expect.y, 1e-9));
    REQUIRE(near(ground_distance(got, t.at(f, ObjectId{0}).position), 2.0));
  }
}

TEST_CASE("frame F extrapolates back to frame 0") {
  for (const auto& g : {stacked_scene(), cbtest::built_scenes(Tier::L4, 1, 55).front()}) {
    const auto order = *orbit_topological_order(g);
    const auto f0 = evaluate_frame(g, order, 0);
    const auto fF = evaluate_frame(g, order, g.frame_count);
    REQUIRE(f0.size() == fF.size());
    for (std::size_t i = 0; i < f0.size(); ++i) {
      CHECK(near(f0[i].position, fF[i].position));
      CHECK(near(f0[i].orientation, fF[i].orientation));
      CHECK(near(f0[i].scale, fF[i].scale));
      CHECK(near(f0[i].color_hue, fF[i].color_hue));
    }
  }
}

TEST_CASE("linear speed is constant and the base never sinks") {
  const auto t = materialize(stacked_scene());
  const double step = norm(t.at(1, ObjectId{0}).position - t.at(0, ObjectId{0}).position);
  for (int f = 1; f < t.frame_count(); ++f) {
    Vec3 a = t.at(f - 1, ObjectId{0}).position, b = t.at(f, ObjectId{0}).position;
    a.z = b.z = 0.0;
    REQUIRE(near(norm(b - a), step));
    for (std::uint32_t i = 0; i < 3; ++i) {
      const auto& s = t.at(f, ObjectId{i});
      REQUIRE(s.position.z - s.scale >= -1e-12);
    }
  }
}

TEST_CASE("nominal size is exact only at the endpoints") {
  const auto t = materialize(stacked_scene());
  // passes 2: period 80, half 40.
  CHECK(t.at(0, ObjectId{1}).nominal_size == NominalSize::large);
  CHECK(t.at(40, ObjectId{1}).nominal_size == NominalSize::small);
  CHECK(t.at(80, ObjectId{1}).nominal_size == NominalSize::large);
  CHECK(t.at(20, ObjectId{1}).nominal_size == NominalSize::transitional);
}

TEST_CASE("parallel materialize is bit-identical to the serial reference") {
  for (auto tier : kTiers) {
    for (const auto& g : cbtest::built_scenes(tier, 3, 300)) {
      const auto a = materialize(g);
      const auto b = materialize_serial(g);
      CHECK(a.states == b.states);
      CHECK(materialize(g).states == a.states);
    }
  }
}
