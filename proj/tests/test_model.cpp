#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cyclebench/serialize.hpp"
#include "support.hpp"

using namespace cyclebench;
using cbtest::object;

namespace {

bool has(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

// Brute force over all palette entries, first minimum wins.
Color palette_oracle(double hue) {
  int best = 0;
  double best_d = 1e9;
  for (int i = 0; i < 8; ++i) {
    double d = std::abs(hue - palette_hue(kColors[i]));
    d = std::min(d, 360.0 - d);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return kColors[best];
}

}  // namespace

TEST_CASE("validate_spec accepts distinct properties and clutter") {
  auto o = object(0, Shape::cube, Color::red, SizeClass::small, Material::metal, {});
  CHECK(validate_spec(o).empty());
  o.cycles.push_back(cbtest::cycle(ColorChange{Color::blue}, 1));
  o.cycles.push_back(cbtest::cycle(SizeChange{SizeClass::large}, 2));
  CHECK(validate_spec(o).empty());
}

TEST_CASE("validate_spec rejects two position cycles") {
  auto o = object(1, Shape::cone, Color::red, SizeClass::small, Material::metal, {1.0, 0.0, 0.0});
  o.cycles.push_back(cbtest::cycle(LinearMotion{{2.0, 0.0, 0.0}}, 1));
  o.cycles.push_back(cbtest::cycle(Orbit{ObjectId{0}, 2.0, 0.0, Direction::clockwise}, 1));
  CHECK(has(validate_spec(o), "position targeted twice"));
}

TEST_CASE("validate_spec flags bad parameters") {
  auto o = object(0, Shape::sphere, Color::red, SizeClass::small, Material::metal, {});
  o.cycles.push_back(cbtest::cycle(OrientationChange{1}, 3));
  o.cycles.push_back(cbtest::cycle(ColorChange{Color::red}, 1));
  const auto v = validate_spec(o);
  CHECK(has(v, "passes"));
  CHECK(has(v, "rotation-invariant"));
  CHECK(has(v, "color target equals color0"));
}

TEST_CASE("nearest_palette_color examples") {
  CHECK(nearest_palette_color(palette_hue(Color::red)) == Color::red);
  CHECK(nearest_palette_color(palette_hue(Color::blue) + 1.0) == Color::blue);
  // red 0 and brown 30: the midpoint goes to the lower index.
  CHECK(nearest_palette_color(15.0) == Color::red);
  // cyan 180 (index 6) and blue 225 (index 2).
  CHECK(nearest_palette_color(202.5) == Color::blue);
}

TEST_CASE("nearest_palette_color matches brute force on a fine grid") {
  for (int i = 0; i < 36000; ++i) {
    const double hue = i * 0.01;
    REQUIRE_MESSAGE(nearest_palette_color(hue) == palette_oracle(hue), "hue " << hue);
  }
}

TEST_CASE("enum spellings round-trip") {
  for (auto s : kShapes) CHECK(parse_enum<Shape>(name_of(s)) == s);
  for (auto c : kColors) CHECK(parse_enum<Color>(name_of(c)) == c);
  for (auto t : kCycleTypes) CHECK(parse_enum<CycleType>(name_of(t)) == t);
  for (auto r : kRelations) CHECK(parse_enum<Relation>(name_of(r)) == r);
  for (auto t : kTiers) CHECK(parse_enum<Tier>(name_of(t)) == t);
  CHECK_FALSE(parse_enum<Shape>("Cube").has_value());
}

TEST_CASE("bounding radius uses the cube half-diagonal") {
  CHECK(bounding_radius(Shape::cube, kSmallScale) == doctest::Approx(0.35 * std::sqrt(2.0)));
  CHECK(bounding_radius(Shape::sphere, kLargeScale) == doctest::Approx(0.70));
}

TEST_CASE("orbit reference cycles are rejected, not looped on") {
  auto a = object(0, Shape::cube, Color::red, SizeClass::small, Material::metal, {});
  auto b = object(1, Shape::cone, Color::blue, SizeClass::small, Material::metal, {});
  cbtest::place_on_orbit(a, b, 2.0, 0.0, Direction::clockwise, 1);
  cbtest::place_on_orbit(b, a, 2.0, 180.0, Direction::clockwise, 1);
  const auto g = cbtest::scene({a, b});
  CHECK_FALSE(orbit_topological_order(g).has_value());
  CHECK(has(validate_graph(g), "cycle"));
  CHECK_THROWS_AS(materialize(g), CyclicOrbitError);
}

TEST_CASE("built scenes validate and survive a JSON round-trip") {
  for (auto tier : kTiers) {
    for (const auto& g : cbtest::built_scenes(tier, 5, 100)) {
      CHECK(validate_graph(g).empty());
      const auto text = dump_document(scene_to_json(g));
      const auto back = scene_from_json(nlohmann::json::parse(text));
      CHECK(back == g);
      CHECK(dump_document(scene_to_json(back)) == text);
    }
  }
}

TEST_CASE("scene JSON uses the normative field names") {
  const auto g = cbtest::built_scenes(Tier::L3, 1, 7).front();
  const auto j = scene_to_json(g);
  for (const char* key : {"scene_id", "tier", "seed", "frame_count", "fps", "bounds", "camera", "lights", "objects"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  const auto& o = j.at("objects").at(0);
  for (const char* key : {"id", "shape", "material", "size0", "color0", "position0", "orientation0", "cycles"}) {
    CHECK_MESSAGE(o.contains(key), key);
  }
  bool saw_cycle = false;
  for (const auto& obj : j.at("objects")) {
    for (const auto& c : obj.at("cycles")) {
      saw_cycle = true;
      for (const char* key : {"type", "params", "passes", "period_frames"}) CHECK_MESSAGE(c.contains(key), key);
      CHECK(c.at("period_frames").get<int>() * c.at("passes").get<int>() == 160);
    }
  }
  CHECK(saw_cycle);
}

TEST_CASE("malformed scene JSON raises SchemaError") {
  auto j = scene_to_json(cbtest::built_scenes(Tier::L1, 1, 3).front());
  j["objects"][0]["shape"] = "pyramid";
  CHECK_THROWS_AS(scene_from_json(j), SchemaError);
}
