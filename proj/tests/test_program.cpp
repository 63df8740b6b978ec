#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cyclebench/program.hpp"
#include "support.hpp"

using namespace cyclebench;
using cbtest::object;

namespace {

SceneGraph two_cubes_and_blue_transition() {
  auto a = object(0, Shape::cube, Color::red, SizeClass::small, Material::metal, {-2, 0, 0});
  auto b = object(1, Shape::cube, Color::green, SizeClass::large, Material::rubber, {2, 0, 0});
  auto c = object(2, Shape::sphere, Color::red, SizeClass::small, Material::rubber, {0, 2.5, 0});
  c.cycles.push_back(cbtest::cycle(ColorChange{Color::blue}, 1));
  auto d = object(3, Shape::cone, Color::yellow, SizeClass::small, Material::metal, {});
  cbtest::place_on_orbit(d, b, 2.0, 270.0, Direction::clockwise, 2);
  d.cycles.push_back(cbtest::cycle(SizeChange{SizeClass::large}, 5));
  return cbtest::scene({a, b, c, d});
}

std::string param_for(ParamDomain d) {
  switch (d) {
    case ParamDomain::color: return "red";
    case ParamDomain::size: return "small";
    case ParamDomain::shape: return "cube";
    case ParamDomain::material: return "metal";
    case ParamDomain::relation: return "left";
    case ParamDomain::cycle: return "color";
  }
  return "";
}

Value sample_of(ValueKind k) {
  switch (k) {
    case ValueKind::object_set: return Value(ObjectSet{{ObjectId{0}, ObjectId{2}}});
    case ValueKind::object: return Value(ObjectId{2});
    case ValueKind::attribute: return Value::attr("red");
    case ValueKind::integer: return Value(3);
    case ValueKind::boolean: return Value(true);
    case ValueKind::invalid: return Value::invalid();
  }
  return Value::invalid();
}

bool has_color_at(const TemporalScene& t, ObjectId id, Color c, bool all) {
  bool any = false, every = true;
  for (int f = 0; f < t.frame_count(); ++f) {
    const bool hit = nearest_palette_color(t.at(f, id).color_hue) == c;
    any |= hit;
    every &= hit;
  }
  return all ? every : any;
}

ObjectSet ids_of(const Value& v) { return v.as_set(); }

bool subset(const ObjectSet& a, const ObjectSet& b) {
  return std::includes(b.ids.begin(), b.ids.end(), a.ids.begin(), a.ids.end());
}

}  // namespace

TEST_CASE("construction rejects malformed programs") {
  CHECK_THROWS_AS(FunctionalProgram({{"scene", {}, {}}, {"teleport", {}, {0}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram({{"scene", {}, {}}, {"filter_shape", {"pyramid"}, {0}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram({{"scene", {}, {}}, {"filter_shape", {}, {0}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram({{"unique", {}, {1}}, {"scene", {}, {}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram({{"scene", {}, {}}, {"query_color", {}, {0}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram({{"scene", {}, {}}, {"union", {}, {0}}}), ProgramError);
  CHECK_THROWS_AS(FunctionalProgram(std::vector<ProgramNode>{}), ProgramError);
  CHECK_NOTHROW(FunctionalProgram({{"scene", {}, {}}, {"count", {}, {0}}}));
}

TEST_CASE("program JSON round-trip") {
  ProgramBuilder b;
  const int s = b.add("scene");
  const int f = b.add("filter_color_existential", {s}, {"blue"});
  const int u = b.add("unique", {f});
  b.add("query_color_period", {u});
  const auto p = b.build();
  CHECK(p.output_kind() == ValueKind::integer);
  CHECK(p.parameters() == std::vector<std::string>{"blue"});
  CHECK(FunctionalProgram::from_json(nlohmann::json::parse(p.to_json().dump())) == p);
}

TEST_CASE("unique with two cubes is Invalid") {
  const auto t = simulate(two_cubes_and_blue_transition());
  ProgramBuilder b;
  b.add("unique", {b.add("filter_shape", {b.add("scene")}, {"cube"})});
  CHECK(execute(b.build(), t).is_invalid());
  ProgramBuilder one;
  one.add("unique", {one.add("filter_shape", {one.add("scene")}, {"sphere"})});
  CHECK(execute(one.build(), t) == Value(ObjectId{2}));
}

TEST_CASE("blue reached only mid-transition: exists but not always") {
  const auto t = simulate(two_cubes_and_blue_transition());
  for (bool universal : {false, true}) {
    ProgramBuilder b;
    const auto op = universal ? "filter_color_universal" : "filter_color_existential";
    b.add("exist", {b.add(op, {b.add("scene")}, {"blue"})});
    bool oracle = false;
    for (std::uint32_t i = 0; i < 4; ++i) oracle |= has_color_at(t, {i}, Color::blue, universal);
    CHECK(execute(b.build(), t) == Value(oracle));
    CHECK(oracle == !universal);
  }
}

TEST_CASE("counting cyclic objects in three-cycle scenes gives 3") {
  for (const auto& g : cbtest::built_scenes(Tier::L4, 5, 70)) {
    const auto t = simulate(g);
    ProgramBuilder b;
    b.add("count", {b.add("filter_cyclic", {b.add("scene")})});
    CHECK(execute(b.build(), t) == Value(3));
  }
}

TEST_CASE("attribute queries honour dynamic attributes") {
  const auto t = simulate(two_cubes_and_blue_transition());
  const std::vector<Value> sphere{Value(ObjectId{2})};
  const std::vector<Value> cone{Value(ObjectId{3})};
  CHECK(apply_operator("query_color", sphere, {}, t).is_invalid());
  CHECK(apply_operator("query_color_initial", sphere, {}, t) == Value::attr("red"));
  CHECK(apply_operator("query_color_final", sphere, {}, t) == Value::attr("blue"));
  CHECK(apply_operator("query_size_final", sphere, {}, t).is_invalid());
  CHECK(apply_operator("query_size", cone, {}, t).is_invalid());
  CHECK(apply_operator("query_size_final", cone, {}, t) == Value::attr("large"));
  CHECK(apply_operator("query_orbit_direction", cone, {}, t) == Value::attr("clockwise"));
  CHECK(apply_operator("query_orbit_direction", sphere, {}, t).is_invalid());
  CHECK(apply_operator("orbit_center", cone, {}, t) == Value(ObjectId{1}));
  CHECK(apply_operator("orbiters", {Value(ObjectId{1})}, {}, t) == Value(ObjectSet{{ObjectId{3}}}));
  CHECK(apply_operator("query_orbit_period", cone, {}, t) == Value(80));
  CHECK(apply_operator("query_size_passes", cone, {}, t) == Value(5));
  CHECK(apply_operator("query_color_period", sphere, {}, t) == Value(160));
  CHECK(apply_operator("query_linear_period", sphere, {}, t).is_invalid());
  // Frame-0 color for the dynamic sphere: the red cube matches it.
  CHECK(apply_operator("same_color", sphere, {}, t) == Value(ObjectSet{{ObjectId{0}}}));
}

TEST_CASE("Invalid absorbs through every operator") {
  const auto t = simulate(two_cubes_and_blue_transition());
  int checked = 0;
  for (const auto& sig : operator_table()) {
    std::vector<std::string> params;
    for (auto d : sig.params) params.push_back(param_for(d));
    for (std::size_t k = 0; k < sig.inputs.size(); ++k) {
      std::vector<Value> args;
      for (auto kind : sig.inputs) args.push_back(sample_of(kind));
      args[k] = Value::invalid();
      CHECK_MESSAGE(apply_operator(sig.name, args, params, t).is_invalid(), sig.name);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("universal results imply existential ones, and static objects do not care") {
  std::vector<SceneGraph> scenes{two_cubes_and_blue_transition()};
  for (auto tier : {Tier::L1, Tier::L3, Tier::L4}) {
    for (auto& g : cbtest::built_scenes(tier, 4, 500)) scenes.push_back(std::move(g));
  }
  for (const auto& g : scenes) {
    const auto t = simulate(g);
    ObjectSet all;
    for (const auto& o : g.objects) all.ids.push_back(o.id);
    const Value everyone(all);
    const auto is_static = [&](ObjectId id) { return !g.object(id).is_cyclic(); };

    for (auto c : kColors) {
      const auto u = ids_of(apply_operator("filter_color_universal", {everyone}, {std::string(name_of(c))}, t));
      const auto e = ids_of(apply_operator("filter_color_existential", {everyone}, {std::string(name_of(c))}, t));
      CHECK(subset(u, e));
      for (auto id : e.ids) {
        if (is_static(id)) CHECK(std::binary_search(u.ids.begin(), u.ids.end(), id));
      }
    }
    for (auto s : kSizes) {
      const auto u = ids_of(apply_operator("filter_size_universal", {everyone}, {std::string(name_of(s))}, t));
      const auto e = ids_of(apply_operator("filter_size_existential", {everyone}, {std::string(name_of(s))}, t));
      CHECK(subset(u, e));
      for (auto id : e.ids) {
        if (is_static(id)) CHECK(std::binary_search(u.ids.begin(), u.ids.end(), id));
      }
    }
    for (const auto& o : g.objects) {
      for (auto r : kRelations) {
        const auto rn = std::string(name_of(r));
        const auto u = ids_of(apply_operator("relate_universal", {Value(o.id)}, {rn}, t));
        const auto e = ids_of(apply_operator("relate_existential", {Value(o.id)}, {rn}, t));
        CHECK(subset(u, e));
        if (is_static(o.id)) {
          for (auto id : e.ids) {
            if (is_static(id) && !g.object(id).find(CycleType::orbit)) {
              CHECK(std::binary_search(u.ids.begin(), u.ids.end(), id));
            }
          }
        }
      }
      for (const auto& p : g.objects) {
        if (p.id == o.id) continue;
        for (const char* prop : {"color", "size"}) {
          const auto u = apply_operator(std::string("equal_") + prop + "_universal", {Value(o.id), Value(p.id)}, {}, t);
          const auto e = apply_operator(std::string("equal_") + prop + "_existential", {Value(o.id), Value(p.id)}, {}, t);
          CHECK((!u.as_bool() || e.as_bool()));
          if (is_static(o.id) && is_static(p.id)) CHECK(u == e);
        }
      }
    }
  }
}
