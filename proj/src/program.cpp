#include "cyclebench/program.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace cyclebench {

namespace {

using K = ValueKind;
using P = ParamDomain;

std::vector<OperatorSignature> make_table() {
  std::vector<OperatorSignature> t = {
      {"scene", {}, {}, K::object_set},
      {"unique", {K::object_set}, {}, K::object},
      {"filter_color_existential", {K::object_set}, {P::color}, K::object_set},
      {"filter_color_universal", {K::object_set}, {P::color}, K::object_set},
      {"filter_size_existential", {K::object_set}, {P::size}, K::object_set},
      {"filter_size_universal", {K::object_set}, {P::size}, K::object_set},
      {"filter_shape", {K::object_set}, {P::shape}, K::object_set},
      {"filter_material", {K::object_set}, {P::material}, K::object_set},
      {"filter_orbit", {K::object_set}, {}, K::object_set},
      {"filter_cyclic", {K::object_set}, {}, K::object_set},
      {"filter_cycle", {K::object_set}, {P::cycle}, K::object_set},
      {"query_color", {K::object}, {}, K::attribute},
      {"query_color_initial", {K::object}, {}, K::attribute},
      {"query_color_final", {K::object}, {}, K::attribute},
      {"query_size", {K::object}, {}, K::attribute},
      {"query_size_initial", {K::object}, {}, K::attribute},
      {"query_size_final", {K::object}, {}, K::attribute},
      {"query_shape", {K::object}, {}, K::attribute},
      {"query_material", {K::object}, {}, K::attribute},
      {"query_orbit_direction", {K::object}, {}, K::attribute},
      {"orbit_center", {K::object}, {}, K::object},
      {"orbiters", {K::object}, {}, K::object_set},
      {"relate_existential", {K::object}, {P::relation}, K::object_set},
      {"relate_universal", {K::object}, {P::relation}, K::object_set},
      {"union", {K::object_set, K::object_set}, {}, K::object_set},
      {"intersect", {K::object_set, K::object_set}, {}, K::object_set},
      {"except", {K::object_set, K::object_set}, {}, K::object_set},
      {"include", {K::object, K::object_set}, {}, K::boolean},
      {"exist", {K::object_set}, {}, K::boolean},
      {"count", {K::object_set}, {}, K::integer},
      {"same_color", {K::object}, {}, K::object_set},
      {"same_size", {K::object}, {}, K::object_set},
      {"same_shape", {K::object}, {}, K::object_set},
      {"same_material", {K::object}, {}, K::object_set},
      {"equal_color", {K::attribute, K::attribute}, {}, K::boolean},
      {"equal_size", {K::attribute, K::attribute}, {}, K::boolean},
      {"equal_shape", {K::attribute, K::attribute}, {}, K::boolean},
      {"equal_material", {K::attribute, K::attribute}, {}, K::boolean},
      {"equal_color_existential", {K::object, K::object}, {}, K::boolean},
      {"equal_color_universal", {K::object, K::object}, {}, K::boolean},
      {"equal_size_existential", {K::object, K::object}, {}, K::boolean},
      {"equal_size_universal", {K::object, K::object}, {}, K::boolean},
      {"equal_object", {K::object, K::object}, {}, K::boolean},
      {"equal_integer", {K::integer, K::integer}, {}, K::boolean},
      {"less_than", {K::integer, K::integer}, {}, K::boolean},
      {"greater_than", {K::integer, K::integer}, {}, K::boolean},
      {"logical_and", {K::boolean, K::boolean}, {}, K::boolean},
      {"logical_or", {K::boolean, K::boolean}, {}, K::boolean},
      {"logical_not", {K::boolean}, {}, K::boolean},
  };
  // Storage for the generated per-cycle query names must outlive the table.
  static std::vector<std::string> names;
  if (names.empty()) {
    for (const auto c : kCycleTypes) {
      names.push_back("query_" + std::string(name_of(c)) + "_period");
      names.push_back("query_" + std::string(name_of(c)) + "_passes");
    }
  }
  for (const auto& n : names) t.push_back({n, {K::object}, {}, K::integer});
  return t;
}

bool param_valid(ParamDomain d, std::string_view text) {
  switch (d) {
    case P::color: return parse_enum<Color>(text).has_value();
    case P::size: return parse_enum<SizeClass>(text).has_value();
    case P::shape: return parse_enum<Shape>(text).has_value();
    case P::material: return parse_enum<Material>(text).has_value();
    case P::relation: return parse_enum<Relation>(text).has_value();
    case P::cycle: return parse_enum<CycleType>(text).has_value();
  }
  return false;
}

ObjectSet filter(const ObjectSet& s, const std::function<bool(ObjectId)>& keep) {
  ObjectSet out;
  for (const auto id : s.ids) {
    if (keep(id)) out.ids.push_back(id);
  }
  return out;
}

bool any_frame(const TemporalScene& t, const std::function<bool(int)>& pred) {
  for (int f = 0; f < t.frame_count(); ++f) {
    if (pred(f)) return true;
  }
  return false;
}

bool all_frames(const TemporalScene& t, const std::function<bool(int)>& pred) {
  for (int f = 0; f < t.frame_count(); ++f) {
    if (!pred(f)) return false;
  }
  return true;
}

bool quantified(const TemporalScene& t, bool universal, const std::function<bool(int)>& pred) {
  return universal ? all_frames(t, pred) : any_frame(t, pred);
}

bool size_matches(NominalSize n, SizeClass s) {
  return (s == SizeClass::small && n == NominalSize::small) ||
         (s == SizeClass::large && n == NominalSize::large);
}

constexpr double kScaleTolerance = 1e-9;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

Value per_cycle_query(std::string_view op, ObjectId o, const TemporalScene& t) {
  // op is query_<cycle>_period or query_<cycle>_passes
  const bool period = ends_with(op, "_period");
  const auto body = op.substr(6, op.size() - 6 - 7);  // strip "query_" and the suffix
  const auto type = parse_enum<CycleType>(body);
  if (!type) throw ProgramError("unknown operator '" + std::string(op) + "'");
  const auto* c = t.graph.object(o).find(*type);
  if (!c) return Value::invalid();
  return period ? Value(c->period_frames(t.frame_count())) : Value(c->passes);
}

}  // namespace

const std::vector<OperatorSignature>& operator_table() {
  static const std::vector<OperatorSignature> table = make_table();
  return table;
}

const OperatorSignature* find_operator(std::string_view name) {
  static const auto index = [] {
    std::unordered_map<std::string_view, const OperatorSignature*> m;
    for (const auto& op : operator_table()) m.emplace(op.name, &op);
    return m;
  }();
  const auto it = index.find(name);
  return it == index.end() ? nullptr : it->second;
}

FunctionalProgram::FunctionalProgram(std::vector<ProgramNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ProgramError("program has no nodes");
  std::vector<ValueKind> kinds;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    const auto where = "node " + std::to_string(i) + " (" + n.op + ")";
    const auto* sig = find_operator(n.op);
    if (!sig) throw ProgramError(where + ": unknown operator");
    if (n.inputs.size() != sig->inputs.size()) {
      throw ProgramError(where + ": expects " + std::to_string(sig->inputs.size()) + " inputs, got " +
                         std::to_string(n.inputs.size()));
    }
    if (n.params.size() != sig->params.size()) {
      throw ProgramError(where + ": expects " + std::to_string(sig->params.size()) +
                         " parameters, got " + std::to_string(n.params.size()));
    }
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      const int in = n.inputs[k];
      if (in < 0 || static_cast<std::size_t>(in) >= i) {
        throw ProgramError(where + ": input " + std::to_string(in) + " does not precede the node");
      }
      if (kinds[static_cast<std::size_t>(in)] != sig->inputs[k]) {
        throw ProgramError(where + ": input " + std::to_string(k) + " must be " +
                           std::string(name_of(sig->inputs[k])) + ", got " +
                           std::string(name_of(kinds[static_cast<std::size_t>(in)])));
      }
    }
    for (std::size_t k = 0; k < n.params.size(); ++k) {
      if (!param_valid(sig->params[k], n.params[k])) {
        throw ProgramError(where + ": invalid parameter '" + n.params[k] + "'");
      }
    }
    kinds.push_back(sig->output);
  }
}

ValueKind FunctionalProgram::output_kind() const {
  if (nodes_.empty()) return ValueKind::invalid;
  return find_operator(nodes_.back().op)->output;
}

std::vector<std::string> FunctionalProgram::parameters() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) out.insert(out.end(), n.params.begin(), n.params.end());
  return out;
}

nlohmann::json FunctionalProgram::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& n : nodes_) {
    arr.push_back({{"op", n.op}, {"params", n.params}, {"inputs", n.inputs}});
  }
  return arr;
}

FunctionalProgram FunctionalProgram::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ProgramError("program must be an array of nodes");
  std::vector<ProgramNode> nodes;
  try {
    for (const auto& n : j) {
      ProgramNode node;
      node.op = n.at("op").get<std::string>();
      if (n.contains("params")) node.params = n.at("params").get<std::vector<std::string>>();
      if (n.contains("inputs")) node.inputs = n.at("inputs").get<std::vector<int>>();
      nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProgramError(std::string("malformed program node: ") + e.what());
  }
  return FunctionalProgram(std::move(nodes));
}

int ProgramBuilder::add(std::string op, std::vector<int> inputs, std::vector<std::string> params) {
  nodes_.push_back({std::move(op), std::move(params), std::move(inputs)});
  return static_cast<int>(nodes_.size()) - 1;
}

Value apply_operator(std::string_view op, const std::vector<Value>& args,
                     const std::vector<std::string>& params, const TemporalScene& t) {
  for (const auto& a : args) {
    if (a.is_invalid()) return Value::invalid();
  }
  const auto& g = t.graph;
  const auto obj = [&](std::size_t i) -> const ObjectSpec& { return g.object(args[i].as_object()); };

  if (op == "scene") {
    ObjectSet s;
    for (const auto& o : g.objects) s.ids.push_back(o.id);
    return s;
  }
  if (op == "unique") {
    const auto& s = args[0].as_set();
    if (s.ids.size() != 1) return Value::invalid();
    return s.ids.front();
  }
  if (op == "filter_color_existential" || op == "filter_color_universal") {
    const bool universal = op == "filter_color_universal";
    const auto c = *parse_enum<Color>(params[0]);
    return filter(args[0].as_set(), [&](ObjectId id) {
      return quantified(t, universal, [&](int f) { return t.at(f, id).nominal_color == c; });
    });
  }
  if (op == "filter_size_existential" || op == "filter_size_universal") {
    const bool universal = op == "filter_size_universal";
    const auto s = *parse_enum<SizeClass>(params[0]);
    return filter(args[0].as_set(), [&](ObjectId id) {
      return quantified(t, universal, [&](int f) { return size_matches(t.at(f, id).nominal_size, s); });
    });
  }
  if (op == "filter_shape") {
    const auto s = *parse_enum<Shape>(params[0]);
    return filter(args[0].as_set(), [&](ObjectId id) { return g.object(id).shape == s; });
  }
  if (op == "filter_material") {
    const auto m = *parse_enum<Material>(params[0]);
    return filter(args[0].as_set(), [&](ObjectId id) { return g.object(id).material == m; });
  }
  if (op == "filter_orbit") {
    return filter(args[0].as_set(), [&](ObjectId id) { return g.object(id).find(CycleType::orbit); });
  }
  if (op == "filter_cyclic") {
    return filter(args[0].as_set(), [&](ObjectId id) { return g.object(id).is_cyclic(); });
  }
  if (op == "filter_cycle") {
    const auto c = *parse_enum<CycleType>(params[0]);
    return filter(args[0].as_set(), [&](ObjectId id) { return g.object(id).find(c) != nullptr; });
  }
  if (op == "query_color") {
    if (obj(0).find(CycleType::color)) return Value::invalid();
    return Value::attr(name_of(obj(0).color0));
  }
  if (op == "query_color_initial") return Value::attr(name_of(obj(0).color0));
  if (op == "query_color_final") {
    const auto* c = obj(0).find_variant<ColorChange>();
    return c ? Value::attr(name_of(c->target)) : Value::invalid();
  }
  if (op == "query_size") {
    if (obj(0).find(CycleType::size)) return Value::invalid();
    return Value::attr(name_of(obj(0).size0));
  }
  if (op == "query_size_initial") return Value::attr(name_of(obj(0).size0));
  if (op == "query_size_final") {
    const auto* c = obj(0).find_variant<SizeChange>();
    return c ? Value::attr(name_of(c->target)) : Value::invalid();
  }
  if (op == "query_shape") return Value::attr(name_of(obj(0).shape));
  if (op == "query_material") return Value::attr(name_of(obj(0).material));
  if (op == "query_orbit_direction") {
    const auto* o = obj(0).find_variant<Orbit>();
    return o ? Value::attr(name_of(o->direction)) : Value::invalid();
  }
  if (op == "orbit_center") {
    const auto* o = obj(0).find_variant<Orbit>();
    return o ? Value(o->center) : Value::invalid();
  }
  if (op == "orbiters") {
    const auto center = args[0].as_object();
    ObjectSet s;
    for (const auto& o : g.objects) {
      const auto* orb = o.find_variant<Orbit>();
      if (orb && orb->center == center) s.ids.push_back(o.id);
    }
    return s;
  }
  if (op == "relate_existential" || op == "relate_universal") {
    const bool universal = op == "relate_universal";
    const auto r = *parse_enum<Relation>(params[0]);
    const auto anchor = args[0].as_object();
    ObjectSet s;
    for (const auto& o : g.objects) {
      if (o.id == anchor) continue;
      const auto& tr = t.track(r, o.id, anchor);
      if (universal ? tr.always : tr.ever) s.ids.push_back(o.id);
    }
    return s;
  }
  if (op == "union" || op == "intersect" || op == "except") {
    const auto& a = args[0].as_set().ids;
    const auto& b = args[1].as_set().ids;
    ObjectSet s;
    if (op == "union") {
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s.ids));
    } else if (op == "intersect") {
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s.ids));
    } else {
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s.ids));
    }
    return s;
  }
  if (op == "include") {
    const auto& ids = args[1].as_set().ids;
    return std::binary_search(ids.begin(), ids.end(), args[0].as_object());
  }
  if (op == "exist") return !args[0].as_set().ids.empty();
  if (op == "count") return static_cast<std::int64_t>(args[0].as_set().ids.size());
  if (op == "same_color" || op == "same_size" || op == "same_shape" || op == "same_material") {
    const auto self = args[0].as_object();
    const auto& a = g.object(self);
    const auto& a0 = t.at(0, self);
    ObjectSet s;
    for (const auto& o : g.objects) {
      if (o.id == self) continue;
      const auto& o0 = t.at(0, o.id);
      bool same = false;
      if (op == "same_color") same = o0.nominal_color == a0.nominal_color;
      if (op == "same_size") same = o0.nominal_size == a0.nominal_size;
      if (op == "same_shape") same = o.shape == a.shape;
      if (op == "same_material") same = o.material == a.material;
      if (same) s.ids.push_back(o.id);
    }
    return s;
  }
  if (op == "equal_color" || op == "equal_size" || op == "equal_shape" || op == "equal_material") {
    return args[0].as_attr() == args[1].as_attr();
  }
  if (op == "equal_color_existential" || op == "equal_color_universal") {
    const auto a = args[0].as_object();
    const auto b = args[1].as_object();
    return quantified(t, op == "equal_color_universal",
                      [&](int f) { return t.at(f, a).nominal_color == t.at(f, b).nominal_color; });
  }
  if (op == "equal_size_existential" || op == "equal_size_universal") {
    const auto a = args[0].as_object();
    const auto b = args[1].as_object();
    return quantified(t, op == "equal_size_universal", [&](int f) {
      return std::abs(t.at(f, a).scale - t.at(f, b).scale) <= kScaleTolerance;
    });
  }
  if (op == "equal_object") return args[0].as_object() == args[1].as_object();
  if (op == "equal_integer") return args[0].as_int() == args[1].as_int();
  if (op == "less_than") return args[0].as_int() < args[1].as_int();
  if (op == "greater_than") return args[0].as_int() > args[1].as_int();
  if (op == "logical_and") return args[0].as_bool() && args[1].as_bool();
  if (op == "logical_or") return args[0].as_bool() || args[1].as_bool();
  if (op == "logical_not") return !args[0].as_bool();
  if (op.starts_with("query_") && (ends_with(op, "_period") || ends_with(op, "_passes"))) {
    return per_cycle_query(op, args[0].as_object(), t);
  }
  throw ProgramError("unknown operator '" + std::string(op) + "'");
}

Value execute(const FunctionalProgram& program, const TemporalScene& scene) {
  if (!scene.has_relations()) throw ProgramError("scene has no relation tracks; use simulate()");
  std::vector<Value> values;
  values.reserve(program.nodes().size());
  std::vector<Value> args;
  for (const auto& n : program.nodes()) {
    args.clear();
    for (const int in : n.inputs) args.push_back(values[static_cast<std::size_t>(in)]);
    values.push_back(apply_operator(n.op, args, n.params, scene));
  }
  return values.back();
}

}  // namespace cyclebench
