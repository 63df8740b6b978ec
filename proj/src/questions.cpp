#include "cyclebench/questions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace cyclebench {

namespace {

constexpr std::array<std::string_view, 3> kAnswerKindNames{"yes_no", "attribute", "integer"};
constexpr std::array<std::string_view, 3> kQuantifierNames{"none", "existential", "universal"};

std::string s(std::string_view v) { return std::string(v); }

std::string_view quantifier_word(Quantifier q) {
  return q == Quantifier::universal ? "always" : "ever";
}

std::string_view relation_phrase(Relation r) {
  switch (r) {
    case Relation::left: return "left of";
    case Relation::right: return "right of";
    case Relation::front: return "in front of";
    case Relation::behind: return "behind";
  }
  return "";
}

std::string_view cycle_noun(CycleType c) {
  switch (c) {
    case CycleType::linear: return "back-and-forth motion";
    case CycleType::orbit: return "orbit";
    case CycleType::size: return "size change";
    case CycleType::color: return "color change";
    case CycleType::orientation: return "rotation";
  }
  return "";
}

std::string_view counting_phrase(std::optional<CycleType> c) {
  if (!c) return "are cyclic";
  switch (*c) {
    case CycleType::linear: return "move back and forth";
    case CycleType::orbit: return "orbit around another object";
    case CycleType::size: return "periodically change their size";
    case CycleType::color: return "periodically change their color";
    case CycleType::orientation: return "periodically rotate";
  }
  return "";
}

// Fills "<X>" placeholders from per-letter queues in order of appearance;
// empty values are dropped, an empty <S> reads "object".
class Realizer {
 public:
  void push(char key, std::string value) { values_[key].push_back(std::move(value)); }
  void push(const Referent& r) {
    push('Z', r.size ? s(name_of(*r.size)) : "");
    push('C', r.color ? s(name_of(*r.color)) : "");
    push('M', r.material ? s(name_of(*r.material)) : "");
    push('S', r.shape ? s(name_of(*r.shape)) : "object");
  }

  std::string realize(std::string_view pattern) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (pattern[i] == '<' && i + 2 < pattern.size() && pattern[i + 2] == '>') {
        auto& q = values_[pattern[i + 1]];
        if (q.empty()) throw std::logic_error("no value for placeholder in " + std::string(pattern));
        out += q.front();
        q.pop_front();
        i += 2;
      } else {
        out += pattern[i];
      }
    }
    // Collapse the gaps left by omitted attributes.
    std::string tidy;
    for (const char ch : out) {
      if (ch == ' ' && (tidy.empty() || tidy.back() == ' ')) continue;
      tidy += ch;
    }
    while (!tidy.empty() && tidy.back() == ' ') tidy.pop_back();
    std::string final_text;
    for (std::size_t i = 0; i < tidy.size(); ++i) {
      if (tidy[i] == ' ' && i + 1 < tidy.size() && tidy[i + 1] == '?') continue;
      final_text += tidy[i];
    }
    return final_text;
  }

 private:
  std::map<char, std::deque<std::string>> values_;
};

const std::vector<QuestionTemplate> kTemplates = {
    {"descriptive_existential_attributes", AnswerKind::yes_no, Quantifier::existential,
     "Is the <Z> <C> <M> <S> <Q> <V>?"},
    {"descriptive_existential_compare", AnswerKind::yes_no, Quantifier::existential,
     "Is the <Z> <C> <M> <S> <Q> the same <A> as the <Z> <C> <M> <S>?"},
    {"descriptive_existential_relate", AnswerKind::yes_no, Quantifier::existential,
     "Is the <Z> <C> <M> <S> <Q> <R> the <Z> <C> <M> <S>?"},
    {"descriptive_universal_attributes", AnswerKind::yes_no, Quantifier::universal,
     "Is the <Z> <C> <M> <S> <Q> <V>?"},
    {"descriptive_universal_compare", AnswerKind::yes_no, Quantifier::universal,
     "Is the <Z> <C> <M> <S> <Q> the same <A> as the <Z> <C> <M> <S>?"},
    {"descriptive_universal_relate", AnswerKind::yes_no, Quantifier::universal,
     "Is the <Z> <C> <M> <S> <Q> <R> the <Z> <C> <M> <S>?"},
    {"cycle_representative_orbit", AnswerKind::attribute, Quantifier::none,
     "What is the <A> of the object that the <Z> <C> <M> <S> orbits around?"},
    {"cycle_representative_clockwise", AnswerKind::attribute, Quantifier::none,
     "Does the <Z> <C> <M> <S> orbit clockwise or counterclockwise?"},
    {"cycle_representative_transition", AnswerKind::attribute, Quantifier::none,
     "What <A> does the <Z> <C> <M> <S> <Y>?"},
    {"numeric_counting", AnswerKind::integer, Quantifier::none, "How many objects <Y>?"},
    {"numeric_periodicity", AnswerKind::integer, Quantifier::none,
     "How many frames does one <Y> cycle of the <Z> <C> <M> <S> take?"},
    {"numeric_occurrence", AnswerKind::integer, Quantifier::none,
     "How many times does the <Z> <C> <M> <S> complete its <Y> cycle?"},
};

bool has_cycle(const ObjectSpec& o, CycleType c) { return o.find(c) != nullptr; }

std::vector<ObjectId> objects_where(const SceneGraph& g, auto pred) {
  std::vector<ObjectId> out;
  for (const auto& o : g.objects) {
    if (pred(o)) out.push_back(o.id);
  }
  return out;
}

ObjectId pick_id(CounterRng& rng, const std::vector<ObjectId>& ids) {
  return rng.pick(std::span<const ObjectId>(ids));
}

enum class Attribute { color, size, shape, material };

bool size_is(NominalSize n, SizeClass s) { return static_cast<int>(n) == static_cast<int>(s); }

// Does `obj` satisfy every stated attribute, reading color and size under
// the given quantifier?
bool referent_matches(const Referent& r, ObjectId id, const TemporalScene& t, bool universal) {
  const auto& o = t.graph.object(id);
  if (r.shape && o.shape != *r.shape) return false;
  if (r.material && o.material != *r.material) return false;
  const auto check = [&](auto pred) {
    for (int f = 0; f < t.frame_count(); ++f) {
      const bool hit = pred(t.at(f, id));
      if (universal && !hit) return false;
      if (!universal && hit) return true;
    }
    return universal;
  };
  if (r.color && !check([&](const ObjectState& st) { return st.nominal_color == *r.color; })) return false;
  if (r.size && !check([&](const ObjectState& st) { return size_is(st.nominal_size, *r.size); })) return false;
  return true;
}

bool resolves_uniquely(const Referent& r, ObjectId id, const TemporalScene& t) {
  for (const bool universal : {false, true}) {
    for (const auto& o : t.graph.objects) {
      if (referent_matches(r, o.id, t, universal) != (o.id == id)) return false;
    }
  }
  return true;
}

// Shortest random description of `id` that picks it out under both
// quantifiers. Dynamic attributes and `excluded` are never stated.
std::optional<Referent> describe(ObjectId id, std::optional<Attribute> excluded, const TemporalScene& t,
                                 CounterRng& rng) {
  const auto& o = t.graph.object(id);
  std::vector<Attribute> pool;
  for (const auto a : {Attribute::shape, Attribute::material, Attribute::color, Attribute::size}) {
    if (excluded && a == *excluded) continue;
    if (a == Attribute::color && has_cycle(o, CycleType::color)) continue;
    if (a == Attribute::size && has_cycle(o, CycleType::size)) continue;
    pool.push_back(a);
  }
  rng.shuffle(std::span<Attribute>(pool));
  Referent r;
  for (const auto a : pool) {
    switch (a) {
      case Attribute::shape: r.shape = o.shape; break;
      case Attribute::material: r.material = o.material; break;
      case Attribute::color: r.color = o.color0; break;
      case Attribute::size: r.size = o.size0; break;
    }
    if (resolves_uniquely(r, id, t)) return r;
  }
  return std::nullopt;
}

constexpr std::array kAllAttributes{Attribute::color, Attribute::size, Attribute::shape,
                                   Attribute::material};

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::color: return "color";
    case Attribute::size: return "size";
    case Attribute::shape: return "shape";
    case Attribute::material: return "material";
  }
  return "";
}

struct Proposal {
  FunctionalProgram program;
  nlohmann::json bindings;
  std::string text;
  std::string key;
};

std::string id_key(ObjectId id) { return std::to_string(id.value); }

std::optional<Proposal> propose(const QuestionTemplate& tmpl, const TemporalScene& t, CounterRng& rng) {
  const auto& g = t.graph;
  const std::string id(tmpl.id);
  const std::string q(tmpl.quantifier == Quantifier::universal ? "universal" : "existential");
  ProgramBuilder b;
  Realizer text;
  Proposal p;
  const auto all = objects_where(g, [](const ObjectSpec&) { return true; });

  if (id.ends_with("_attributes")) {
    const auto o = pick_id(rng, all);
    const auto attr = rng.pick(std::span<const Attribute>(kAllAttributes));
    const auto ref = describe(o, attr, t, rng);
    if (!ref) return std::nullopt;
    const auto& spec = g.object(o);
    std::string value;
    std::string shown;
    switch (attr) {
      case Attribute::color:
        // Half the time draw from colors the object actually shows.
        if (rng.coin()) {
          const auto f = static_cast<int>(rng.below(static_cast<std::uint64_t>(t.frame_count())));
          value = s(name_of(t.at(f, o).nominal_color));
        } else {
          value = s(name_of(rng.pick(std::span<const Color>(kColors))));
        }
        shown = value;
        break;
      case Attribute::size:
        value = s(name_of(rng.coin() ? spec.size0 : rng.pick(std::span<const SizeClass>(kSizes))));
        shown = value;
        break;
      case Attribute::shape:
        value = s(name_of(rng.coin() ? spec.shape : rng.pick(std::span<const Shape>(kShapes))));
        shown = "a " + value;
        break;
      case Attribute::material:
        value = s(name_of(rng.pick(std::span<const Material>(kMaterials))));
        shown = "made of " + value;
        break;
    }
    const int n = ref->emit(b);
    const int sc = b.add("scene");
    const bool dynamic = attr == Attribute::color || attr == Attribute::size;
    const int f = b.add("filter_" + s(attribute_name(attr)) + (dynamic ? "_" + q : ""), {sc}, {value});
    b.add("include", {n, f});
    text.push(*ref);
    text.push('Q', s(quantifier_word(tmpl.quantifier)));
    text.push('V', shown);
    p.bindings = {{"target", ref->to_json()}, {"attribute", attribute_name(attr)}, {"value", value}};
    p.key = id_key(o) + "|" + s(attribute_name(attr)) + "|" + value;
  } else if (id.ends_with("_compare")) {
    if (all.size() < 2) return std::nullopt;
    const auto o1 = pick_id(rng, all);
    const auto o2 = pick_id(rng, all);
    if (o1 == o2) return std::nullopt;
    const auto attr = rng.pick(std::span<const Attribute>(kAllAttributes));
    const auto r1 = describe(o1, attr, t, rng);
    const auto r2 = describe(o2, attr, t, rng);
    if (!r1 || !r2) return std::nullopt;
    const int n1 = r1->emit(b);
    const int n2 = r2->emit(b);
    const auto name = s(attribute_name(attr));
    if (attr == Attribute::color || attr == Attribute::size) {
      b.add("equal_" + name + "_" + q, {n1, n2});
    } else {
      const int a1 = b.add("query_" + name, {n1});
      const int a2 = b.add("query_" + name, {n2});
      b.add("equal_" + name, {a1, a2});
    }
    text.push(*r1);
    text.push('Q', s(quantifier_word(tmpl.quantifier)));
    text.push('A', name);
    text.push(*r2);
    p.bindings = {{"target", r1->to_json()}, {"other", r2->to_json()}, {"attribute", name}};
    p.key = id_key(o1) + "|" + id_key(o2) + "|" + name;
  } else if (id.ends_with("_relate")) {
    if (all.size() < 2) return std::nullopt;
    const auto o1 = pick_id(rng, all);
    const auto o2 = pick_id(rng, all);
    if (o1 == o2) return std::nullopt;
    const auto rel = rng.pick(std::span<const Relation>(kRelations));
    const auto r1 = describe(o1, std::nullopt, t, rng);
    const auto r2 = describe(o2, std::nullopt, t, rng);
    if (!r1 || !r2) return std::nullopt;
    const int n2 = r2->emit(b);
    const int related = b.add("relate_" + q, {n2}, {s(name_of(rel))});
    const int n1 = r1->emit(b);
    b.add("include", {n1, related});
    text.push(*r1);
    text.push('Q', s(quantifier_word(tmpl.quantifier)));
    text.push('R', s(relation_phrase(rel)));
    text.push(*r2);
    p.bindings = {{"target", r1->to_json()}, {"other", r2->to_json()}, {"relation", name_of(rel)}};
    p.key = id_key(o1) + "|" + id_key(o2) + "|" + s(name_of(rel));
  } else if (id == "cycle_representative_orbit" || id == "cycle_representative_clockwise") {
    const auto orbiters = objects_where(g, [](const ObjectSpec& o) { return has_cycle(o, CycleType::orbit); });
    if (orbiters.empty()) return std::nullopt;
    const auto o = pick_id(rng, orbiters);
    const auto ref = describe(o, std::nullopt, t, rng);
    if (!ref) return std::nullopt;
    const int n = ref->emit(b);
    text.push(*ref);
    p.bindings = {{"target", ref->to_json()}};
    p.key = id_key(o);
    if (id == "cycle_representative_orbit") {
      const auto attr = rng.pick(std::span<const Attribute>(kAllAttributes));
      const int c = b.add("orbit_center", {n});
      b.add("query_" + s(attribute_name(attr)), {c});
      text.push('A', s(attribute_name(attr)));
      p.bindings["attribute"] = attribute_name(attr);
      p.key += "|" + s(attribute_name(attr));
    } else {
      b.add("query_orbit_direction", {n});
    }
  } else if (id == "cycle_representative_transition") {
    const auto changers = objects_where(g, [](const ObjectSpec& o) {
      return has_cycle(o, CycleType::color) || has_cycle(o, CycleType::size);
    });
    if (changers.empty()) return std::nullopt;
    const auto o = pick_id(rng, changers);
    const auto& spec = g.object(o);
    std::vector<Attribute> options;
    if (has_cycle(spec, CycleType::color)) options.push_back(Attribute::color);
    if (has_cycle(spec, CycleType::size)) options.push_back(Attribute::size);
    const auto attr = rng.pick(std::span<const Attribute>(options));
    const bool final_phase = rng.coin();
    const auto ref = describe(o, attr, t, rng);
    if (!ref) return std::nullopt;
    const int n = ref->emit(b);
    b.add("query_" + s(attribute_name(attr)) + (final_phase ? "_final" : "_initial"), {n});
    text.push('A', s(attribute_name(attr)));
    text.push(*ref);
    text.push('Y', final_phase ? "transition into" : "have at the start of the video");
    p.bindings = {{"target", ref->to_json()},
                  {"attribute", attribute_name(attr)},
                  {"phase", final_phase ? "final" : "initial"}};
    p.key = id_key(o) + "|" + s(attribute_name(attr)) + "|" + (final_phase ? "final" : "initial");
  } else if (id == "numeric_counting") {
    std::optional<CycleType> cycle;
    const auto k = rng.below(kCycleTypes.size() + 1);
    if (k < kCycleTypes.size()) cycle = kCycleTypes[k];
    const int sc = b.add("scene");
    int f = 0;
    if (!cycle) {
      f = b.add("filter_cyclic", {sc});
    } else if (*cycle == CycleType::orbit) {
      f = b.add("filter_orbit", {sc});
    } else {
      f = b.add("filter_cycle", {sc}, {s(name_of(*cycle))});
    }
    b.add("count", {f});
    text.push('Y', s(counting_phrase(cycle)));
    p.bindings = {{"cycle", cycle ? s(name_of(*cycle)) : "any"}};
    p.key = cycle ? s(name_of(*cycle)) : "any";
  } else if (id == "numeric_periodicity" || id == "numeric_occurrence") {
    const auto cyclic = objects_where(g, [](const ObjectSpec& o) { return o.is_cyclic(); });
    if (cyclic.empty()) return std::nullopt;
    const auto o = pick_id(rng, cyclic);
    const auto& spec = g.object(o);
    const auto cycle = spec.cycles[rng.below(spec.cycles.size())].type();
    const auto ref = describe(o, std::nullopt, t, rng);
    if (!ref) return std::nullopt;
    const int n = ref->emit(b);
    b.add("query_" + s(name_of(cycle)) + (id == "numeric_periodicity" ? "_period" : "_passes"), {n});
    text.push('Y', s(cycle_noun(cycle)));
    text.push(*ref);
    p.bindings = {{"target", ref->to_json()}, {"cycle", name_of(cycle)}};
    p.key = id_key(o) + "|" + s(name_of(cycle));
  } else {
    throw std::logic_error("unhandled template " + id);
  }
  p.program = b.build();
  p.text = text.realize(tmpl.pattern);
  p.key = id + "|" + p.key;
  return p;
}

}  // namespace

std::string_view name_of(AnswerKind k) { return kAnswerKindNames.at(static_cast<std::size_t>(k)); }
std::string_view name_of(Quantifier q) { return kQuantifierNames.at(static_cast<std::size_t>(q)); }

template <>
std::optional<AnswerKind> parse_enum<AnswerKind>(std::string_view text) {
  for (std::size_t i = 0; i < kAnswerKindNames.size(); ++i) {
    if (kAnswerKindNames[i] == text) return static_cast<AnswerKind>(i);
  }
  return std::nullopt;
}

template <>
std::optional<Quantifier> parse_enum<Quantifier>(std::string_view text) {
  for (std::size_t i = 0; i < kQuantifierNames.size(); ++i) {
    if (kQuantifierNames[i] == text) return static_cast<Quantifier>(i);
  }
  return std::nullopt;
}

std::string Referent::phrase() const {
  Realizer r;
  r.push(*this);
  return r.realize("<Z> <C> <M> <S>");
}

int Referent::emit(ProgramBuilder& b) const {
  int n = b.add("scene");
  if (shape) n = b.add("filter_shape", {n}, {s(name_of(*shape))});
  if (material) n = b.add("filter_material", {n}, {s(name_of(*material))});
  if (color) n = b.add("filter_color_universal", {n}, {s(name_of(*color))});
  if (size) n = b.add("filter_size_universal", {n}, {s(name_of(*size))});
  return b.add("unique", {n});
}

nlohmann::json Referent::to_json() const {
  auto j = nlohmann::json::object();
  if (size) j["size"] = name_of(*size);
  if (color) j["color"] = name_of(*color);
  if (material) j["material"] = name_of(*material);
  if (shape) j["shape"] = name_of(*shape);
  return j;
}

Referent Referent::from_json(const nlohmann::json& j) {
  Referent r;
  const auto field = [&]<typename E>(const char* key, std::optional<E>& out) {
    if (!j.contains(key)) return;
    out = parse_enum<E>(j.at(key).get<std::string>());
    if (!out) throw std::invalid_argument(std::string("bad referent ") + key);
  };
  field.operator()<SizeClass>("size", r.size);
  field.operator()<Color>("color", r.color);
  field.operator()<Material>("material", r.material);
  field.operator()<Shape>("shape", r.shape);
  return r;
}

const std::vector<QuestionTemplate>& question_templates() { return kTemplates; }

const QuestionTemplate* find_template(std::string_view id) {
  for (const auto& t : kTemplates) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

bool template_applies(const QuestionTemplate& tmpl, const SceneGraph& g) {
  const std::string_view id = tmpl.id;
  const auto any = [&](auto pred) { return std::any_of(g.objects.begin(), g.objects.end(), pred); };
  if (id.ends_with("_attributes")) return !g.objects.empty();
  if (id.ends_with("_compare") || id.ends_with("_relate")) return g.objects.size() >= 2;
  if (id == "cycle_representative_orbit" || id == "cycle_representative_clockwise") {
    return any([](const ObjectSpec& o) { return has_cycle(o, CycleType::orbit); });
  }
  if (id == "cycle_representative_transition") {
    return any([](const ObjectSpec& o) {
      return has_cycle(o, CycleType::color) || has_cycle(o, CycleType::size);
    });
  }
  if (id == "numeric_counting") return true;
  return any([](const ObjectSpec& o) { return o.is_cyclic(); });
}

nlohmann::json answer_to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::boolean: return v.as_bool() ? "yes" : "no";
    case ValueKind::attribute: return v.as_attr();
    case ValueKind::integer: return v.as_int();
    default: throw std::invalid_argument("answer must be yes/no, an attribute or an integer");
  }
}

Value answer_from_json(const nlohmann::json& j, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::yes_no: {
      const auto text = j.get<std::string>();
      if (text != "yes" && text != "no") throw std::invalid_argument("yes/no answer expected");
      return Value(text == "yes");
    }
    case AnswerKind::attribute: return Value::attr(j.get<std::string>());
    case AnswerKind::integer: return Value(j.get<std::int64_t>());
  }
  return Value::invalid();
}

nlohmann::json to_json(const QARecord& r) {
  return {{"question_id", r.question_id},
          {"scene_id", r.scene_id},
          {"tier", name_of(r.tier)},
          {"template_id", r.template_id},
          {"quantifier", name_of(r.quantifier)},
          {"question", r.question},
          {"answer", answer_to_json(r.answer)},
          {"answer_kind", name_of(r.answer_kind)},
          {"program", r.program.to_json()},
          {"bindings", r.bindings}};
}

QARecord qa_from_json(const nlohmann::json& j) {
  QARecord r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.scene_id = j.at("scene_id").get<std::string>();
    const auto tier = parse_enum<Tier>(j.at("tier").get<std::string>());
    const auto quantifier = parse_enum<Quantifier>(j.at("quantifier").get<std::string>());
    const auto kind = parse_enum<AnswerKind>(j.at("answer_kind").get<std::string>());
    if (!tier || !quantifier || !kind) throw std::invalid_argument("bad enum in question " + r.question_id);
    r.tier = *tier;
    r.quantifier = *quantifier;
    r.answer_kind = *kind;
    r.template_id = j.at("template_id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.answer = answer_from_json(j.at("answer"), r.answer_kind);
    r.program = FunctionalProgram::from_json(j.at("program"));
    r.bindings = j.value("bindings", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed question record: ") + e.what());
  }
  return r;
}

std::string to_jsonl(const std::vector<QARecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<QARecord> read_jsonl(std::string_view text) {
  std::vector<QARecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(qa_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::optional<Instance> instantiate(const QuestionTemplate& tmpl, const TemporalScene& scene,
                                    CounterRng& rng, const InstantiateOptions& options) {
  if (!template_applies(tmpl, scene.graph)) return std::nullopt;
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    auto p = propose(tmpl, scene, rng);
    if (!p) continue;
    if (options.seen && options.seen->contains(p->key)) continue;
    const Value answer = execute(p->program, scene);
    if (answer.is_invalid()) continue;
    if (options.desired && tmpl.answer_kind == AnswerKind::yes_no && answer.as_bool() != *options.desired) {
      continue;
    }
    Instance out;
    out.key = std::move(p->key);
    auto& r = out.record;
    r.scene_id = scene.graph.scene_id;
    r.tier = scene.graph.tier;
    r.template_id = s(tmpl.id);
    r.quantifier = tmpl.quantifier;
    r.question = std::move(p->text);
    r.answer = answer;
    r.answer_kind = tmpl.answer_kind;
    r.program = std::move(p->program);
    r.bindings = std::move(p->bindings);
    return out;
  }
  return std::nullopt;
}

std::vector<QARecord> generate_scene_questions(const TemporalScene& scene, CounterRng& rng,
                                               const QuestionConfig& config) {
  std::vector<QARecord> out;
  for (std::size_t ti = 0; ti < kTemplates.size(); ++ti) {
    const auto& tmpl = kTemplates[ti];
    if (!template_applies(tmpl, scene.graph)) continue;
    auto stream = rng.split(ti);
    const bool yes_no = tmpl.answer_kind == AnswerKind::yes_no;
    const int quota = yes_no ? config.yes_no_per_template : config.other_per_template;
    std::set<std::string> seen;
    for (int k = 0; k < quota; ++k) {
      InstantiateOptions opt;
      opt.attempts = config.attempts;
      opt.seen = &seen;
      if (yes_no) opt.desired = (k % 2 == 0);
      auto inst = instantiate(tmpl, scene, stream, opt);
      if (!inst) continue;
      seen.insert(inst->key);
      out.push_back(std::move(inst->record));
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_q%03zu", i);
    out[i].question_id = scene.graph.scene_id + buf;
  }
  return out;
}

BalanceResult balance_yes_no(std::vector<QARecord> records, CounterRng& rng, double tolerance) {
  std::map<std::pair<std::string, Tier>, std::array<std::vector<std::size_t>, 2>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.answer_kind != AnswerKind::yes_no) continue;
    groups[{r.template_id, r.tier}][r.answer.as_bool() ? 1 : 0].push_back(i);
  }
  BalanceResult result;
  std::vector<bool> drop(records.size(), false);
  for (auto& [key, sides] : groups) {
    const auto yes = sides[1].size();
    const auto no = sides[0].size();
    const double p = static_cast<double>(yes) / static_cast<double>(yes + no);
    const auto label = key.first + " " + s(name_of(key.second));
    if (std::abs(p - 0.5) <= tolerance) continue;
    if (yes == 0 || no == 0) {
      result.log.push_back(label + ": only " + (yes ? "yes" : "no") + " answers (" +
                           std::to_string(yes + no) + "), kept unbalanced");
      continue;
    }
    auto& major = yes > no ? sides[1] : sides[0];
    const auto minor = std::min(yes, no);
    auto keep = static_cast<std::size_t>(std::floor(static_cast<double>(minor) * (0.5 + tolerance) /
                                                    (0.5 - tolerance)));
    while (keep > minor &&
           static_cast<double>(keep) / static_cast<double>(keep + minor) > 0.5 + tolerance) {
      --keep;
    }
    rng.shuffle(std::span<std::size_t>(major));
    for (std::size_t i = keep; i < major.size(); ++i) drop[major[i]] = true;
    result.log.push_back(label + ": yes/no " + std::to_string(yes) + "/" + std::to_string(no) + " -> " +
                         std::to_string(yes > no ? keep : yes) + "/" + std::to_string(yes > no ? no : keep));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!drop[i]) result.records.push_back(std::move(records[i]));
  }
  return result;
}

}  // namespace cyclebench
