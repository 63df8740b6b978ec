#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cyclebench/model.hpp"
#include "cyclebench/program.hpp"
#include "cyclebench/rng.hpp"
#include "cyclebench/value.hpp"

namespace cyclebench {

enum class AnswerKind : std::uint8_t { yes_no, attribute, integer };
enum class Quantifier : std::uint8_t { none, existential, universal };

std::string_view name_of(AnswerKind k);
std::string_view name_of(Quantifier q);
template <> std::optional<AnswerKind> parse_enum<AnswerKind>(std::string_view);
template <> std::optional<Quantifier> parse_enum<Quantifier>(std::string_view);

// Static description of one object ("the small red rubber cube"). Absent
// fields are not mentioned.
struct Referent {
  std::optional<SizeClass> size;
  std::optional<Color> color;
  std::optional<Material> material;
  std::optional<Shape> shape;

  std::string phrase() const;  // without article
  // Appends scene -> filters -> unique and returns the unique node.
  int emit(ProgramBuilder& b) const;
  nlohmann::json to_json() const;
  static Referent from_json(const nlohmann::json& j);
  friend bool operator==(const Referent&, const Referent&) = default;
};

struct QuestionTemplate {
  std::string_view id;
  AnswerKind answer_kind;
  Quantifier quantifier;
  // Placeholders: <Z> size, <C> color, <M> material, <S> shape, <R> relation,
  // <Q> quantifier word, <A> attribute name, <V> attribute value, <Y> cycle.
  std::string_view pattern;
};

const std::vector<QuestionTemplate>& question_templates();
const QuestionTemplate* find_template(std::string_view id);
// Whether the scene has any object the template could talk about.
bool template_applies(const QuestionTemplate& tmpl, const SceneGraph& graph);

struct QARecord {
  std::string question_id;
  std::string scene_id;
  Tier tier = Tier::L1;
  std::string template_id;
  Quantifier quantifier = Quantifier::none;
  std::string question;
  Value answer;
  AnswerKind answer_kind = AnswerKind::yes_no;
  FunctionalProgram program;
  // Placeholder values chosen at instantiation; enough to re-derive the
  // answer without the program.
  nlohmann::json bindings;

  friend bool operator==(const QARecord&, const QARecord&) = default;
};

nlohmann::json to_json(const QARecord& r);
QARecord qa_from_json(const nlohmann::json& j);
std::string to_jsonl(const std::vector<QARecord>& records);
std::vector<QARecord> read_jsonl(std::string_view text);

struct InstantiateOptions {
  int attempts = 50;
  // Yes/no templates only: accept only bindings with this answer.
  std::optional<bool> desired;
  // Semantic keys already used in this scene; matching bindings are rejected.
  const std::set<std::string>* seen = nullptr;
};

struct Instance {
  QARecord record;
  std::string key;  // semantic identity of the bindings
};

// Samples bindings until the program yields a non-Invalid answer (and the
// desired one, if set). nullopt when attempts run out. question_id is left
// empty.
std::optional<Instance> instantiate(const QuestionTemplate& tmpl, const TemporalScene& scene,
                                    CounterRng& rng, const InstantiateOptions& options = {});

struct QuestionConfig {
  int yes_no_per_template = 20;
  int other_per_template = 1;
  int attempts = 50;
};

// Questions for one scene, ids "<scene_id>_q<nnn>". Yes/no candidates
// alternate the desired answer so later balancing has both sides.
std::vector<QARecord> generate_scene_questions(const TemporalScene& scene, CounterRng& rng,
                                               const QuestionConfig& config = {});

struct BalanceResult {
  std::vector<QARecord> records;
  std::vector<std::string> log;
};

// Per (template, tier) yes/no group, drops random majority records until
// |P(yes) - 0.5| <= tolerance. Groups without a minority answer are kept
// as they are and logged. Other records pass through; order is preserved.
BalanceResult balance_yes_no(std::vector<QARecord> records, CounterRng& rng, double tolerance = 0.02);

// Re-derives the answer by per-frame enumeration over the scene, driven by
// the template id and bindings only.
Value brute_force_answer(const QARecord& record, const TemporalScene& scene);

// Answer parsed from its JSON form for the given kind.
Value answer_from_json(const nlohmann::json& j, AnswerKind kind);
nlohmann::json answer_to_json(const Value& v);

}  // namespace cyclebench
