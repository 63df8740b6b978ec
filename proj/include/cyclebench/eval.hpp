#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclebench/model.hpp"
#include "cyclebench/questions.hpp"

namespace cyclebench {

class ScoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lowercase, trim, drop trailing punctuation, map synonyms to canonical
// words and number words to digits.
std::string normalize_answer(std::string_view text);
// Integer in digit or word form ("32", "thirty-two", "one hundred sixty").
std::optional<std::int64_t> parse_number(std::string_view text);

// A judged model answer; no value means the answer was indefinite.
struct JudgedAnswer {
  std::string question_id;
  std::optional<std::string> value;
  friend bool operator==(const JudgedAnswer&, const JudgedAnswer&) = default;
};

nlohmann::json to_json(const JudgedAnswer& a);
JudgedAnswer judged_from_json(const nlohmann::json& j);
std::vector<JudgedAnswer> read_judged_jsonl(std::string_view text);

// Whether a judged value matches the ground truth after normalization.
bool answer_matches(const std::string& judged, const Value& truth, AnswerKind kind);

struct VqaCell {
  int n = 0;
  int n_correct = 0;
  int n_indefinite = 0;
  double abs_error_sum = 0.0;
  int n_numeric = 0;  // numeric answers that entered the MAE

  double accuracy() const { return n ? static_cast<double>(n_correct) / n : 0.0; }
  std::optional<double> mae() const {
    if (n_numeric == 0) return std::nullopt;
    return abs_error_sum / n_numeric;
  }
  void add(const VqaCell& o);
};

struct VqaReport {
  // tier -> template -> cell; "all" aggregates across tiers / templates.
  std::map<std::string, std::map<std::string, VqaCell>> cells;
  nlohmann::json to_json() const;
};

// Accuracy over the judged answers with Indefinite counted wrong; MAE over
// integer-answer templates excluding Indefinite. Throws ScoreError on an
// empty judged set or ids missing from the ground truth.
VqaReport score_vqa(const std::vector<QARecord>& gt, const std::vector<JudgedAnswer>& judged);

// One object as described by a caption; unset attributes were not stated.
struct CaptionObject {
  std::optional<Shape> shape;
  std::optional<Color> color;
  std::optional<SizeClass> size;
  std::optional<Material> material;
  std::vector<CycleType> cycles;
  friend bool operator==(const CaptionObject&, const CaptionObject&) = default;
};

nlohmann::json to_json(const CaptionObject& o);
CaptionObject caption_object_from_json(const nlohmann::json& j);

struct SceneCaption {
  std::string scene_id;
  std::vector<CaptionObject> objects;
};
std::vector<SceneCaption> read_captions_jsonl(std::string_view text);

// Every stated attribute equals the object's frame-0 value.
bool admissible(const CaptionObject& pred, const ObjectSpec& gt);
// Number of shared cycle types, counted with multiplicity.
int cycle_overlap(const std::vector<CycleType>& pred, const std::vector<CycleType>& gt);

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (pred index, gt index), sorted by pred index
};

// Maximum-cardinality matching over admissible edges; among those, one with
// the most shared cycles, so totals do not depend on input order.
Matching match_objects(const std::vector<CaptionObject>& pred, const SceneGraph& gt);

struct PRF {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};
// Zero denominators give 1 when both sides are empty and 0 otherwise.
PRF prf(int tp, int fp, int fn);

struct CaptionCounts {
  int obj_tp = 0;
  int obj_fp = 0;
  int obj_fn = 0;
  int cyc_tp = 0;
  int cyc_fp = 0;
  int cyc_fn = 0;
  void add(const CaptionCounts& o);
  PRF object() const { return prf(obj_tp, obj_fp, obj_fn); }
  PRF cycle() const { return prf(cyc_tp, cyc_fp, cyc_fn); }
};

CaptionCounts score_captioning(const Matching& matching, const std::vector<CaptionObject>& pred,
                               const SceneGraph& gt);

struct CaptionReport {
  std::map<std::string, CaptionCounts> per_tier;  // plus "all"
  nlohmann::json to_json() const;
};

// Micro-averaged per tier. Throws ScoreError for captions of unknown scenes.
CaptionReport score_captions(const std::vector<SceneCaption>& captions,
                             const std::map<std::string, SceneGraph>& scenes);

}  // namespace cyclebench
