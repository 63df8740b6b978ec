#include "cyclebench/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace cyclebench {

namespace {

const std::unordered_map<std::string, std::string>& synonyms() {
  static const std::unordered_map<std::string, std::string> table = {
      {"counter-clockwise", "counterclockwise"},
      {"counter clockwise", "counterclockwise"},
      {"anticlockwise", "counterclockwise"},
      {"anti-clockwise", "counterclockwise"},
      {"anti clockwise", "counterclockwise"},
      {"clock-wise", "clockwise"},
      {"grey", "gray"},
      {"true", "yes"},
      {"false", "no"},
      {"metallic", "metal"},
      {"shiny", "metal"},
      {"matte", "rubber"},
      {"big", "large"},
      {"tiny", "small"},
      {"ball", "sphere"},
      {"block", "cube"},
  };
  return table;
}

std::string lower_trim(std::string_view text) {
  std::string out;
  for (const char c : text) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto first = out.find_first_not_of(" \t\r\n\"'");
  if (first == std::string::npos) return "";
  const auto last = out.find_last_not_of(" \t\r\n\"'.!?,;:");
  if (last == std::string::npos || last < first) return "";
  return out.substr(first, last - first + 1);
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (c == ' ' || c == '-') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<int> small_number(std::string_view w) {
  static const std::unordered_map<std::string_view, int> table = {
      {"zero", 0},      {"one", 1},       {"two", 2},       {"three", 3},    {"four", 4},
      {"five", 5},      {"six", 6},       {"seven", 7},     {"eight", 8},    {"nine", 9},
      {"ten", 10},      {"eleven", 11},   {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14},
      {"fifteen", 15},  {"sixteen", 16},  {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20},   {"thirty", 30},   {"forty", 40},    {"fifty", 50},   {"sixty", 60},
      {"seventy", 70},  {"eighty", 80},   {"ninety", 90},   {"once", 1},     {"twice", 2},
      {"thrice", 3}};
  const auto it = table.find(w);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

void add_cell(std::map<std::string, std::map<std::string, VqaCell>>& cells, const std::string& tier,
              const std::string& tmpl, const VqaCell& c) {
  cells[tier][tmpl].add(c);
  cells[tier]["all"].add(c);
  cells["all"][tmpl].add(c);
  cells["all"]["all"].add(c);
}

nlohmann::json prf_json(const PRF& m) { return {{"p", m.p}, {"r", m.r}, {"f1", m.f1}}; }

// Maximum-weight assignment on a rows x cols weight matrix (rows <= cols).
// Returns the column of each row.
std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& w) {
  const int n = static_cast<int>(w.size());
  const int m = n ? static_cast<int>(w[0].size()) : 0;
  if (n == 0) return {};
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(m + 1, 0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const long long cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) col[p[j] - 1] = j - 1;
  }
  return col;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  std::string t = lower_trim(text);
  for (const auto* article : {"the ", "a ", "an "}) {
    if (t.starts_with(article)) {
      t = t.substr(std::string_view(article).size());
      break;
    }
  }
  if (const auto it = synonyms().find(t); it != synonyms().end()) return it->second;
  if (const auto n = parse_number(t)) return std::to_string(*n);
  return t;
}

std::optional<std::int64_t> parse_number(std::string_view text) {
  const std::string t = lower_trim(text);
  if (t.empty()) return std::nullopt;
  if (std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    if (t.size() > 12) return std::nullopt;
    return std::stoll(t);
  }
  std::int64_t total = 0;
  std::int64_t current = 0;
  bool any = false;
  for (const auto& w : words(t)) {
    if (w == "and") continue;
    if (w == "hundred") {
      current = (current == 0 ? 1 : current) * 100;
      any = true;
      continue;
    }
    if (w == "thousand") {
      total += (current == 0 ? 1 : current) * 1000;
      current = 0;
      any = true;
      continue;
    }
    const auto v = small_number(w);
    if (!v) return std::nullopt;
    current += *v;
    any = true;
  }
  if (!any) return std::nullopt;
  return total + current;
}

nlohmann::json to_json(const JudgedAnswer& a) {
  return {{"question_id", a.question_id},
          {"answer", a.value ? nlohmann::json(*a.value) : nlohmann::json(nullptr)}};
}

JudgedAnswer judged_from_json(const nlohmann::json& j) {
  JudgedAnswer a;
  if (!j.is_object() || !j.contains("question_id")) throw ScoreError("judged answer without question_id");
  a.question_id = j.at("question_id").get<std::string>();
  const bool indefinite = j.value("indefinite", false);
  if (!indefinite && j.contains("answer") && !j.at("answer").is_null()) {
    const auto& v = j.at("answer");
    a.value = v.is_string() ? v.get<std::string>() : v.dump();
    if (normalize_answer(*a.value) == "indefinite") a.value.reset();
  }
  return a;
}

std::vector<JudgedAnswer> read_judged_jsonl(std::string_view text) {
  std::vector<JudgedAnswer> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(judged_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ScoreError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

bool answer_matches(const std::string& judged, const Value& truth, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::integer: {
      const auto n = parse_number(normalize_answer(judged));
      return n && truth.kind() == ValueKind::integer && *n == truth.as_int();
    }
    case AnswerKind::yes_no:
      return truth.kind() == ValueKind::boolean && normalize_answer(judged) == (truth.as_bool() ? "yes" : "no");
    case AnswerKind::attribute:
      return truth.kind() == ValueKind::attribute && normalize_answer(judged) == normalize_answer(truth.as_attr());
  }
  return false;
}

void VqaCell::add(const VqaCell& o) {
  n += o.n;
  n_correct += o.n_correct;
  n_indefinite += o.n_indefinite;
  abs_error_sum += o.abs_error_sum;
  n_numeric += o.n_numeric;
}

nlohmann::json VqaReport::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [tier, by_template] : cells) {
    for (const auto& [tmpl, c] : by_template) {
      nlohmann::json cell = {{"accuracy", c.accuracy()},
                             {"n", c.n},
                             {"n_correct", c.n_correct},
                             {"n_indefinite", c.n_indefinite}};
      if (const auto mae = c.mae()) cell["mae"] = *mae;
      out[tier][tmpl] = std::move(cell);
    }
  }
  return out;
}

VqaReport score_vqa(const std::vector<QARecord>& gt, const std::vector<JudgedAnswer>& judged) {
  if (judged.empty()) throw ScoreError("no judged answers to score");
  std::unordered_map<std::string, const QARecord*> by_id;
  for (const auto& r : gt) by_id.emplace(r.question_id, &r);
  std::vector<std::string> unknown;
  std::set<std::string> seen;
  for (const auto& a : judged) {
    if (!by_id.contains(a.question_id)) unknown.push_back(a.question_id);
    if (!seen.insert(a.question_id).second) throw ScoreError("duplicate judged answer for " + a.question_id);
  }
  if (!unknown.empty()) {
    std::string msg = std::to_string(unknown.size()) + " judged ids not in ground truth:";
    for (std::size_t i = 0; i < unknown.size() && i < 10; ++i) msg += " " + unknown[i];
    if (unknown.size() > 10) msg += " ...";
    throw ScoreError(msg);
  }
  VqaReport rep;
  for (const auto& a : judged) {
    const auto& r = *by_id.at(a.question_id);
    VqaCell c;
    c.n = 1;
    if (!a.value) {
      c.n_indefinite = 1;
    } else {
      c.n_correct = answer_matches(*a.value, r.answer, r.answer_kind) ? 1 : 0;
      if (r.answer_kind == AnswerKind::integer) {
        if (const auto n = parse_number(normalize_answer(*a.value))) {
          c.n_numeric = 1;
          c.abs_error_sum = std::abs(static_cast<double>(*n - r.answer.as_int()));
        }
      }
    }
    add_cell(rep.cells, std::string(name_of(r.tier)), r.template_id, c);
  }
  return rep;
}

nlohmann::json to_json(const CaptionObject& o) {
  nlohmann::json j = nlohmann::json::object();
  if (o.shape) j["shape"] = name_of(*o.shape);
  if (o.color) j["color"] = name_of(*o.color);
  if (o.size) j["size"] = name_of(*o.size);
  if (o.material) j["material"] = name_of(*o.material);
  j["cycles"] = nlohmann::json::array();
  for (const auto c : o.cycles) j["cycles"].push_back(name_of(c));
  return j;
}

CaptionObject caption_object_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ScoreError("caption object must be a JSON object");
  CaptionObject o;
  const auto field = [&]<typename E>(const char* key, std::optional<E>& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    const auto text = normalize_answer(j.at(key).get<std::string>());
    out = parse_enum<E>(text);
    if (!out) throw ScoreError(std::string("unknown ") + key + " '" + text + "'");
  };
  field.operator()<Shape>("shape", o.shape);
  field.operator()<Color>("color", o.color);
  field.operator()<SizeClass>("size", o.size);
  field.operator()<Material>("material", o.material);
  if (j.contains("cycles")) {
    for (const auto& c : j.at("cycles")) {
      const auto name = c.is_object() ? c.at("type").get<std::string>() : c.get<std::string>();
      const auto t = parse_enum<CycleType>(normalize_answer(name));
      if (!t) throw ScoreError("unknown cycle type '" + name + "'");
      o.cycles.push_back(*t);
    }
  }
  return o;
}

std::vector<SceneCaption> read_captions_jsonl(std::string_view text) {
  std::vector<SceneCaption> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SceneCaption c;
      c.scene_id = j.at("scene_id").get<std::string>();
      for (const auto& o : j.at("objects")) c.objects.push_back(caption_object_from_json(o));
      out.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw ScoreError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

bool admissible(const CaptionObject& p, const ObjectSpec& g) {
  if (p.shape && *p.shape != g.shape) return false;
  if (p.color && *p.color != g.color0) return false;
  if (p.size && *p.size != g.size0) return false;
  if (p.material && *p.material != g.material) return false;
  return true;
}

int cycle_overlap(const std::vector<CycleType>& pred, const std::vector<CycleType>& gt) {
  std::array<int, kCycleTypes.size()> a{}, b{};
  for (const auto c : pred) ++a[static_cast<std::size_t>(c)];
  for (const auto c : gt) ++b[static_cast<std::size_t>(c)];
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::min(a[i], b[i]);
  return n;
}

namespace {

std::vector<CycleType> cycle_types(const ObjectSpec& o) {
  std::vector<CycleType> out;
  for (const auto& c : o.cycles) out.push_back(c.type());
  return out;
}

}  // namespace

Matching match_objects(const std::vector<CaptionObject>& pred, const SceneGraph& gt) {
  const int np = static_cast<int>(pred.size());
  const int ng = static_cast<int>(gt.objects.size());
  Matching m;
  if (np == 0 || ng == 0) return m;
  // Each matched pair is worth more than all cycle overlaps together, so the
  // optimum maximises cardinality first and shared cycles second.
  long long total_cycles = 1;
  for (const auto& p : pred) total_cycles += static_cast<long long>(p.cycles.size());
  const bool transpose = np > ng;
  const int rows = transpose ? ng : np;
  const int cols = transpose ? np : ng;
  std::vector<std::vector<long long>> w(static_cast<std::size_t>(rows), std::vector<long long>(cols, 0));
  std::vector<std::vector<bool>> edge(static_cast<std::size_t>(np), std::vector<bool>(ng, false));
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < ng; ++j) {
      const auto& g = gt.objects[static_cast<std::size_t>(j)];
      if (!admissible(pred[static_cast<std::size_t>(i)], g)) continue;
      edge[i][j] = true;
      const long long weight = total_cycles + cycle_overlap(pred[static_cast<std::size_t>(i)].cycles, cycle_types(g));
      if (transpose) {
        w[j][i] = weight;
      } else {
        w[i][j] = weight;
      }
    }
  }
  const auto col = max_weight_assignment(w);
  for (int r = 0; r < rows; ++r) {
    const int c = col[static_cast<std::size_t>(r)];
    if (c < 0) continue;
    const int i = transpose ? c : r;
    const int j = transpose ? r : c;
    if (edge[i][j]) m.pairs.emplace_back(i, j);
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

PRF prf(int tp, int fp, int fn) {
  PRF m;
  const bool pred_empty = tp + fp == 0;
  const bool gt_empty = tp + fn == 0;
  m.p = pred_empty ? (gt_empty ? 1.0 : 0.0) : static_cast<double>(tp) / (tp + fp);
  m.r = gt_empty ? (pred_empty ? 1.0 : 0.0) : static_cast<double>(tp) / (tp + fn);
  m.f1 = m.p + m.r == 0.0 ? 0.0 : 2.0 * m.p * m.r / (m.p + m.r);
  return m;
}

void CaptionCounts::add(const CaptionCounts& o) {
  obj_tp += o.obj_tp;
  obj_fp += o.obj_fp;
  obj_fn += o.obj_fn;
  cyc_tp += o.cyc_tp;
  cyc_fp += o.cyc_fp;
  cyc_fn += o.cyc_fn;
}

CaptionCounts score_captioning(const Matching& matching, const std::vector<CaptionObject>& pred,
                               const SceneGraph& gt) {
  CaptionCounts c;
  std::vector<bool> pred_used(pred.size(), false);
  std::vector<bool> gt_used(gt.objects.size(), false);
  for (const auto& [i, j] : matching.pairs) {
    pred_used[static_cast<std::size_t>(i)] = true;
    gt_used[static_cast<std::size_t>(j)] = true;
    const auto& p = pred[static_cast<std::size_t>(i)].cycles;
    const auto g = cycle_types(gt.objects[static_cast<std::size_t>(j)]);
    const int tp = cycle_overlap(p, g);
    c.cyc_tp += tp;
    c.cyc_fp += static_cast<int>(p.size()) - tp;
    c.cyc_fn += static_cast<int>(g.size()) - tp;
  }
  c.obj_tp = static_cast<int>(matching.pairs.size());
  c.obj_fp = static_cast<int>(pred.size()) - c.obj_tp;
  c.obj_fn = static_cast<int>(gt.objects.size()) - c.obj_tp;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred_used[i]) c.cyc_fp += static_cast<int>(pred[i].cycles.size());
  }
  for (std::size_t j = 0; j < gt.objects.size(); ++j) {
    if (!gt_used[j]) c.cyc_fn += static_cast<int>(gt.objects[j].cycles.size());
  }
  return c;
}

nlohmann::json CaptionReport::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [tier, c] : per_tier) {
    out[tier] = {{"object", prf_json(c.object())},
                 {"cycle", prf_json(c.cycle())},
                 {"counts",
                  {{"object", {{"tp", c.obj_tp}, {"fp", c.obj_fp}, {"fn", c.obj_fn}}},
                   {"cycle", {{"tp", c.cyc_tp}, {"fp", c.cyc_fp}, {"fn", c.cyc_fn}}}}}};
  }
  return out;
}

CaptionReport score_captions(const std::vector<SceneCaption>& captions,
                             const std::map<std::string, SceneGraph>& scenes) {
  CaptionReport rep;
  std::vector<std::string> unknown;
  for (const auto& c : captions) {
    if (!scenes.contains(c.scene_id)) unknown.push_back(c.scene_id);
  }
  if (!unknown.empty()) {
    std::string msg = "captions for unknown scenes:";
    for (const auto& id : unknown) msg += " " + id;
    throw ScoreError(msg);
  }
  for (const auto& c : captions) {
    const auto& g = scenes.at(c.scene_id);
    const auto counts = score_captioning(match_objects(c.objects, g), c.objects, g);
    rep.per_tier[std::string(name_of(g.tier))].add(counts);
    rep.per_tier["all"].add(counts);
  }
  return rep;
}

}  // namespace cyclebench
