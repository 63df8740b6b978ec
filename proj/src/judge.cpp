#include "cyclebench/judge.hpp"

#include <httplib.h>

#include <fstream>

#include "cyclebench/serialize.hpp"

namespace cyclebench {

namespace {

JudgeKind parse_kind(const std::string& s) {
  if (s == "vqa") return JudgeKind::vqa;
  if (s == "caption") return JudgeKind::caption;
  throw std::invalid_argument("unknown judge kind '" + s + "'");
}

// Accepts a bare JSON document, optionally wrapped in a ``` fence.
std::optional<nlohmann::json> parse_strict(std::string raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return std::nullopt;
  raw = raw.substr(first);
  if (raw.starts_with("```")) {
    const auto open = raw.find('\n');
    const auto close = raw.rfind("```");
    if (open == std::string::npos || close <= open) return std::nullopt;
    raw = raw.substr(open + 1, close - open - 1);
  }
  try {
    return nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;
  }
}

}  // namespace

std::string_view name_of(JudgeKind k) { return k == JudgeKind::vqa ? "vqa" : "caption"; }

std::string judge_prompt(const JudgeRequest& r) {
  std::string p;
  if (r.kind == JudgeKind::vqa) {
    p = "You convert a model's free-form answer to a video question into JSON.\n"
        "Reply with exactly one JSON object {\"answer\": ...} and nothing else.\n";
    switch (r.answer_kind) {
      case AnswerKind::yes_no: p += "The answer must be \"yes\" or \"no\".\n"; break;
      case AnswerKind::integer: p += "The answer must be a single integer.\n"; break;
      case AnswerKind::attribute: p += "The answer must be a single lowercase word.\n"; break;
    }
    p += "If the response does not commit to exactly one answer, reply {\"answer\": null}.\n";
    p += "Question: " + r.question + "\nResponse: " + r.free_text + "\n";
  } else {
    p = "You convert a video caption into JSON describing each mentioned object.\n"
        "Reply with exactly one JSON object {\"objects\": [...]} and nothing else.\n"
        "Each object may state shape (cube, sphere, cylinder, cone), color (gray, red, blue, green, "
        "brown, purple, cyan, yellow), size (small, large) and material (metal, rubber), and lists "
        "its cycles among linear, orbit, size, color, orientation. Omit attributes the caption "
        "does not state.\n";
    p += "Caption: " + r.free_text + "\n";
  }
  if (r.attempt > 0) p += "Your previous reply was not valid JSON. Reply with JSON only.\n";
  return p;
}

ReplayJudge::ReplayJudge(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto j = read_json_file(f);
    if (j.is_array()) {
      for (const auto& item : j) add(item);
    } else {
      add(j);
    }
  }
}

ReplayJudge::ReplayJudge(const std::vector<nlohmann::json>& fixtures) {
  for (const auto& f : fixtures) add(f);
}

void ReplayJudge::add(const nlohmann::json& j) {
  Fixture f;
  f.kind = parse_kind(j.at("kind").get<std::string>());
  f.input = j.at("input").get<std::string>();
  f.question = j.value("question", "");
  for (const auto& r : j.at("responses")) f.responses.push_back(r.is_string() ? r.get<std::string>() : r.dump());
  if (f.responses.empty()) throw std::invalid_argument("fixture without responses: " + f.input);
  fixtures_.push_back(std::move(f));
}

std::string ReplayJudge::complete(const JudgeRequest& r) {
  const Fixture* match = nullptr;
  for (const auto& f : fixtures_) {
    if (f.kind != r.kind || f.input != r.free_text) continue;
    if (!f.question.empty() && f.question != r.question) continue;
    match = &f;
    break;
  }
  if (!match) throw std::runtime_error("no replay fixture for " + std::string(name_of(r.kind)) + " input '" + r.free_text + "'");
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(r.attempt), match->responses.size() - 1);
  return match->responses[i];
}

HttpJudge::HttpJudge(HttpJudgeConfig config)
    : config_(std::move(config)), slots_(std::max(1, std::min(config_.max_in_flight, 1024))) {}

std::string HttpJudge::complete(const JudgeRequest& r) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  httplib::Client cli(config_.host, config_.port);
  cli.set_connection_timeout(config_.timeout_seconds);
  cli.set_read_timeout(config_.timeout_seconds);
  const nlohmann::json body = {{"model", config_.model},
                               {"prompt", judge_prompt(r)},
                               {"max_tokens", config_.max_tokens},
                               {"temperature", 0}};
  const auto res = cli.Post(config_.path, body.dump(), "application/json");
  if (!res) throw TransportError("judge endpoint: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("judge endpoint: HTTP " + std::to_string(res->status));
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("judge endpoint: unexpected envelope: ") + e.what());
  }
}

void JudgeLog::add(std::string line) {
  std::lock_guard lock(mu);
  lines.push_back(std::move(line));
}

std::optional<std::optional<std::string>> parse_vqa_response(const std::string& raw) {
  const auto j = parse_strict(raw);
  if (!j || !j->is_object() || !j->contains("answer")) return std::nullopt;
  const auto& a = j->at("answer");
  if (a.is_null()) return std::optional<std::string>{};
  if (a.is_string()) {
    if (normalize_answer(a.get<std::string>()) == "indefinite") return std::optional<std::string>{};
    return std::optional<std::string>{a.get<std::string>()};
  }
  if (a.is_number_integer()) return std::optional<std::string>{std::to_string(a.get<std::int64_t>())};
  if (a.is_boolean()) return std::optional<std::string>{a.get<bool>() ? "yes" : "no"};
  return std::nullopt;
}

std::optional<std::vector<CaptionObject>> parse_caption_response(const std::string& raw) {
  const auto j = parse_strict(raw);
  if (!j || !j->is_object() || !j->contains("objects") || !j->at("objects").is_array()) return std::nullopt;
  std::vector<CaptionObject> out;
  try {
    for (const auto& o : j->at("objects")) out.push_back(caption_object_from_json(o));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return out;
}

std::optional<std::string> judge_vqa(JudgeAdapter& adapter, const std::string& free_text,
                                     const std::string& question, AnswerKind kind, JudgeLog* log) {
  JudgeRequest req{JudgeKind::vqa, free_text, question, kind, 0};
  for (req.attempt = 0; req.attempt < 2; ++req.attempt) {
    if (const auto parsed = parse_vqa_response(adapter.complete(req))) return *parsed;
  }
  if (log) log->add("vqa: malformed judge output twice, counted indefinite: " + question);
  return std::nullopt;
}

std::vector<CaptionObject> judge_caption(JudgeAdapter& adapter, const std::string& free_text, JudgeLog* log) {
  JudgeRequest req{JudgeKind::caption, free_text, "", AnswerKind::attribute, 0};
  for (req.attempt = 0; req.attempt < 2; ++req.attempt) {
    if (auto parsed = parse_caption_response(adapter.complete(req))) return std::move(*parsed);
  }
  if (log) log->add("caption: malformed judge output twice, no objects: " + free_text.substr(0, 60));
  return {};
}

}  // namespace cyclebench
