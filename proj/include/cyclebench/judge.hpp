#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclebench/eval.hpp"
#include "cyclebench/questions.hpp"

namespace cyclebench {

// The endpoint could not be reached or answered with a non-success status.
// Callers may retry; distinct from a response that fails to parse.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JudgeKind : std::uint8_t { vqa, caption };
std::string_view name_of(JudgeKind k);

struct JudgeRequest {
  JudgeKind kind = JudgeKind::vqa;
  std::string free_text;
  std::string question;  // vqa only
  AnswerKind answer_kind = AnswerKind::attribute;
  int attempt = 0;  // 0 for the first ask, 1 for the re-ask
};

// Builds the instruction sent to the judge model.
std::string judge_prompt(const JudgeRequest& request);

class JudgeAdapter {
 public:
  virtual ~JudgeAdapter() = default;
  // Raw completion text for the request.
  virtual std::string complete(const JudgeRequest& request) = 0;
};

// Serves recorded responses. A fixture is {kind, input, question?,
// responses: [...]}; the n-th ask of a request gets responses[n] (the last
// one once they run out).
class ReplayJudge : public JudgeAdapter {
 public:
  explicit ReplayJudge(const std::filesystem::path& fixtures_dir);
  explicit ReplayJudge(const std::vector<nlohmann::json>& fixtures);
  std::string complete(const JudgeRequest& request) override;
  std::size_t size() const { return fixtures_.size(); }

 private:
  struct Fixture {
    JudgeKind kind;
    std::string input;
    std::string question;
    std::vector<std::string> responses;
  };
  void add(const nlohmann::json& j);
  std::vector<Fixture> fixtures_;
};

struct HttpJudgeConfig {
  std::string host = "127.0.0.1";
  int port = 8000;
  std::string path = "/v1/completions";
  std::string model = "judge";
  int max_in_flight = 4;
  int timeout_seconds = 60;
  int max_tokens = 512;
};

// POSTs {model, prompt, max_tokens, temperature: 0} to a completion
// endpoint and returns choices[0].text. At most max_in_flight requests are
// outstanding at any time.
class HttpJudge : public JudgeAdapter {
 public:
  explicit HttpJudge(HttpJudgeConfig config);
  std::string complete(const JudgeRequest& request) override;

 private:
  HttpJudgeConfig config_;
  std::counting_semaphore<1024> slots_;
};

struct JudgeLog {
  std::vector<std::string> lines;
  std::mutex mu;
  void add(std::string line);
};

// Strict-JSON conversion with one re-ask on malformed output; after that a
// VQA answer becomes Indefinite and a caption an empty object list.
// TransportError propagates.
std::optional<std::string> judge_vqa(JudgeAdapter& adapter, const std::string& free_text,
                                     const std::string& question, AnswerKind kind, JudgeLog* log = nullptr);
std::vector<CaptionObject> judge_caption(JudgeAdapter& adapter, const std::string& free_text,
                                         JudgeLog* log = nullptr);

// Parses a judge response; nullopt when it is not the expected JSON.
std::optional<std::optional<std::string>> parse_vqa_response(const std::string& raw);
std::optional<std::vector<CaptionObject>> parse_caption_response(const std::string& raw);

}  // namespace cyclebench
