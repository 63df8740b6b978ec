#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cyclebench/judge.hpp"

using namespace cyclebench;
using nlohmann::json;

namespace {

std::vector<json> fixtures() {
  return {
      {{"kind", "vqa"}, {"input", "the cube is red"}, {"responses", {R"({"answer": "red"})"}}},
      {{"kind", "vqa"}, {"input", "it might be red or blue"}, {"responses", {R"({"answer": null})"}}},
      {{"kind", "vqa"},
       {"input", "yes, I think so"},
       {"responses", {"Sure! The answer is yes.", "```json\n{\"answer\": \"yes\"}\n```"}}},
      {{"kind", "vqa"}, {"input", "hmm"}, {"responses", {"no json", "still none"}}},
      {{"kind", "vqa"},
       {"input", "two"},
       {"question", "How many objects orbit around another object?"},
       {"responses", {R"({"answer": 2})"}}},
      {{"kind", "caption"},
       {"input", "A red cone circles a large metal cube."},
       {"responses",
        {R"({"objects": [{"shape": "cone", "color": "red", "cycles": ["orbit"]}, {"shape": "cube", "size": "large", "material": "metal", "cycles": []}]})"}}},
      {{"kind", "caption"}, {"input", "garbled"}, {"responses", {"[1, 2", "{\"objects\": 3}"}}},
  };
}

// Local completion endpoint that records how many requests overlap.
struct FakeEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  std::atomic<int> hits{0};
  json last_body;
  std::mutex mu;

  FakeEndpoint() {
    server.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++active;
      int p = peak.load();
      while (now > p && !peak.compare_exchange_weak(p, now)) {
      }
      ++hits;
      {
        std::lock_guard lock(mu);
        last_body = json::parse(req.body);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(60));
      --active;
      res.set_content(json{{"choices", {{{"text", R"({"answer": "blue"})"}}}}}.dump(), "application/json");
    });
    server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    server.Post("/weird", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"unexpected": true})", "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeEndpoint() {
    server.stop();
    thread.join();
  }
};

HttpJudgeConfig config_for(int port, int in_flight, std::string path = "/v1/completions") {
  HttpJudgeConfig c;
  c.port = port;
  c.max_in_flight = in_flight;
  c.path = std::move(path);
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST_CASE("replay: committed and indefinite answers") {
  ReplayJudge judge(fixtures());
  CHECK(judge_vqa(judge, "the cube is red", "What color is the cube?", AnswerKind::attribute) == "red");
  CHECK_FALSE(judge_vqa(judge, "it might be red or blue", "What color?", AnswerKind::attribute).has_value());
  CHECK(judge_vqa(judge, "two", "How many objects orbit around another object?", AnswerKind::integer) == "2");
  CHECK_THROWS_AS(judge_vqa(judge, "two", "Another question?", AnswerKind::integer), std::runtime_error);
}

TEST_CASE("replay: malformed output gets one re-ask") {
  ReplayJudge judge(fixtures());
  JudgeLog log;
  CHECK(judge_vqa(judge, "yes, I think so", "Is it?", AnswerKind::yes_no, &log) == "yes");
  CHECK(log.lines.empty());
  CHECK_FALSE(judge_vqa(judge, "hmm", "Is it?", AnswerKind::yes_no, &log).has_value());
  CHECK(log.lines.size() == 1);
  CHECK(judge_caption(judge, "garbled", &log).empty());
  CHECK(log.lines.size() == 2);
}

TEST_CASE("replay: captions and determinism") {
  ReplayJudge judge(fixtures());
  const auto a = judge_caption(judge, "A red cone circles a large metal cube.");
  const auto b = judge_caption(judge, "A red cone circles a large metal cube.");
  REQUIRE(a.size() == 2);
  CHECK(a == b);
  CHECK(a[0].shape == Shape::cone);
  CHECK(a[0].cycles == std::vector<CycleType>{CycleType::orbit});
  CHECK(a[1].material == Material::metal);
  CHECK_THROWS(judge_caption(judge, "unknown caption"));
}

TEST_CASE("replay: fixtures load from a directory") {
  const auto dir = std::filesystem::temp_directory_path() / ("cyclebench_fixtures_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.json") << json(fixtures()).dump();
    std::ofstream(dir / "b.json") << json{{"kind", "vqa"}, {"input", "nope"}, {"responses", {R"({"answer": "no"})"}}}.dump();
    std::ofstream(dir / "notes.txt") << "ignored";
  }
  ReplayJudge judge(dir);
  CHECK(judge.size() == fixtures().size() + 1);
  CHECK(judge_vqa(judge, "nope", "q", AnswerKind::yes_no) == "no");
  std::filesystem::remove_all(dir);
}

TEST_CASE("strict parsing") {
  CHECK(parse_vqa_response(R"({"answer": "red"})") == std::optional<std::optional<std::string>>("red"));
  CHECK(parse_vqa_response(R"({"answer": true})") == std::optional<std::optional<std::string>>("yes"));
  const auto indefinite = parse_vqa_response(R"({"answer": "Indefinite"})");
  REQUIRE(indefinite.has_value());
  CHECK_FALSE(indefinite->has_value());
  CHECK_FALSE(parse_vqa_response("red").has_value());
  CHECK_FALSE(parse_vqa_response(R"({"value": "red"})").has_value());
  CHECK_FALSE(parse_caption_response(R"({"objects": [{"shape": "pyramid"}]})").has_value());
}

TEST_CASE("prompts state the expected output") {
  const auto p = judge_prompt({JudgeKind::vqa, "blue", "What color?", AnswerKind::attribute, 0});
  CHECK(p.find("What color?") != std::string::npos);
  CHECK(p.find("null") != std::string::npos);
  const auto again = judge_prompt({JudgeKind::vqa, "blue", "What color?", AnswerKind::attribute, 1});
  CHECK(again.find("previous reply") != std::string::npos);
}

TEST_CASE("http: requests reach the endpoint and stay within the in-flight bound") {
  FakeEndpoint endpoint;
  REQUIRE(endpoint.port > 0);
  HttpJudge judge(config_for(endpoint.port, 2));
  std::vector<std::thread> workers;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&] {
      if (judge_vqa(judge, "blue-ish", "What color?", AnswerKind::attribute) == "blue") ++ok;
    });
  }
  for (auto& w : workers) w.join();
  CHECK(ok == 8);
  CHECK(endpoint.hits == 8);
  CHECK(endpoint.peak <= 2);
  CHECK(endpoint.peak >= 1);
  std::lock_guard lock(endpoint.mu);
  CHECK(endpoint.last_body.at("temperature") == 0);
  CHECK(endpoint.last_body.at("prompt").get<std::string>().find("What color?") != std::string::npos);
}

TEST_CASE("http: failures are TransportError, distinct from parse failures") {
  FakeEndpoint endpoint;
  HttpJudge failing(config_for(endpoint.port, 1, "/fail"));
  CHECK_THROWS_AS(judge_vqa(failing, "x", "q", AnswerKind::yes_no), TransportError);
  HttpJudge weird(config_for(endpoint.port, 1, "/weird"));
  CHECK_THROWS_AS(judge_vqa(weird, "x", "q", AnswerKind::yes_no), TransportError);

  int closed_port = 0;
  {
    httplib::Server probe;
    closed_port = probe.bind_to_any_port("127.0.0.1");
  }
  auto c = config_for(closed_port, 1);
  c.timeout_seconds = 1;
  HttpJudge unreachable(c);
  CHECK_THROWS_AS(judge_vqa(unreachable, "x", "q", AnswerKind::yes_no), TransportError);
}
