#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "cyclebench/dataset.hpp"
#include "cyclebench/eval.hpp"
#include "cyclebench/judge.hpp"
#include "cyclebench/relations.hpp"
#include "cyclebench/serialize.hpp"

namespace fs = std::filesystem;
using namespace cyclebench;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, SceneGraph> load_scenes(const fs::path& dir) {
  std::map<std::string, SceneGraph> out;
  for (const auto& f : json_files(dir)) {
    auto g = scene_from_json(read_json_file(f));
    out.emplace(g.scene_id, std::move(g));
  }
  return out;
}

int cmd_gen(const std::string& tier, int count, std::uint64_t seed, const fs::path& out, bool dense) {
  DatasetConfig config;
  config.master_seed = seed;
  config.scenes_per_tier = count;
  if (count < 1) throw UsageError("--count must be at least 1");
  if (tier != "all") {
    const auto t = parse_enum<Tier>(tier);
    if (!t) throw UsageError("unknown tier '" + tier + "'");
    config.tiers = {*t};
  }
  const auto ds = build_dataset(config);
  write_dataset(ds, out, dense);
  std::size_t replaced = 0;
  for (const auto& s : ds.scenes) replaced += s.failed_seeds.size();
  std::cout << "wrote " << ds.scenes.size() << " scenes and " << ds.questions.records.size()
            << " questions to " << out.string() << "\n";
  if (replaced) std::cout << replaced << " failed seeds replaced (see manifest)\n";
  for (const auto& line : ds.questions.balance_log) std::clog << "balance: " << line << "\n";
  return 0;
}

int cmd_questions(const fs::path& scenes_dir, const fs::path& out) {
  std::vector<TemporalScene> scenes;
  for (const auto& [id, g] : load_scenes(scenes_dir)) scenes.push_back(simulate(g));
  std::vector<const TemporalScene*> ptrs;
  for (const auto& t : scenes) ptrs.push_back(&t);
  const auto qs = generate_questions(ptrs);
  write_file_atomic(out, to_jsonl(qs.records));
  std::cout << "wrote " << qs.records.size() << " questions for " << scenes.size() << " scenes to "
            << out.string() << "\n";
  for (const auto& line : qs.balance_log) std::clog << "balance: " << line << "\n";
  return 0;
}

int cmd_export(const fs::path& scene, const fs::path& out) {
  const auto t = simulate(scene_from_json(read_json_file(scene)));
  write_file_atomic(out, dump_document(export_keyframes(t)));
  return 0;
}

int cmd_verify(const fs::path& manifest, const std::string& report_path) {
  const auto rep = verify_dataset(manifest);
  if (!report_path.empty()) write_file_atomic(report_path, dump_document(rep.to_json()));
  std::cout << "scenes " << rep.scenes << ", questions " << rep.questions << ", discrepancies "
            << rep.discrepancies.size() << "\n";
  for (const auto& d : rep.discrepancies) std::cout << d.kind << ": " << d.detail << "\n";
  for (const auto& w : rep.warnings) std::clog << "warning: " << w << "\n";
  return rep.ok() ? 0 : kExitFailure;
}

int cmd_score_vqa(const fs::path& gt, const fs::path& judged, const fs::path& out) {
  const auto records = read_jsonl(read_text(gt));
  const auto answers = read_judged_jsonl(read_text(judged));
  const auto rep = score_vqa(records, answers);
  write_file_atomic(out, dump_document({{"vqa", rep.to_json()}}));
  const auto& all = rep.cells.at("all").at("all");
  std::cout << "accuracy " << all.accuracy() << " over " << all.n << " answers (" << all.n_indefinite
            << " indefinite)\n";
  return 0;
}

int cmd_score_caption(const fs::path& scenes_dir, const fs::path& captions, const fs::path& out) {
  const auto scenes = load_scenes(scenes_dir);
  const auto rep = score_captions(read_captions_jsonl(read_text(captions)), scenes);
  write_file_atomic(out, dump_document({{"captioning", rep.to_json()}}));
  if (rep.per_tier.contains("all")) {
    const auto& c = rep.per_tier.at("all");
    std::cout << "object F1 " << c.object().f1 << ", cycle F1 " << c.cycle().f1 << "\n";
  }
  return 0;
}

struct JudgeOptions {
  std::string mode = "replay";
  std::string kind = "vqa";
  fs::path fixtures;
  fs::path input;
  fs::path out;
  fs::path gt;
  HttpJudgeConfig http;
  int retries = 2;
};

template <typename F>
auto with_retries(int retries, F&& f) {
  for (int i = 0;; ++i) {
    try {
      return f();
    } catch (const TransportError& e) {
      if (i >= retries) throw;
      std::clog << "retrying after transport error: " << e.what() << "\n";
      std::this_thread::sleep_for(std::chrono::milliseconds(200 << i));
    }
  }
}

int cmd_judge(const JudgeOptions& o) {
  std::unique_ptr<JudgeAdapter> adapter;
  int workers = 1;
  if (o.mode == "replay") {
    if (o.fixtures.empty()) throw UsageError("--fixtures is required in replay mode");
    adapter = std::make_unique<ReplayJudge>(o.fixtures);
  } else if (o.mode == "http") {
    adapter = std::make_unique<HttpJudge>(o.http);
    workers = std::max(1, o.http.max_in_flight);
  } else {
    throw UsageError("unknown judge mode '" + o.mode + "'");
  }
  if (o.kind != "vqa" && o.kind != "caption") throw UsageError("unknown judge kind '" + o.kind + "'");

  std::vector<nlohmann::json> inputs;
  {
    std::istringstream in(read_text(o.input));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) inputs.push_back(nlohmann::json::parse(line));
    }
  }
  std::map<std::string, QARecord> gt;
  if (!o.gt.empty()) {
    for (auto& r : read_jsonl(read_text(o.gt))) gt.emplace(r.question_id, std::move(r));
  }

  JudgeLog log;
  std::vector<std::string> lines(inputs.size());
  std::vector<std::string> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i; (i = next++) < inputs.size();) {
      const auto& j = inputs[i];
      try {
        if (o.kind == "vqa") {
          const auto id = j.at("question_id").get<std::string>();
          std::string question = j.value("question", "");
          AnswerKind kind = AnswerKind::attribute;
          if (const auto it = gt.find(id); it != gt.end()) {
            question = it->second.question;
            kind = it->second.answer_kind;
          } else if (j.contains("answer_kind")) {
            kind = parse_enum<AnswerKind>(j.at("answer_kind").get<std::string>()).value_or(kind);
          }
          const auto text = j.at("response").get<std::string>();
          const auto value =
              with_retries(o.retries, [&] { return judge_vqa(*adapter, text, question, kind, &log); });
          lines[i] = to_json(JudgedAnswer{id, value}).dump();
        } else {
          const auto text = j.at("caption").get<std::string>();
          const auto objects = with_retries(o.retries, [&] { return judge_caption(*adapter, text, &log); });
          nlohmann::json out = {{"scene_id", j.at("scene_id")}, {"objects", nlohmann::json::array()}};
          for (const auto& obj : objects) out["objects"].push_back(to_json(obj));
          lines[i] = out.dump();
        }
      } catch (const std::exception& e) {
        errors[i] = "input line " + std::to_string(i + 1) + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  int failed = 0;
  for (const auto& e : errors) {
    if (!e.empty()) {
      std::cerr << e << "\n";
      ++failed;
    }
  }
  if (failed) return kExitFailure;
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  write_file_atomic(o.out, out);
  for (const auto& l : log.lines) std::clog << l << "\n";
  std::cout << "judged " << lines.size() << " inputs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyclic-dynamics video QA benchmark: scene generation, questions, verification, scoring"};
  app.require_subcommand(1);

  std::string tier = "all";
  int count = 20;
  std::uint64_t seed = 0;
  std::string out;
  bool dense = false;
  auto* gen = app.add_subcommand("gen", "Generate scenes, questions and a manifest");
  gen->add_option("--tier", tier, "L1..L5 or all")->check(CLI::IsMember({"L1", "L2", "L3", "L4", "L5", "all"}));
  gen->add_option("--count", count, "Scenes per tier");
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_flag("--dense-tracks", dense, "Embed per-frame states and relation tracks");

  std::string scenes_dir;
  auto* questions = app.add_subcommand("questions", "Generate questions for a directory of scene files");
  questions->add_option("--scenes", scenes_dir, "Scene directory")->required();
  questions->add_option("--out", out, "Questions JSONL")->required();

  std::string scene_file;
  auto* exp = app.add_subcommand("export-keyframes", "Write the keyframe document of one scene");
  exp->add_option("--scene", scene_file, "Scene JSON")->required();
  exp->add_option("--out", out, "Keyframe JSON")->required();

  std::string manifest;
  std::string report;
  auto* verify = app.add_subcommand("verify", "Re-check a built dataset");
  verify->add_option("--manifest", manifest, "manifest.json")->required();
  verify->add_option("--report", report, "Optional JSON report");

  auto* score = app.add_subcommand("score", "Score judged answers or captions");
  score->require_subcommand(1);
  std::string gt, judged, captions;
  auto* vqa = score->add_subcommand("vqa", "VQA accuracy and MAE");
  vqa->add_option("--gt", gt, "Ground-truth questions JSONL")->required();
  vqa->add_option("--judged", judged, "Judged answers JSONL")->required();
  vqa->add_option("--out", out, "Report JSON")->required();
  auto* cap = score->add_subcommand("caption", "Object- and cycle-level caption matching");
  cap->add_option("--gt-scenes", scenes_dir, "Scene directory")->required();
  cap->add_option("--captions", captions, "Structured captions JSONL")->required();
  cap->add_option("--out", out, "Report JSON")->required();

  JudgeOptions jo;
  std::string fixtures, input, jout, jgt;
  auto* judge = app.add_subcommand("judge", "Convert free-form answers or captions to JSON");
  judge->add_option("--mode", jo.mode, "replay or http")->check(CLI::IsMember({"replay", "http"}));
  judge->add_option("--fixtures", fixtures, "Replay fixture directory");
  judge->add_option("--kind", jo.kind, "vqa or caption")->check(CLI::IsMember({"vqa", "caption"}));
  judge->add_option("--input", input, "JSONL of {question_id, response} or {scene_id, caption}")->required();
  judge->add_option("--out", jout, "Output JSONL")->required();
  judge->add_option("--gt", jgt, "Questions JSONL supplying question text and answer kinds");
  judge->add_option("--host", jo.http.host, "HTTP judge host");
  judge->add_option("--port", jo.http.port, "HTTP judge port");
  judge->add_option("--path", jo.http.path, "HTTP completion path");
  judge->add_option("--model", jo.http.model, "Model name sent to the endpoint");
  judge->add_option("--max-in-flight", jo.http.max_in_flight, "Outstanding request bound")
      ->check(CLI::Range(1, 1024));
  judge->add_option("--retries", jo.retries, "Retries after transport errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(tier, count, seed, out, dense);
    if (*questions) return cmd_questions(scenes_dir, out);
    if (*exp) return cmd_export(scene_file, out);
    if (*verify) return cmd_verify(manifest, report);
    if (*vqa) return cmd_score_vqa(gt, judged, out);
    if (*cap) return cmd_score_caption(scenes_dir, captions, out);
    if (*judge) {
      jo.fixtures = fixtures;
      jo.input = input;
      jo.out = jout;
      jo.gt = jgt;
      return cmd_judge(jo);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
