#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclebench/builder.hpp"
#include "cyclebench/model.hpp"
#include "cyclebench/questions.hpp"

namespace cyclebench {

enum class Split : std::uint8_t { train, val, test };
std::string_view name_of(Split s);

// Builder settings of a tier. L5 takes the structure of `l5_base` (one of
// L1..L4) and adds light modulation.
BuildConfig tier_config(Tier tier, Tier l5_base = Tier::L1);
// Base structure of the index-th L5 scene: L1, L2, L3, L4, L1, ...
Tier l5_base_tier(int index);
// Expected cyclic-object count and clutter range of L1..L4.
struct TierShape {
  int cyclic = 1;
  int clutter_min = 2;
  int clutter_max = 3;
};
TierShape tier_shape(Tier tier);

// Train/val/test sizes for n scenes at 2:1:1; the remainder goes to train,
// then val, then test.
struct SplitSizes {
  int train = 0;
  int val = 0;
  int test = 0;
};
SplitSizes split_sizes(int n);
Split split_of(int index, int n);

std::string scene_id_for(Tier tier, int index);
// Seed of the attempt-th try for scene (tier, index).
std::uint64_t derive_seed(std::uint64_t master_seed, Tier tier, int index, int attempt);

struct DatasetConfig {
  std::vector<Tier> tiers{kTiers.begin(), kTiers.end()};
  int scenes_per_tier = 20;
  std::uint64_t master_seed = 0;
  int max_seed_attempts = 16;
  QuestionConfig questions;
  double balance_tolerance = 0.02;
};

struct SceneEntry {
  TemporalScene temporal;
  Split split = Split::train;
  std::optional<Tier> base_tier;  // L5 only
  std::vector<std::uint64_t> failed_seeds;
};

struct QuestionSet {
  std::vector<QARecord> records;
  std::vector<std::string> balance_log;
};

struct Dataset {
  DatasetConfig config;
  std::vector<SceneEntry> scenes;
  QuestionSet questions;
};

// Questions for a list of simulated scenes. Per-scene streams come from
// each scene's seed and the balancing stream from all seeds together, so
// the result depends on the scenes alone.
QuestionSet generate_questions(const std::vector<const TemporalScene*>& scenes,
                               const QuestionConfig& config = {}, double balance_tolerance = 0.02);

// Builds and simulates every scene, then generates and balances questions.
// Parallel across seeds; output is independent of the thread count.
Dataset build_dataset(const DatasetConfig& config);

nlohmann::json manifest_json(const Dataset& dataset, bool dense_tracks);
// Writes manifest.json, scenes/<id>.json and questions.jsonl under `dir`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir, bool dense_tracks);

struct Discrepancy {
  std::string kind;  // composition, margin, schema, oracle, evaluator, domain, balance, count
  std::string detail;
};

struct VerifyReport {
  int scenes = 0;
  int questions = 0;
  std::vector<Discrepancy> discrepancies;
  std::vector<std::string> warnings;

  bool ok() const { return discrepancies.empty(); }
  std::size_t count(std::string_view kind) const;
  nlohmann::json to_json() const;
};

// Independent pairwise/boundary margin scan of a materialized scene; one
// entry per violating (frame, pair) or (frame, object).
std::vector<std::string> scan_margins(const TemporalScene& scene, const Margins& margins);

// Re-materializes every scene listed in the manifest, rescans margins,
// checks tier composition, re-answers every question with both the program
// evaluator and the brute-force oracle, and checks answer domains, yes/no
// balance and per-template counts.
VerifyReport verify_dataset(const std::filesystem::path& manifest_path, double balance_tolerance = 0.02);

// Keyframe document for an external renderer: per object the cycle-critical
// frames (start, half periods, end), dense frames for orbiting objects,
// camera, and lights with per-frame intensity when modulated.
nlohmann::json export_keyframes(const TemporalScene& scene);
// Keyframe spacing for orbiting objects, so that the chord of every
// interpolated step stays within 1% of the radius.
int orbit_keyframe_step(int passes, int frame_count);
std::vector<int> keyframe_frames(const SceneGraph& graph, ObjectId id);

}  // namespace cyclebench
