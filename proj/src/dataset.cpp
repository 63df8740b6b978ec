#include "cyclebench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "cyclebench/cycles.hpp"
#include "cyclebench/relations.hpp"
#include "cyclebench/serialize.hpp"

namespace cyclebench {

namespace {

constexpr std::uint64_t kSceneSeedStream = 0x5ce9e;
constexpr std::uint64_t kQuestionStream = 0x9e57;
constexpr std::uint64_t kBalanceStream = 0xba1a;

std::string str(std::string_view v) { return std::string(v); }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view name_of(Split s) {
  static constexpr std::array<std::string_view, 3> names{"train", "val", "test"};
  return names.at(static_cast<std::size_t>(s));
}

TierShape tier_shape(Tier tier) {
  switch (tier) {
    case Tier::L1: return {1, 2, 3};
    case Tier::L2: return {1, 4, 9};
    case Tier::L3: return {2, 2, 3};
    case Tier::L4: return {3, 2, 3};
    case Tier::L5: break;
  }
  throw std::invalid_argument("L5 has no shape of its own");
}

Tier l5_base_tier(int index) { return static_cast<Tier>(index % 4); }

BuildConfig tier_config(Tier tier, Tier l5_base) {
  const bool light = tier == Tier::L5;
  const Tier base = light ? l5_base : tier;
  if (base == Tier::L5) throw std::invalid_argument("L5 base must be one of L1..L4");
  const auto shape = tier_shape(base);
  BuildConfig c;
  c.tier = tier;
  c.cyclic_objects = shape.cyclic;
  c.clutter_min = shape.clutter_min;
  c.clutter_max = shape.clutter_max;
  c.light_cycle = light;
  return c;
}

SplitSizes split_sizes(int n) {
  SplitSizes s;
  const int q = n / 4;
  const int r = n % 4;
  s.train = 2 * q + (r >= 1 ? 1 : 0);
  s.val = q + (r >= 2 ? 1 : 0);
  s.test = q + (r >= 3 ? 1 : 0);
  return s;
}

Split split_of(int index, int n) {
  const auto s = split_sizes(n);
  if (index < s.train) return Split::train;
  if (index < s.train + s.val) return Split::val;
  return Split::test;
}

std::string scene_id_for(Tier tier, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05d", name_of(tier).data(), index);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t master_seed, Tier tier, int index, int attempt) {
  return CounterRng(master_seed)
      .split(kSceneSeedStream, static_cast<std::uint64_t>(tier), static_cast<std::uint64_t>(index),
             static_cast<std::uint64_t>(attempt))
      .next_u64();
}

QuestionSet generate_questions(const std::vector<const TemporalScene*>& scenes, const QuestionConfig& config,
                               double balance_tolerance) {
  std::vector<std::vector<QARecord>> per_scene(scenes.size());
  const auto n = static_cast<std::int64_t>(scenes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& t = *scenes[static_cast<std::size_t>(i)];
    CounterRng rng = CounterRng(t.graph.seed).split(kQuestionStream);
    per_scene[static_cast<std::size_t>(i)] = generate_scene_questions(t, rng, config);
  }
  std::vector<QARecord> all;
  for (auto& v : per_scene) {
    for (auto& r : v) all.push_back(std::move(r));
  }
  std::uint64_t key = kBalanceStream;
  for (const auto* t : scenes) key = CounterRng(key).split(t->graph.seed).next_u64();
  CounterRng balance_rng(key);
  auto balanced = balance_yes_no(std::move(all), balance_rng, balance_tolerance);
  return {std::move(balanced.records), std::move(balanced.log)};
}

Dataset build_dataset(const DatasetConfig& config) {
  struct Job {
    Tier tier;
    int index;
  };
  std::vector<Job> jobs;
  for (const auto tier : config.tiers) {
    for (int i = 0; i < config.scenes_per_tier; ++i) jobs.push_back({tier, i});
  }
  Dataset ds;
  ds.config = config;
  ds.scenes.resize(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& job = jobs[static_cast<std::size_t>(j)];
    auto& entry = ds.scenes[static_cast<std::size_t>(j)];
    const Tier base = job.tier == Tier::L5 ? l5_base_tier(job.index) : job.tier;
    const auto build_config = tier_config(job.tier, base);
    if (job.tier == Tier::L5) entry.base_tier = base;
    entry.split = split_of(job.index, config.scenes_per_tier);
    bool built = false;
    for (int attempt = 0; attempt < config.max_seed_attempts && !built; ++attempt) {
      const auto seed = derive_seed(config.master_seed, job.tier, job.index, attempt);
      try {
        SceneGraph g = build_scene(seed, build_config);
        g.scene_id = scene_id_for(job.tier, job.index);
        entry.temporal = simulate(g);
        built = true;
      } catch (const GenerationFailed& e) {
        entry.failed_seeds.push_back(e.seed());
      }
    }
    if (!built) errors[static_cast<std::size_t>(j)] = scene_id_for(job.tier, job.index);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("no seed produced a valid scene for " + e);
  }
  std::vector<const TemporalScene*> ptrs;
  for (const auto& e : ds.scenes) ptrs.push_back(&e.temporal);
  ds.questions = generate_questions(ptrs, config.questions, config.balance_tolerance);
  return ds;
}

nlohmann::json manifest_json(const Dataset& ds, bool dense_tracks) {
  using nlohmann::json;
  json scenes = json::array();
  json splits = json::object();
  json replaced = json::array();
  for (const auto& e : ds.scenes) {
    const auto& g = e.temporal.graph;
    json entry = {{"scene_id", g.scene_id},
                  {"tier", name_of(g.tier)},
                  {"split", name_of(e.split)},
                  {"seed", g.seed},
                  {"file", "scenes/" + g.scene_id + ".json"},
                  {"cyclic_objects", g.cyclic_count()},
                  {"clutter_objects", g.clutter_count()}};
    if (e.base_tier) entry["base_tier"] = name_of(*e.base_tier);
    scenes.push_back(std::move(entry));
    splits[str(name_of(g.tier))][str(name_of(e.split))].push_back(g.scene_id);
    for (const auto s : e.failed_seeds) replaced.push_back({{"scene_id", g.scene_id}, {"failed_seed", s}});
  }
  json per_template = json::object();
  for (const auto& t : question_templates()) per_template[str(t.id)] = json::object();
  for (const auto& r : ds.questions.records) {
    auto& slot = per_template[r.template_id][str(name_of(r.tier))];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
  }
  const Margins m;
  return {{"generator", "cyclebench"},
          {"rng", CounterRng::kAlgorithm},
          {"master_seed", ds.config.master_seed},
          {"scenes_per_tier", ds.config.scenes_per_tier},
          {"frame_count", kDefaultFrameCount},
          {"fps", kDefaultFps},
          {"margins", {{"object_margin", m.object_margin}, {"boundary_margin", m.boundary_margin}}},
          {"dense_tracks", dense_tracks},
          {"splits", splits},
          {"scenes", scenes},
          {"replaced_seeds", replaced},
          {"questions",
           {{"file", "questions.jsonl"},
            {"total", ds.questions.records.size()},
            {"balance_tolerance", ds.config.balance_tolerance},
            {"per_template", per_template}}},
          {"balance_log", ds.questions.balance_log}};
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir, bool dense_tracks) {
  std::filesystem::create_directories(dir / "scenes");
  const auto n = static_cast<std::int64_t>(ds.scenes.size());
  std::vector<std::string> errors(ds.scenes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& t = ds.scenes[static_cast<std::size_t>(i)].temporal;
    try {
      write_file_atomic(dir / "scenes" / (t.graph.scene_id + ".json"),
                        dump_document(scene_to_json(t, dense_tracks)));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  write_file_atomic(dir / "questions.jsonl", to_jsonl(ds.questions.records));
  write_file_atomic(dir / "manifest.json", dump_document(manifest_json(ds, dense_tracks)));
}

std::size_t VerifyReport::count(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(discrepancies.begin(), discrepancies.end(), [&](const auto& d) { return d.kind == kind; }));
}

nlohmann::json VerifyReport::to_json() const {
  auto list = nlohmann::json::array();
  std::map<std::string, int> by_kind;
  for (const auto& d : discrepancies) {
    list.push_back({{"kind", d.kind}, {"detail", d.detail}});
    ++by_kind[d.kind];
  }
  return {{"ok", ok()},
          {"scenes", scenes},
          {"questions", questions},
          {"discrepancy_counts", by_kind},
          {"discrepancies", list},
          {"warnings", warnings}};
}

std::vector<std::string> scan_margins(const TemporalScene& t, const Margins& margins) {
  std::vector<std::string> out;
  const auto& g = t.graph;
  const auto k = t.object_count();
  const auto radius = [&](std::size_t i, int f) {
    const double factor = g.objects[i].shape == Shape::cube ? std::numbers::sqrt2 : 1.0;
    return factor * t.at(f, {static_cast<std::uint32_t>(i)}).scale;
  };
  for (int f = 0; f < t.frame_count(); ++f) {
    for (std::size_t i = 0; i < k; ++i) {
      const Vec3 p = t.at(f, {static_cast<std::uint32_t>(i)}).position;
      const double bm = margins.boundary_margin;
      const bool inside = p.x >= g.bounds.x_min + bm && p.x <= g.bounds.x_max - bm &&
                          p.y >= g.bounds.y_min + bm && p.y <= g.bounds.y_max - bm;
      if (!inside) {
        out.push_back(g.scene_id + " frame " + std::to_string(f) + ": object " + std::to_string(i) +
                      " outside bounds");
      }
      for (std::size_t j = i + 1; j < k; ++j) {
        const Vec3 q = t.at(f, {static_cast<std::uint32_t>(j)}).position;
        const double d = std::hypot(p.x - q.x, p.y - q.y);
        const double need = radius(i, f) + radius(j, f) + margins.object_margin;
        if (d < need) {
          char buf[160];
          std::snprintf(buf, sizeof buf, " frame %d: objects %zu,%zu at %.4f < %.4f", f, i, j, d, need);
          out.push_back(g.scene_id + buf);
        }
      }
    }
  }
  return out;
}

VerifyReport verify_dataset(const std::filesystem::path& manifest_path, double balance_tolerance) {
  VerifyReport rep;
  const auto dir = manifest_path.parent_path();
  const auto manifest = read_json_file(manifest_path);
  const auto add = [&](std::string kind, std::string detail) {
    rep.discrepancies.push_back({std::move(kind), std::move(detail)});
  };
  Margins margins;
  if (manifest.contains("margins")) {
    margins.object_margin = manifest["margins"].value("object_margin", margins.object_margin);
    margins.boundary_margin = manifest["margins"].value("boundary_margin", margins.boundary_margin);
  }

  // Scenes.
  std::map<std::string, TemporalScene> scenes;
  for (const auto& entry : manifest.at("scenes")) {
    const auto id = entry.at("scene_id").get<std::string>();
    ++rep.scenes;
    SceneGraph g;
    try {
      g = scene_from_json(read_json_file(dir / entry.at("file").get<std::string>()));
    } catch (const std::exception& e) {
      add("schema", id + ": " + e.what());
      continue;
    }
    if (g.scene_id != id) add("schema", id + ": file holds scene " + g.scene_id);
    for (const auto& problem : validate_graph(g)) add("schema", id + ": " + problem);
    const auto tier = parse_enum<Tier>(entry.at("tier").get<std::string>());
    if (!tier || *tier != g.tier) add("composition", id + ": tier differs from manifest");
    Tier base = g.tier;
    if (g.tier == Tier::L5) {
      if (!g.light.modulation) add("composition", id + ": L5 scene without light modulation");
      const auto b = entry.contains("base_tier") ? parse_enum<Tier>(entry["base_tier"].get<std::string>())
                                                 : std::nullopt;
      if (!b || *b == Tier::L5) {
        add("composition", id + ": L5 scene without a base tier");
        continue;
      }
      base = *b;
    } else if (g.light.modulation) {
      add("composition", id + ": light modulation outside L5");
    }
    const auto shape = tier_shape(base);
    const auto cyclic = static_cast<int>(g.cyclic_count());
    const auto clutter = static_cast<int>(g.clutter_count());
    if (cyclic != shape.cyclic) {
      add("composition", id + ": " + std::to_string(cyclic) + " cyclic objects, expected " +
                             std::to_string(shape.cyclic));
    }
    if (clutter < shape.clutter_min || clutter > shape.clutter_max) {
      add("composition", id + ": " + std::to_string(clutter) + " clutter objects, expected " +
                             std::to_string(shape.clutter_min) + ".." + std::to_string(shape.clutter_max));
    }
    TemporalScene t;
    try {
      t = simulate(g);
    } catch (const std::exception& e) {
      add("schema", id + ": " + e.what());
      continue;
    }
    for (auto& v : scan_margins(t, margins)) add("margin", std::move(v));
    scenes.emplace(id, std::move(t));
  }

  // Questions.
  const auto& qinfo = manifest.at("questions");
  std::vector<QARecord> records;
  try {
    records = read_jsonl(read_text(dir / qinfo.at("file").get<std::string>()));
  } catch (const std::exception& e) {
    add("schema", std::string("questions: ") + e.what());
  }
  rep.questions = static_cast<int>(records.size());
  std::map<std::string, std::map<std::string, int>> counts;
  std::map<std::pair<std::string, std::string>, std::array<int, 2>> yes_no;
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.question_id).second) add("schema", r.question_id + ": duplicate question id");
    const auto it = scenes.find(r.scene_id);
    if (it == scenes.end()) {
      add("schema", r.question_id + ": unknown scene " + r.scene_id);
      continue;
    }
    const auto& t = it->second;
    const auto* tmpl = find_template(r.template_id);
    if (!tmpl) {
      add("schema", r.question_id + ": unknown template " + r.template_id);
      continue;
    }
    if (tmpl->answer_kind != r.answer_kind || r.tier != t.graph.tier) {
      add("schema", r.question_id + ": answer kind or tier inconsistent");
    }
    ++counts[r.template_id][str(name_of(r.tier))];
    const Value oracle = brute_force_answer(r, t);
    if (!(oracle == r.answer)) {
      add("oracle", r.question_id + ": recorded " + r.answer.to_string() + ", oracle " + oracle.to_string());
    }
    const Value evaluated = execute(r.program, t);
    if (!(evaluated == r.answer)) {
      add("evaluator",
          r.question_id + ": recorded " + r.answer.to_string() + ", program " + evaluated.to_string());
    }
    if (r.answer.is_invalid()) add("domain", r.question_id + ": invalid answer");
    if (r.answer_kind == AnswerKind::integer && r.answer.kind() == ValueKind::integer) {
      const auto v = r.answer.as_int();
      bool in_domain = true;
      if (r.template_id == "numeric_occurrence") in_domain = v == 1 || v == 2 || v == 5;
      if (r.template_id == "numeric_periodicity") in_domain = v == 160 || v == 80 || v == 32;
      if (r.template_id == "numeric_counting") in_domain = v >= 0 && v <= 3;
      if (!in_domain) add("domain", r.question_id + ": " + r.template_id + " answer " + std::to_string(v));
    }
    if (r.answer_kind == AnswerKind::yes_no && r.answer.kind() == ValueKind::boolean) {
      ++yes_no[{r.template_id, str(name_of(r.tier))}][r.answer.as_bool() ? 1 : 0];
    }
  }
  if (qinfo.contains("total") && qinfo["total"].get<int>() != rep.questions) {
    add("count", "manifest lists " + std::to_string(qinfo["total"].get<int>()) + " questions, file has " +
                     std::to_string(rep.questions));
  }
  if (qinfo.contains("per_template")) {
    for (const auto& [tmpl, by_tier] : qinfo["per_template"].items()) {
      for (const auto& [tier, n] : by_tier.items()) {
        const int have = counts[tmpl][tier];
        if (have != n.get<int>()) {
          add("count", tmpl + " " + tier + ": manifest " + std::to_string(n.get<int>()) + ", file " +
                           std::to_string(have));
        }
      }
    }
    for (const auto& [tmpl, by_tier] : counts) {
      for (const auto& [tier, n] : by_tier) {
        if (!qinfo["per_template"].contains(tmpl) || !qinfo["per_template"][tmpl].contains(tier)) {
          add("count", tmpl + " " + tier + ": " + std::to_string(n) + " questions missing from manifest");
        }
      }
    }
  }
  for (const auto& [key, yn] : yes_no) {
    const int total = yn[0] + yn[1];
    const double p = static_cast<double>(yn[1]) / total;
    const auto label = key.first + " " + key.second + ": yes " + std::to_string(yn[1]) + "/" + std::to_string(total);
    if (yn[0] == 0 || yn[1] == 0) {
      rep.warnings.push_back(label + " (single-answer group)");
    } else if (std::abs(p - 0.5) > balance_tolerance + 1e-12) {
      add("balance", label);
    }
  }
  return rep;
}

int orbit_keyframe_step(int passes, int frame_count) {
  // Sagitta of a two-frame chord relative to the radius.
  const double sagitta = 1.0 - std::cos(std::numbers::pi * passes * 2.0 / frame_count);
  return sagitta < 0.01 ? 2 : 1;
}

std::vector<int> keyframe_frames(const SceneGraph& g, ObjectId id) {
  const int frames = g.frame_count;
  std::set<int> out{0, frames};
  for (const auto& c : g.object(id).cycles) {
    // Start, switch points and returns all sit on half-period boundaries.
    const int half = std::max(1, c.period_frames(frames) / 2);
    for (int f = 0; f <= frames; f += half) out.insert(f);
    if (c.type() == CycleType::orbit) {
      const int step = orbit_keyframe_step(c.passes, frames);
      for (int f = 0; f <= frames; f += step) out.insert(f);
    }
  }
  return {out.begin(), out.end()};
}

nlohmann::json export_keyframes(const TemporalScene& t) {
  using nlohmann::json;
  const auto& g = t.graph;
  const int frames = g.frame_count;
  const auto order = orbit_topological_order(g);
  if (!order) throw CyclicOrbitError("orbit references form a cycle");
  // State at frame F equals frame 0 by periodicity; evaluate it explicitly.
  const auto end_states = evaluate_frame(g, *order, frames);
  const auto state = [&](int f, ObjectId id) -> const ObjectState& {
    return f < frames ? t.at(f, id) : end_states[id.value];
  };
  json objects = json::array();
  for (const auto& o : g.objects) {
    const auto* orbit = o.find_variant<Orbit>();
    const auto* rot = o.find_variant<OrientationChange>();
    const auto* rot_cycle = o.find(CycleType::orientation);
    const double hue0 = palette_hue(o.color0);
    json keys = json::array();
    for (const int f : keyframe_frames(g, o.id)) {
      const auto& s = state(f, o.id);
      // Rotation and hue are unwrapped so that linear interpolation between
      // neighbouring keyframes follows the true path.
      double rotation = s.orientation;
      if (rot) {
        rotation = o.orientation0 + 360.0 * rot->turns * rot_cycle->passes * static_cast<double>(f) / frames;
      }
      json k = {{"frame", f},
                {"position", to_json(s.position)},
                {"rotation", rotation},
                {"scale", s.scale},
                {"color_hue", hue0 + signed_hue_arc(hue0, s.color_hue)},
                {"color", name_of(s.nominal_color)}};
      if (orbit) {
        Vec3 off = s.position - state(f, orbit->center).position;
        off.z = 0.0;
        k["offset"] = to_json(off);
      }
      keys.push_back(std::move(k));
    }
    json entry = {{"id", o.id.value},
                  {"shape", name_of(o.shape)},
                  {"material", name_of(o.material)},
                  {"mesh_ref", o.mesh_ref},
                  {"keyframes", std::move(keys)}};
    if (orbit) entry["parent"] = orbit->center.value;
    objects.push_back(std::move(entry));
  }
  json lights = json::array();
  for (const auto& l : g.light.sources) {
    json entry = {{"name", l.name}, {"position", to_json(l.position)}, {"base_intensity", l.intensity}};
    if (g.light.modulation) {
      json curve = json::array();
      for (int f = 0; f <= frames; ++f) curve.push_back(light_intensity(g.light, l, f));
      entry["intensity"] = std::move(curve);
    }
    lights.push_back(std::move(entry));
  }
  return {{"scene_id", g.scene_id},
          {"frame_count", frames},
          {"fps", g.fps},
          {"interpolation", "linear"},
          {"camera", {{"eye", to_json(g.camera.eye)}, {"look_at", to_json(g.camera.look_at)}}},
          {"lights", std::move(lights)},
          {"objects", std::move(objects)}};
}

}  // namespace cyclebench
