// Serial reference vs OpenMP kernels on one L4 scene (most objects).
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include "cyclebench/builder.hpp"
#include "cyclebench/cycles.hpp"
#include "cyclebench/dataset.hpp"
#include "cyclebench/relations.hpp"

using namespace cyclebench;

namespace {

const SceneGraph& graph() {
  static const SceneGraph g = [] {
    for (std::uint64_t seed = 1;; ++seed) {
      try {
        return build_scene(seed, tier_config(Tier::L4));
      } catch (const GenerationFailed&) {
      }
    }
  }();
  return g;
}

const TemporalScene& scene() {
  static const TemporalScene s = materialize(graph());
  return s;
}

void BM_materialize_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(materialize_serial(graph()));
}
void BM_materialize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(materialize(graph()));
}
void BM_build_tracks_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_tracks_serial(scene()));
}
void BM_build_tracks(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_tracks(scene()));
}
void BM_check_margins_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_margins_serial(scene(), Margins{}));
}
void BM_check_margins(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_margins(scene(), Margins{}));
}

}  // namespace

BENCHMARK(BM_materialize_serial);
BENCHMARK(BM_materialize);
BENCHMARK(BM_build_tracks_serial);
BENCHMARK(BM_build_tracks);
BENCHMARK(BM_check_margins_serial);
BENCHMARK(BM_check_margins);

BENCHMARK_MAIN();
