#include <benchmark/benchmark.h>

#include "lipfuse/evaluation.hpp"
#include "lipfuse/fusion.hpp"
#include "lipfuse/simulate.hpp"

namespace {

using namespace lipfuse;

const SimulationResult& simulation() {
  static const auto sim = simulate_scores(SimulationConfig{});
  return sim;
}

void BM_Simulate(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.n_probes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_scores(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  const auto& sim = simulation();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuse(sim.identity_scores, sim.language_predictions, sim.subject_language, k));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.identity_scores.probe_count()));
}
BENCHMARK(BM_Fuse)->Arg(1)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AttributeErrors(benchmark::State& state) {
  const auto& sim = simulation();
  const auto d = fuse(sim.identity_scores, sim.language_predictions, sim.subject_language, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(attribute_errors(d, sim.identity_scores, sim.true_identity, sim.true_language, 8));
  }
}
BENCHMARK(BM_AttributeErrors)->Unit(benchmark::kMillisecond);

}  // namespace
