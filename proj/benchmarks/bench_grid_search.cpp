#include <benchmark/benchmark.h>

#include "lipfuse/grid_search.hpp"
#include "lipfuse/synthetic.hpp"

namespace {

using namespace lipfuse;

// One feature group of the default grid (pivot 0, euclidean), one kernel
// per run; the full grid is 32 such groups.
void BM_GridSearchGroup(benchmark::State& state, Kernel kernel) {
  synthetic::DatasetSpec spec;
  spec.languages = 4;
  spec.subjects_per_language = 10;
  const auto ds = synthetic::make_dataset(spec);
  std::vector<std::string> labels;
  for (const auto& r : ds.manifest.records()) labels.emplace_back(language_name(r.language));
  GridSpec g = GridSpec::default_grid();
  g.kernels = {kernel};
  g.pivots = {0};
  g.metric_sets = {MetricSet{Metric::kEuclidean}};
  const auto grid = g.expand();
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(ds.sequences, labels, grid, GridSearchOptions{}));
}
BENCHMARK_CAPTURE(BM_GridSearchGroup, linear, Kernel::linear())->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK_CAPTURE(BM_GridSearchGroup, rbf, Kernel::rbf(0.1))->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
