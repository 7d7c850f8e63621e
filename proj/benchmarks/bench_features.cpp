#include <benchmark/benchmark.h>

#include "lipfuse/geometry.hpp"
#include "lipfuse/synthetic.hpp"

namespace {

using namespace lipfuse;

const synthetic::Dataset& dataset() {
  static const auto ds = [] {
    synthetic::DatasetSpec spec;
    spec.languages = 4;
    spec.subjects_per_language = 10;
    return synthetic::make_dataset(spec);
  }();
  return ds;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const FeatureConfig cfg{0, state.range(0) == 3 ? MetricSet::all() : MetricSet{Metric::kEuclidean}, 250};
  const auto& seq = dataset().sequences.front();
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(seq, cfg));
}
BENCHMARK(BM_ExtractFeatures)->Arg(1)->Arg(3);

void BM_FeatureMatrix(benchmark::State& state) {
  const FeatureConfig cfg{0, MetricSet::all(), 250};
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_feature_matrix(dataset().sequences, cfg, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_FeatureMatrix)->Arg(1)->Arg(0);

void BM_ParseLandmarks(benchmark::State& state) {
  const auto text = landmarks_to_json(dataset().sequences.front());
  for (auto _ : state) benchmark::DoNotOptimize(parse_landmarks(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLandmarks);

}  // namespace
