#include <benchmark/benchmark.h>

#include <random>

#include "lipfuse/smo.hpp"

namespace {

using namespace lipfuse;

struct Problem {
  RowMatrix x;
  std::vector<int> y;
};

Problem overlapping_blobs(int n, int d) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  Problem p{RowMatrix(n, d), {}};
  for (int i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    for (int j = 0; j < d; ++j) p.x(i, j) = noise(gen) + 0.8 * label;
    p.y.push_back(label);
  }
  return p;
}

void BM_SmoSolve(benchmark::State& state, Kernel kernel) {
  const auto p = overlapping_blobs(static_cast<int>(state.range(0)), 16);
  const auto gram = gram_matrix(p.x, kernel);
  SmoParams params;
  params.kernel = kernel;
  params.C = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(smo_solve(gram, p.y, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_SmoSolve, linear, Kernel::linear())->RangeMultiplier(2)->Range(50, 800);
BENCHMARK_CAPTURE(BM_SmoSolve, rbf, Kernel::rbf(0.1))->RangeMultiplier(2)->Range(50, 800);

void BM_GramMatrix(benchmark::State& state) {
  const auto p = overlapping_blobs(200, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(p.x, Kernel::rbf(0.1)));
}
BENCHMARK(BM_GramMatrix)->Arg(1750)->Arg(5250);

}  // namespace
