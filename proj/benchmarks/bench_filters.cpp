#include <benchmark/benchmark.h>

#include <random>

#include "lipfuse/preprocess.hpp"
#include "lipfuse/tensor.hpp"

namespace {

using namespace lipfuse;

Frame noisy_frame(int channels) {
  std::mt19937_64 gen(3);
  Frame f(300, 200, channels);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(gen());
  return f;
}

void BM_Grayscale(benchmark::State& state) {
  const Frame f = noisy_frame(3);
  for (auto _ : state) benchmark::DoNotOptimize(to_grayscale(f));
}
BENCHMARK(BM_Grayscale);

void BM_Sobel(benchmark::State& state) {
  const Frame f = noisy_frame(1);
  for (auto _ : state) benchmark::DoNotOptimize(sobel(f));
}
BENCHMARK(BM_Sobel);

void BM_Laplacian(benchmark::State& state) {
  const Frame f = noisy_frame(1);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
}
BENCHMARK(BM_Laplacian);

void BM_Canny(benchmark::State& state) {
  const Frame f = noisy_frame(1);
  for (auto _ : state) benchmark::DoNotOptimize(canny(f));
}
BENCHMARK(BM_Canny);

void BM_TensorEncode(benchmark::State& state) {
  std::vector<Frame> frames(static_cast<std::size_t>(state.range(0)), noisy_frame(1));
  const Tensor t = frames_to_tensor(frames);
  for (auto _ : state) benchmark::DoNotOptimize(decode_tensor(encode_tensor(t)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * t.bytes().size()));
}
BENCHMARK(BM_TensorEncode)->Arg(25)->Arg(250);

}  // namespace
