#pragma once

#include <random>
#include <vector>

#include "lipfuse/tensor.hpp"

namespace lipfuse::testing {

/// Random dtype, rank 0..4, dims 0..6 and raw random element bytes, so
/// f32/f64 payloads include NaNs, infinities and subnormals.
inline Tensor random_tensor(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dtype(0, 2), rank(0, 4), dim(0, 6), byte(0, 255);
  std::vector<std::uint64_t> dims(static_cast<std::size_t>(rank(gen)));
  for (auto& d : dims) d = static_cast<std::uint64_t>(dim(gen));
  Tensor t(static_cast<DType>(dtype(gen)), dims);
  for (auto& b : t.bytes()) b = static_cast<std::byte>(byte(gen));
  return t;
}

}  // namespace lipfuse::testing
