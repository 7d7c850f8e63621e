#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace lipfuse {

/// Reproducible pseudorandom source used by every seeded operation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Derived draws do not use std:: distributions (their algorithms
/// are implementation-defined):
///   - uniform_index(n): rejection sampling on the raw 64-bit output,
///     accepting x < 2^64 - (2^64 mod n), returning x mod n.
///   - uniform01(): (x >> 11) * 2^-53, in [0, 1).
///   - shuffle(): Fisher-Yates from the back, j = uniform_index(i + 1).
/// Any implementation following these rules reproduces the same splits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform real in [0, 1).
  double uniform01();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lipfuse
