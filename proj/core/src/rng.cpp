#include "lipfuse/rng.hpp"

#include <limits>

#include "lipfuse/error.hpp"

namespace lipfuse {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) {
    throw InvalidArgument("uniform_index: n must be positive");
  }
  // 2^64 mod n, computed without 128-bit arithmetic.
  const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
  std::uint64_t x = engine_();
  // rem == 0 means n divides 2^64; every draw is accepted.
  while (rem != 0 && x > limit) {
    x = engine_();
  }
  return x % n;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace lipfuse
