#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lipfuse/matrix.hpp"

namespace lipfuse::testing {

struct BinaryProblem {
  RowMatrix x;
  std::vector<int> y;
};

/// Separable: labels from a random hyperplane, points within 0.1 of it
/// rejected. Non-separable: two unit-variance Gaussian blobs whose means
/// are 1.0 apart, so the classes overlap. Both classes always occur.
inline BinaryProblem random_problem(std::mt19937_64& gen, int n, int d, bool separable) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  BinaryProblem p;
  p.x.resize(n, d);
  p.y.resize(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(d));
  double norm = 0.0;
  for (auto& v : w) {
    v = normal(gen);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;

  for (int i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;  // balanced, both classes present
    if (separable) {
      for (;;) {
        double proj = 0.0;
        for (int j = 0; j < d; ++j) {
          p.x(i, j) = unit(gen);
          proj += w[static_cast<std::size_t>(j)] * p.x(i, j);
        }
        if (std::abs(proj) < 0.1) continue;
        if ((proj > 0) != (label > 0)) {
          for (int j = 0; j < d; ++j) p.x(i, j) = -p.x(i, j);
        }
        break;
      }
    } else {
      for (int j = 0; j < d; ++j) p.x(i, j) = normal(gen) + (j == 0 ? 0.5 * label : 0.0);
    }
    p.y[static_cast<std::size_t>(i)] = label;
  }
  return p;
}

}  // namespace lipfuse::testing
