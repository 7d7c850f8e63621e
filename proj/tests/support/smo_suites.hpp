#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lipfuse/smo.hpp"
#include "problems.hpp"
#include "qp_oracle.hpp"

namespace lipfuse::testing {

struct SuiteResult {
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation / deviation seen
  std::string first_failure;
  bool ok() const { return cases > 0 && failures == 0; }
};

inline Kernel suite_kernel(int i) {
  switch (i % 3) {
    case 0: return Kernel::linear();
    case 1: return Kernel::rbf(0.5);
    default: return Kernel::polynomial(0.5, 2, 1.0);
  }
}

/// KKT audit on `problems` random problems of up to 200 points, half
/// separable, cycling through kernels and C values.
inline SuiteResult kkt_suite(int problems, std::uint64_t seed, double tolerance = 1e-3) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> size(10, 200), dim(2, 8);
  const double Cs[] = {0.1, 1.0, 10.0, 100.0};
  SuiteResult r;
  for (int i = 0; i < problems; ++i) {
    const auto prob = random_problem(gen, size(gen), dim(gen), i % 2 == 0);
    SmoParams params;
    params.kernel = suite_kernel(i);
    params.C = Cs[i % 4];
    params.tolerance = tolerance;
    params.max_passes = 10000;
    const auto gram = gram_matrix(prob.x, params.kernel);
    const auto sol = smo_solve(gram, prob.y, params);
    const auto audit = kkt_audit(gram, prob.y, sol.alpha, sol.bias, params.C);
    ++r.cases;
    r.worst = std::max(r.worst, audit.max_violation);
    const bool ok = sol.status == SmoStatus::kConverged && audit.passed(tolerance) &&
                    std::abs(audit.alpha_y_sum) <= 1e-9 * params.C * static_cast<double>(prob.y.size());
    if (!ok) {
      if (r.failures++ == 0) {
        r.first_failure = "problem " + std::to_string(i) + " (" + params.kernel.to_string() +
                          ", C=" + std::to_string(params.C) + ", n=" + std::to_string(prob.y.size()) +
                          "): violation " + std::to_string(audit.max_violation);
      }
    }
  }
  return r;
}

/// Decision values of SMO vs. the brute-force dual on every problem size
/// 2..6, `per_size` random problems each. Kernels are strictly positive
/// definite on generic points (rbf, polynomial with coef0 > 0, linear in
/// six dimensions) so the optimum is unique.
inline SuiteResult oracle_suite(int per_size, std::uint64_t seed, double tolerance = 1e-6) {
  std::mt19937_64 gen(seed);
  const double Cs[] = {0.05, 0.5, 1.0, 5.0, 1e3};
  SuiteResult r;
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < per_size; ++i) {
      const auto prob = random_problem(gen, n, 6, i % 2 == 0);
      SmoParams params;
      params.kernel = suite_kernel(i);
      params.C = Cs[i % 5];
      params.tolerance = 1e-11;
      params.max_passes = 10000;
      const auto gram = gram_matrix(prob.x, params.kernel);
      const auto sol = smo_solve(gram, prob.y, params);
      const auto ref = brute_force_dual(gram, prob.y, params.C);
      ++r.cases;
      if (!ref.found) {
        if (r.failures++ == 0) r.first_failure = "oracle found no feasible point";
        continue;
      }
      const auto f_smo = training_decisions(gram, prob.y, sol.alpha, sol.bias);
      const auto f_ref = training_decisions(gram, prob.y, ref.alpha, ref.bias);
      double dev = 0.0;
      for (std::size_t j = 0; j < f_smo.size(); ++j) dev = std::max(dev, std::abs(f_smo[j] - f_ref[j]));
      r.worst = std::max(r.worst, dev);
      if (dev > tolerance || sol.status != SmoStatus::kConverged) {
        if (r.failures++ == 0) {
          r.first_failure = "n=" + std::to_string(n) + " case " + std::to_string(i) + " (" +
                            params.kernel.to_string() + ", C=" + std::to_string(params.C) +
                            "): deviation " + std::to_string(dev);
        }
      }
    }
  }
  return r;
}

/// The four XOR corners, replicated with small jitter.
inline BinaryProblem xor_problem(int copies = 10, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  BinaryProblem p;
  p.x.resize(4 * copies, 2);
  const double corners[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (int i = 0; i < 4 * copies; ++i) {
    const int c = i % 4;
    p.x(i, 0) = corners[c][0] + jitter(gen);
    p.x(i, 1) = corners[c][1] + jitter(gen);
    p.y.push_back(c < 2 ? -1 : 1);
  }
  return p;
}

inline double training_accuracy(const SvmBinaryModel& model, const BinaryProblem& p) {
  int correct = 0;
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    const double f = decision_value(model, {p.x.row(i).data(), static_cast<std::size_t>(p.x.cols())});
    correct += ((f >= 0 ? 1 : -1) == p.y[static_cast<std::size_t>(i)]) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(p.y.size());
}

}  // namespace lipfuse::testing
