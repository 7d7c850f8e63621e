#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lipfuse/kernel.hpp"
#include "lipfuse/matrix.hpp"

namespace lipfuse {

struct SmoParams {
  double C = 1.0;
  Kernel kernel = Kernel::linear();
  /// Stopping tolerance on the maximal KKT violation.
  double tolerance = 1e-3;
  /// Iteration budget in sweeps; one sweep is n two-multiplier updates.
  int max_passes = 200;
};

enum class SmoStatus : std::uint8_t { kConverged, kMaxPassesReached };

std::string_view smo_status_name(SmoStatus s);

/// Dual solution over the full training set.
struct SmoSolution {
  std::vector<double> alpha;  // one per training example, in [0, C]
  double bias = 0.0;          // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  SmoStatus status = SmoStatus::kConverged;
  std::size_t iterations = 0;
  /// Largest KKT violation at the returned iterate, measured on y_i f(x_i).
  double kkt_violation = 0.0;
};

/// Sequential minimal optimization on a precomputed Gram matrix.
///
/// Each iteration updates the maximal-violating pair (first index by the
/// largest first-order violation, second by the largest second-order
/// objective decrease) in closed form and stops once the violation gap is
/// below params.tolerance. The kernel in params is ignored. Running out of
/// sweeps is reported in status with the last iterate, never thrown.
SmoSolution smo_solve(const Eigen::MatrixXd& gram, std::span<const int> y, const SmoParams& params);

struct SvmBinaryModel {
  RowMatrix support_vectors;         // one row per support vector
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;
  Kernel kernel;
  double C = 1.0;
  double tolerance = 1e-3;

  std::size_t feature_len() const { return static_cast<std::size_t>(support_vectors.cols()); }
  std::size_t support_count() const { return coefficients.size(); }
};

struct SmoResult {
  SvmBinaryModel model;
  SmoSolution solution;
  bool converged() const { return solution.status == SmoStatus::kConverged; }
};

/// Trains a binary SVM; y holds -1/+1 labels.
///
/// Throws InvalidArgument for C <= 0, tolerance <= 0, max_passes < 1 or a
/// bad kernel, and DataError for single-class input, label values other than
/// +-1, shape mismatch or non-finite features. Non-convergence is returned
/// in the result.
SmoResult smo_train(const RowMatrix& x, std::span<const int> y, const SmoParams& params);

/// Keeps the rows with alpha > 0.
SvmBinaryModel make_binary_model(const RowMatrix& x, std::span<const int> y,
                                 const SmoSolution& solution, const SmoParams& params);

/// sum_i coeff_i K(sv_i, x) + bias. Throws DataError on dimension mismatch.
double decision_value(const SvmBinaryModel& model, std::span<const double> x);

/// Gram matrix K_ij = kernel(x_i, x_j).
Eigen::MatrixXd gram_matrix(const RowMatrix& x, const Kernel& kernel);

struct KktAudit {
  double max_violation = 0.0;  // over all examples, on y_i f(x_i)
  double alpha_y_sum = 0.0;    // sum_i alpha_i y_i
  bool passed(double tolerance) const { return max_violation <= tolerance; }
};

/// Recomputes f(x_i) from scratch and measures the KKT conditions:
/// alpha = 0 needs y f >= 1, alpha = C needs y f <= 1, otherwise y f = 1.
KktAudit kkt_audit(const Eigen::MatrixXd& gram, std::span<const int> y,
                   std::span<const double> alpha, double bias, double C);

}  // namespace lipfuse
