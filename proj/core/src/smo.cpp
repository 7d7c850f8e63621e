#include "lipfuse/smo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipfuse/error.hpp"

namespace lipfuse {

std::string_view smo_status_name(SmoStatus s) {
  return s == SmoStatus::kConverged ? "converged" : "max_passes_reached";
}

namespace {

constexpr double kTau = 1e-12;

void check_params(const SmoParams& p) {
  if (!(p.C > 0.0) || !std::isfinite(p.C)) throw InvalidArgument("C must be positive");
  if (!(p.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (p.max_passes < 1) throw InvalidArgument("max_passes must be >= 1");
}

void check_labels(std::span<const int> y) {
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw DataError("binary SVM labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw DataError("binary SVM needs at least one example of each label");
}

bool in_up(double a, int y, double c) { return (y == 1 && a < c) || (y == -1 && a > 0.0); }
bool in_low(double a, int y, double c) { return (y == 1 && a > 0.0) || (y == -1 && a < c); }

// Bias from the gradient G = Q alpha - e: the mean of -y_i G_i over free
// multipliers, or the midpoint of the feasible interval when none are free.
double compute_bias(std::span<const double> alpha, std::span<const int> y,
                    std::span<const double> grad, double c) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_n = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double yg = y[i] * grad[i];
    if (alpha[i] >= c) {
      if (y[i] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[i] <= 0.0) {
      if (y[i] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      free_sum += yg;
      ++free_n;
    }
  }
  const double rho = free_n > 0 ? free_sum / static_cast<double>(free_n) : (ub + lb) / 2.0;
  return -rho;
}

double max_violation(std::span<const double> alpha, std::span<const int> y,
                     std::span<const double> grad, double bias, double c) {
  // y_i f(x_i) - 1 = G_i + y_i * bias
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double m = grad[i] + y[i] * bias;
    double v = 0.0;
    if (alpha[i] <= 0.0) {
      v = std::max(0.0, -m);
    } else if (alpha[i] >= c) {
      v = std::max(0.0, m);
    } else {
      v = std::abs(m);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

SmoSolution smo_solve(const Eigen::MatrixXd& gram, std::span<const int> y, const SmoParams& params) {
  check_params(params);
  check_labels(y);
  const auto n = y.size();
  if (static_cast<std::size_t>(gram.rows()) != n || static_cast<std::size_t>(gram.cols()) != n) {
    throw DataError("Gram matrix shape does not match the label count");
  }
  if (!gram.allFinite()) throw DataError("Gram matrix has non-finite entries");

  const double c = params.C;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const std::size_t max_iter =
      static_cast<std::size_t>(params.max_passes) * std::max<std::size_t>(n, 1);

  SmoSolution sol;
  sol.status = SmoStatus::kMaxPassesReached;
  Eigen::VectorXd diag = gram.diagonal();
  const double* kd = diag.data();

  // First index: maximal -y G over I_up. After the first sweep this scan is
  // fused into the gradient update.
  double gmax = -std::numeric_limits<double>::infinity();
  std::ptrdiff_t i = -1;
  for (std::size_t t = 0; t < n; ++t) {
    if (in_up(alpha[t], y[t], c) && -y[t] * grad[t] > gmax) {
      gmax = -y[t] * grad[t];
      i = static_cast<std::ptrdiff_t>(t);
    }
  }

  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // Second index: best second-order decrease among violating I_low members.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    const double* ki = i >= 0 ? gram.col(static_cast<Eigen::Index>(i)).data() : nullptr;
    const double kii = i >= 0 ? kd[i] : 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(alpha[t], y[t], c)) continue;
      const double yg = y[t] * grad[t];
      gmax2 = std::max(gmax2, yg);
      if (i < 0) continue;
      const double b = gmax + yg;
      if (b > 0.0) {
        double a = kii + kd[t] - 2.0 * ki[t];
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj < best) {
          best = obj;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < params.tolerance) {
      sol.status = SmoStatus::kConverged;
      break;
    }

    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    const double* kj = gram.col(static_cast<Eigen::Index>(j)).data();
    const double old_ai = alpha[ui];
    const double old_aj = alpha[uj];
    const double qij = y[ui] * y[uj] * ki[uj];
    double quad = kii + kd[uj] - 2.0 * y[ui] * y[uj] * qij;
    if (quad <= 0.0) quad = kTau;

    double& ai = alpha[ui];
    double& aj = alpha[uj];
    if (y[ui] != y[uj]) {
      const double delta = (-grad[ui] - grad[uj]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      const double delta = (grad[ui] - grad[uj]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double si = y[ui] * (ai - old_ai);
    const double sj = y[uj] * (aj - old_aj);
    gmax = -std::numeric_limits<double>::infinity();
    i = -1;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * si + kj[t] * sj);
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(alpha[t], y[t], c) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
  }

  sol.iterations = iter;
  sol.bias = compute_bias(alpha, y, grad, c);
  sol.kkt_violation = max_violation(alpha, y, grad, sol.bias, c);
  sol.alpha = std::move(alpha);
  return sol;
}

Eigen::MatrixXd gram_matrix(const RowMatrix& x, const Kernel& kernel) {
  const Eigen::MatrixXd dots = x * x.transpose();
  if (kernel.kind == KernelKind::kLinear) return dots;
  Eigen::MatrixXd k(dots.rows(), dots.cols());
  for (Eigen::Index i = 0; i < dots.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = kernel.from_dot(dots(i, j), dots(i, i), dots(j, j));
    }
  }
  return k;
}

SvmBinaryModel make_binary_model(const RowMatrix& x, std::span<const int> y,
                                 const SmoSolution& solution, const SmoParams& params) {
  SvmBinaryModel model;
  model.kernel = params.kernel;
  model.C = params.C;
  model.tolerance = params.tolerance;
  model.bias = solution.bias;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < solution.alpha.size(); ++i) {
    if (solution.alpha[i] > 0.0) {
      keep.push_back(static_cast<Eigen::Index>(i));
      model.coefficients.push_back(solution.alpha[i] * y[i]);
    }
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    model.support_vectors.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]);
  }
  return model;
}

SmoResult smo_train(const RowMatrix& x, std::span<const int> y, const SmoParams& params) {
  check_params(params);
  params.kernel.validate();
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DataError("feature rows and label count differ");
  }
  check_labels(y);
  if (!x.allFinite()) throw DataError("non-finite feature value");
  SmoResult result;
  result.solution = smo_solve(gram_matrix(x, params.kernel), y, params);
  result.model = make_binary_model(x, y, result.solution, params);
  return result;
}

double decision_value(const SvmBinaryModel& model, std::span<const double> x) {
  if (x.size() != model.feature_len()) {
    throw DataError("decision_value: expected " + std::to_string(model.feature_len()) +
                    " features, got " + std::to_string(x.size()));
  }
  const auto cols = static_cast<std::size_t>(model.support_vectors.cols());
  double f = model.bias;
  for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
    const std::span<const double> sv(model.support_vectors.row(static_cast<Eigen::Index>(i)).data(),
                                     cols);
    f += model.coefficients[i] * model.kernel(sv, x);
  }
  return f;
}

KktAudit kkt_audit(const Eigen::MatrixXd& gram, std::span<const int> y,
                   std::span<const double> alpha, double bias, double C) {
  const auto n = y.size();
  KktAudit audit;
  for (std::size_t i = 0; i < n; ++i) audit.alpha_y_sum += alpha[i] * y[i];
  for (std::size_t i = 0; i < n; ++i) {
    double f = bias;
    for (std::size_t j = 0; j < n; ++j) {
      f += alpha[j] * y[j] * gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    }
    const double m = y[i] * f - 1.0;
    double v = 0.0;
    if (alpha[i] <= 0.0) {
      v = std::max(0.0, -m);
    } else if (alpha[i] >= C) {
      v = std::max(0.0, m);
    } else {
      v = std::abs(m);
    }
    audit.max_violation = std::max(audit.max_violation, v);
  }
  return audit;
}

}  // namespace lipfuse
