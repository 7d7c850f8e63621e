#include "lipfuse/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "io_util.hpp"
#include "lipfuse/error.hpp"

namespace lipfuse {

std::string_view kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kLinear: return "linear";
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kPolynomial: return "polynomial";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "polynomial" || name == "poly") return KernelKind::kPolynomial;
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

void Kernel::validate() const {
  if (kind == KernelKind::kLinear) return;
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("kernel gamma must be positive");
  }
  if (kind == KernelKind::kPolynomial) {
    if (degree < 1) throw InvalidArgument("polynomial degree must be >= 1");
    if (!std::isfinite(coef0)) throw InvalidArgument("polynomial coef0 must be finite");
  }
}

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != b.size()) throw DataError("kernel operands differ in length");
  if (kind == KernelKind::kRbf) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sq += d * d;
    }
    return std::exp(-gamma * sq);
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  if (kind == KernelKind::kLinear) return dot;
  return std::pow(gamma * dot + coef0, degree);
}

double Kernel::from_dot(double dot, double sq_a, double sq_b) const {
  switch (kind) {
    case KernelKind::kLinear: return dot;
    case KernelKind::kRbf: return std::exp(-gamma * std::max(0.0, sq_a + sq_b - 2.0 * dot));
    case KernelKind::kPolynomial: return std::pow(gamma * dot + coef0, degree);
  }
  return 0.0;
}

std::string Kernel::to_string() const {
  switch (kind) {
    case KernelKind::kLinear: return "linear";
    case KernelKind::kRbf: return "rbf(gamma=" + detail::format_double(gamma) + ")";
    case KernelKind::kPolynomial:
      return "poly(gamma=" + detail::format_double(gamma) + ",degree=" + std::to_string(degree) +
             ",coef0=" + detail::format_double(coef0) + ")";
  }
  return "?";
}

bool operator==(const Kernel& a, const Kernel& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case KernelKind::kLinear: return true;
    case KernelKind::kRbf: return a.gamma == b.gamma;
    case KernelKind::kPolynomial:
      return a.gamma == b.gamma && a.degree == b.degree && a.coef0 == b.coef0;
  }
  return false;
}

}  // namespace lipfuse
