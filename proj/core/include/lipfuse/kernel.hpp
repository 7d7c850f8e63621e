#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace lipfuse {

enum class KernelKind : std::uint8_t { kLinear, kRbf, kPolynomial };

std::string_view kernel_kind_name(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);  // throws InvalidArgument

/// linear:     <a, b>
/// rbf:        exp(-gamma * |a - b|^2)
/// polynomial: (gamma * <a, b> + coef0)^degree
struct Kernel {
  KernelKind kind = KernelKind::kLinear;
  double gamma = 1.0;
  int degree = 3;
  double coef0 = 0.0;

  static Kernel linear() { return {}; }
  static Kernel rbf(double gamma) { return {KernelKind::kRbf, gamma, 3, 0.0}; }
  static Kernel polynomial(double gamma, int degree, double coef0) {
    return {KernelKind::kPolynomial, gamma, degree, coef0};
  }

  /// Throws InvalidArgument when gamma <= 0 or degree < 1 for kinds that use them.
  void validate() const;

  double operator()(std::span<const double> a, std::span<const double> b) const;

  /// Kernel value from the inner product and the two squared norms, so a
  /// single Gram matrix of inner products serves every kernel.
  double from_dot(double dot, double sq_a, double sq_b) const;

  /// "linear", "rbf(gamma=0.1)", "poly(gamma=1,degree=3,coef0=0)".
  std::string to_string() const;

  friend bool operator==(const Kernel& a, const Kernel& b);
};

}  // namespace lipfuse
