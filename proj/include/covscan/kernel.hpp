#pragma once

// Squared-exponential covariance and its mixed partial derivatives.
//
// For the stationary kernel k(x, x2) = g(x - x2) with
//   g(r) = variance * exp(-r^2 / (2 l^2))
// every mixed derivative reduces to a derivative of g:
//   d^a/dx^a d^b/dx2^b k(x, x2) = (-1)^b g^(a+b)(x - x2).
// g^(n) follows the Hermite-type recurrence
//   g^(n)(r) = -(r g^(n-1)(r) + (n-1) g^(n-2)(r)) / l^2.

#include <array>
#include <span>

#include <Eigen/Core>

namespace covscan {

/// Largest derivative order accepted in either kernel argument.
inline constexpr int kMaxArgOrder = 4;
/// Largest total derivative order a + b.
inline constexpr int kMaxTotalOrder = 2 * kMaxArgOrder;

struct KernelSpec {
  double variance = 1.0;
  double length_scale = 1.0;

  /// Throws InvalidArgument unless both hyperparameters are finite and > 0.
  void validate() const;
};

struct DerivOrders {
  int a = 0;  // order in the first argument
  int b = 0;  // order in the second argument
};

double eval_kernel(const KernelSpec& spec, double x, double x2);

/// d^a/dx^a d^b/dx2^b k(x, x2). Throws UnsupportedOrder outside 0..4.
double kernel_mixed_derivative(const KernelSpec& spec, DerivOrders orders, double x, double x2);

/// g^(0..max_order)(r), computed with the exact recurrence.
std::array<double, kMaxTotalOrder + 1> derivative_stack(const KernelSpec& spec, double r,
                                                        int max_order);

/// Per-total-order weights of a linear combination of kernel derivatives:
/// value(x, x2) = sum_n weight[n] * g^(n)(x - x2).
/// Mixed derivative signs (-1)^b are already folded into the weights.
struct DerivativeWeights {
  std::array<double, kMaxTotalOrder + 1> weight{};
  int max_order = 0;

  static DerivativeWeights single(DerivOrders orders);
};

/// out[j] = sum_n w[n] g^(n)(x - x2[j]); dispatches to the active SIMD variant.
void weighted_derivative_row(const KernelSpec& spec, const DerivativeWeights& w, double x,
                             std::span<const double> x2, std::span<double> out);

/// Gram matrix G(i, j) = kernel_mixed_derivative(spec, orders, X[i], X2[j]).
Eigen::MatrixXd gram(const KernelSpec& spec, DerivOrders orders, std::span<const double> X,
                     std::span<const double> X2);

}  // namespace covscan
