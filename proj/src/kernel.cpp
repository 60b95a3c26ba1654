#include "covscan/kernel.hpp"

#include <cmath>
#include <string>

#include "covscan/errors.hpp"
#include "covscan/simd/dispatch.hpp"

namespace covscan {

namespace {

void check_orders(DerivOrders orders) {
  if (orders.a < 0 || orders.b < 0 || orders.a > kMaxArgOrder || orders.b > kMaxArgOrder) {
    throw UnsupportedOrder("kernel derivative orders (" + std::to_string(orders.a) + ", " +
                           std::to_string(orders.b) + ") outside supported range 0.." +
                           std::to_string(kMaxArgOrder));
  }
}

}  // namespace

void KernelSpec::validate() const {
  if (!(std::isfinite(variance) && variance > 0.0)) {
    throw InvalidArgument("kernel variance must be finite and positive");
  }
  if (!(std::isfinite(length_scale) && length_scale > 0.0)) {
    throw InvalidArgument("kernel length_scale must be finite and positive");
  }
}

double eval_kernel(const KernelSpec& spec, double x, double x2) {
  const double r = x - x2;
  return spec.variance * std::exp(-(r * r) / (2.0 * spec.length_scale * spec.length_scale));
}

std::array<double, kMaxTotalOrder + 1> derivative_stack(const KernelSpec& spec, double r,
                                                        int max_order) {
  if (max_order < 0 || max_order > kMaxTotalOrder) {
    throw UnsupportedOrder("total derivative order " + std::to_string(max_order) +
                           " outside supported range 0.." + std::to_string(kMaxTotalOrder));
  }
  const double inv_l2 = 1.0 / (spec.length_scale * spec.length_scale);
  std::array<double, kMaxTotalOrder + 1> g{};
  g[0] = spec.variance * std::exp(-0.5 * r * r * inv_l2);
  if (max_order >= 1) g[1] = -r * inv_l2 * g[0];
  for (int n = 2; n <= max_order; ++n) {
    g[n] = -inv_l2 * (r * g[n - 1] + static_cast<double>(n - 1) * g[n - 2]);
  }
  return g;
}

double kernel_mixed_derivative(const KernelSpec& spec, DerivOrders orders, double x, double x2) {
  check_orders(orders);
  const int n = orders.a + orders.b;
  const auto g = derivative_stack(spec, x - x2, n);
  return (orders.b % 2 == 0) ? g[n] : -g[n];
}

DerivativeWeights DerivativeWeights::single(DerivOrders orders) {
  check_orders(orders);
  DerivativeWeights w;
  w.max_order = orders.a + orders.b;
  w.weight[w.max_order] = (orders.b % 2 == 0) ? 1.0 : -1.0;
  return w;
}

void weighted_derivative_row(const KernelSpec& spec, const DerivativeWeights& w, double x,
                             std::span<const double> x2, std::span<double> out) {
  if (x2.size() != out.size()) {
    throw InvalidArgument("weighted_derivative_row: output size mismatch");
  }
  if (w.max_order < 0 || w.max_order > kMaxTotalOrder) {
    throw UnsupportedOrder("weighted_derivative_row: total order out of range");
  }
  const double inv_l2 = 1.0 / (spec.length_scale * spec.length_scale);
  simd::row_kernel(simd::active_level())(spec.variance, inv_l2, w.weight.data(), w.max_order, x,
                                         x2.data(), out.data(), x2.size());
}

Eigen::MatrixXd gram(const KernelSpec& spec, DerivOrders orders, std::span<const double> X,
                     std::span<const double> X2) {
  if (X.empty() || X2.empty()) throw InvalidArgument("gram: grids must be nonempty");
  spec.validate();
  const auto w = DerivativeWeights::single(orders);
  // Row-major scratch so each kernel call writes a contiguous row.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> G(X.size(), X2.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    weighted_derivative_row(spec, w, X[i], X2,
                            std::span<double>(G.row(static_cast<Eigen::Index>(i)).data(),
                                              X2.size()));
  }
  return G;
}

}  // namespace covscan
