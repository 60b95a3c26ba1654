#pragma once

#include <array>
#include <string>
#include <vector>

#include "covscan/coeff_expr.hpp"
#include "covscan/kernel.hpp"

namespace covscan {

struct OperatorTerm {
  int deriv_order = 0;
  CoeffExpr coeff = CoeffExpr(1.0);

  friend bool operator==(const OperatorTerm&, const OperatorTerm&) = default;
};

/// sum_i coeff_i(lambda) * d^{deriv_order_i}/dx^{deriv_order_i}
class LinearOperator {
 public:
  LinearOperator() = default;
  /// Throws InvalidArgument for an empty list, repeated orders or orders > 4.
  explicit LinearOperator(std::vector<OperatorTerm> terms);

  static LinearOperator identity();
  static LinearOperator derivative(int order, CoeffExpr coeff = CoeffExpr(1.0));

  const std::vector<OperatorTerm>& terms() const { return terms_; }
  int max_order() const;
  bool depends_on_lambda() const;

  /// Coefficients indexed by derivative order at this lambda (0 where absent).
  /// Propagates PoleError.
  std::array<double, kMaxArgOrder + 1> coefficients(double lambda) const;

  std::string to_string() const;

  friend bool operator==(const LinearOperator&, const LinearOperator&) = default;

 private:
  std::vector<OperatorTerm> terms_;
};

/// One constraint row: `op` applied to u at `location` equals `rhs`.
struct ConstraintSite {
  double location = 0.0;
  LinearOperator op = LinearOperator::identity();
  double rhs = 0.0;

  friend bool operator==(const ConstraintSite&, const ConstraintSite&) = default;
};

/// Weights such that op_left op_right' k(x, x2) = sum_n w[n] g^(n)(x - x2),
/// with op_right acting on the second argument.
DerivativeWeights pair_weights(const std::array<double, kMaxArgOrder + 1>& left,
                               const std::array<double, kMaxArgOrder + 1>& right);

/// sum_i sum_j c_i(lambda) c_j(lambda) d^{d_i}_x d^{d_j}_{x2} k(x, x2).
/// Term-by-term reference path through kernel_mixed_derivative.
double apply_bilinear(const LinearOperator& op_left, const LinearOperator& op_right,
                      const KernelSpec& spec, double lambda, double x, double x2);

}  // namespace covscan
