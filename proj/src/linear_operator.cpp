#include "covscan/linear_operator.hpp"

#include <algorithm>

#include "covscan/errors.hpp"

namespace covscan {

LinearOperator::LinearOperator(std::vector<OperatorTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("linear operator needs at least one term");
  std::array<bool, kMaxArgOrder + 1> seen{};
  for (const auto& t : terms_) {
    if (t.deriv_order < 0 || t.deriv_order > kMaxArgOrder) {
      throw InvalidArgument("operator term derivative order " + std::to_string(t.deriv_order) +
                            " outside 0.." + std::to_string(kMaxArgOrder));
    }
    if (seen[static_cast<std::size_t>(t.deriv_order)]) {
      throw InvalidArgument("operator terms must have distinct derivative orders");
    }
    seen[static_cast<std::size_t>(t.deriv_order)] = true;
  }
}

LinearOperator LinearOperator::identity() { return LinearOperator({OperatorTerm{0, 1.0}}); }

LinearOperator LinearOperator::derivative(int order, CoeffExpr coeff) {
  return LinearOperator({OperatorTerm{order, std::move(coeff)}});
}

int LinearOperator::max_order() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.deriv_order);
  return m;
}

bool LinearOperator::depends_on_lambda() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const OperatorTerm& t) { return t.coeff.depends_on_lambda(); });
}

std::array<double, kMaxArgOrder + 1> LinearOperator::coefficients(double lambda) const {
  std::array<double, kMaxArgOrder + 1> c{};
  for (const auto& t : terms_) c[static_cast<std::size_t>(t.deriv_order)] = t.coeff.eval(lambda);
  return c;
}

std::string LinearOperator::to_string() const {
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += " + ";
    s += t.coeff.to_string();
    if (t.deriv_order > 0) s += "*D" + std::to_string(t.deriv_order);
  }
  return s;
}

DerivativeWeights pair_weights(const std::array<double, kMaxArgOrder + 1>& left,
                               const std::array<double, kMaxArgOrder + 1>& right) {
  DerivativeWeights w;
  for (int a = 0; a <= kMaxArgOrder; ++a) {
    const double cl = left[static_cast<std::size_t>(a)];
    if (cl == 0.0) continue;
    for (int b = 0; b <= kMaxArgOrder; ++b) {
      const double cr = right[static_cast<std::size_t>(b)];
      if (cr == 0.0) continue;
      const double sign = (b % 2 == 0) ? 1.0 : -1.0;
      w.weight[static_cast<std::size_t>(a + b)] += sign * cl * cr;
      w.max_order = std::max(w.max_order, a + b);
    }
  }
  return w;
}

double apply_bilinear(const LinearOperator& op_left, const LinearOperator& op_right,
                      const KernelSpec& spec, double lambda, double x, double x2) {
  double sum = 0.0;
  for (const auto& ti : op_left.terms()) {
    const double ci = ti.coeff.eval(lambda);
    for (const auto& tj : op_right.terms()) {
      const double cj = tj.coeff.eval(lambda);
      sum += ci * cj * kernel_mixed_derivative(spec, {ti.deriv_order, tj.deriv_order}, x, x2);
    }
  }
  return sum;
}

}  // namespace covscan
