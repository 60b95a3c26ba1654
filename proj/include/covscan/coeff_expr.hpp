#pragma once

#include <memory>
#include <string>

namespace covscan {

/// Closed arithmetic expression in the scalar spectral parameter lambda.
///
/// Immutable value type; copies share the underlying tree. Built from
/// constants, `lambda()`, and the operators -, +, *, /. For example the
/// loaded-string boundary coefficient lambda*kappa*M/(lambda - kappa) is
///   CoeffExpr::lambda() * kappa * mass / (CoeffExpr::lambda() - kappa)
class CoeffExpr {
 public:
  enum class Kind { constant, lambda, negate, sum, product, quotient };

  /// Constant 0.
  CoeffExpr();
  /// Implicit so plain numbers can appear in expressions.
  CoeffExpr(double value);  // NOLINT(google-explicit-constructor)

  static CoeffExpr constant(double value) { return CoeffExpr(value); }
  static CoeffExpr lambda();

  /// Throws PoleError when a quotient denominator evaluates to exactly zero.
  double eval(double lambda) const;

  bool depends_on_lambda() const;

  Kind kind() const;
  /// Only meaningful for Kind::constant.
  double value() const;
  /// Operand(s); only meaningful for unary/binary kinds.
  CoeffExpr lhs() const;
  CoeffExpr rhs() const;

  std::string to_string() const;

  /// Structural equality (same tree shape and constants).
  friend bool operator==(const CoeffExpr& a, const CoeffExpr& b);

  friend CoeffExpr operator-(const CoeffExpr& a);
  friend CoeffExpr operator+(const CoeffExpr& a, const CoeffExpr& b);
  friend CoeffExpr operator-(const CoeffExpr& a, const CoeffExpr& b);
  friend CoeffExpr operator*(const CoeffExpr& a, const CoeffExpr& b);
  friend CoeffExpr operator/(const CoeffExpr& a, const CoeffExpr& b);

 private:
  struct Node;
  explicit CoeffExpr(std::shared_ptr<const Node> node);
  static CoeffExpr make(Kind kind, const CoeffExpr& a, const CoeffExpr* b);
  std::shared_ptr<const Node> node_;
};

}  // namespace covscan
