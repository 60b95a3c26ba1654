#include "covscan/coeff_expr.hpp"

#include <charconv>
#include <cmath>

#include "covscan/errors.hpp"

namespace covscan {

struct CoeffExpr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  std::shared_ptr<const Node> lhs_operand;
  std::shared_ptr<const Node> rhs_operand;
};

namespace {

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace

CoeffExpr::CoeffExpr() : CoeffExpr(0.0) {}

CoeffExpr::CoeffExpr(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::constant;
  node->value = value;
  node_ = std::move(node);
}

CoeffExpr::CoeffExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

CoeffExpr CoeffExpr::lambda() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::lambda;
    return std::shared_ptr<const Node>(n);
  }();
  return CoeffExpr(node);
}

CoeffExpr::Kind CoeffExpr::kind() const { return node_->kind; }
double CoeffExpr::value() const { return node_->value; }
CoeffExpr CoeffExpr::lhs() const { return CoeffExpr(node_->lhs_operand); }
CoeffExpr CoeffExpr::rhs() const { return CoeffExpr(node_->rhs_operand); }

double CoeffExpr::eval(double lambda) const {
  switch (node_->kind) {
    case Kind::constant:
      return node_->value;
    case Kind::lambda:
      return lambda;
    case Kind::negate:
      return -lhs().eval(lambda);
    case Kind::sum:
      return lhs().eval(lambda) + rhs().eval(lambda);
    case Kind::product:
      return lhs().eval(lambda) * rhs().eval(lambda);
    case Kind::quotient: {
      const double den = rhs().eval(lambda);
      if (den == 0.0) {
        throw PoleError("coefficient " + to_string() + " has a pole at lambda = " +
                            format_number(lambda),
                        lambda);
      }
      return lhs().eval(lambda) / den;
    }
  }
  return 0.0;
}

bool CoeffExpr::depends_on_lambda() const {
  switch (node_->kind) {
    case Kind::constant:
      return false;
    case Kind::lambda:
      return true;
    case Kind::negate:
      return lhs().depends_on_lambda();
    default:
      return lhs().depends_on_lambda() || rhs().depends_on_lambda();
  }
}

std::string CoeffExpr::to_string() const {
  switch (node_->kind) {
    case Kind::constant:
      return format_number(node_->value);
    case Kind::lambda:
      return "lambda";
    case Kind::negate:
      return "-(" + lhs().to_string() + ")";
    case Kind::sum:
      return "(" + lhs().to_string() + " + " + rhs().to_string() + ")";
    case Kind::product:
      return "(" + lhs().to_string() + " * " + rhs().to_string() + ")";
    case Kind::quotient:
      return "(" + lhs().to_string() + " / " + rhs().to_string() + ")";
  }
  return "?";
}

bool operator==(const CoeffExpr& a, const CoeffExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case CoeffExpr::Kind::constant:
      return a.value() == b.value() || (std::isnan(a.value()) && std::isnan(b.value()));
    case CoeffExpr::Kind::lambda:
      return true;
    case CoeffExpr::Kind::negate:
      return a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

CoeffExpr CoeffExpr::make(Kind kind, const CoeffExpr& a, const CoeffExpr* b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs_operand = a.node_;
  if (b != nullptr) n->rhs_operand = b->node_;
  return CoeffExpr(std::shared_ptr<const Node>(std::move(n)));
}

CoeffExpr operator-(const CoeffExpr& a) { return CoeffExpr::make(CoeffExpr::Kind::negate, a, nullptr); }
CoeffExpr operator+(const CoeffExpr& a, const CoeffExpr& b) {
  return CoeffExpr::make(CoeffExpr::Kind::sum, a, &b);
}
CoeffExpr operator*(const CoeffExpr& a, const CoeffExpr& b) {
  return CoeffExpr::make(CoeffExpr::Kind::product, a, &b);
}
CoeffExpr operator/(const CoeffExpr& a, const CoeffExpr& b) {
  return CoeffExpr::make(CoeffExpr::Kind::quotient, a, &b);
}
CoeffExpr operator-(const CoeffExpr& a, const CoeffExpr& b) { return a + (-b); }

}  // namespace covscan
