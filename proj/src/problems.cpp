#include "covscan/problems.hpp"

#include <cmath>
#include <numbers>

#include "covscan/errors.hpp"

namespace covscan {

namespace {

void apply_scale(ProblemSpec& p, Scale scale) {
  const int n = scale == Scale::desk ? 200 : 500;
  p.collocation_count = n;
  p.test_count = n;
  p.grid.count = scale == Scale::desk ? 300 : 500;
}

ConstraintSite dirichlet(double x) { return {x, LinearOperator::identity(), 0.0}; }

// Bisection on a sign change of f over [lo, hi]; runs to machine precision.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double param(const ProblemSpec& p, const std::string& key) {
  const auto it = p.parameters.find(key);
  return it == p.parameters.end() ? 1.0 : it->second;
}

}  // namespace

ProblemSpec laplace_dirichlet(Scale scale) {
  ProblemSpec p;
  p.id = "laplace";
  p.mode = ProblemMode::eigen;
  p.interior_op = LinearOperator({{2, -1.0}, {0, -CoeffExpr::lambda()}});
  p.boundary = {dirichlet(0.0), dirichlet(1.0)};
  p.schedule = {150.0, 0.5, 1.0};
  p.jitter = 1e-8;
  p.grid = {GridKind::log, 1.0, 1000.0, 300, 1.0};
  apply_scale(p, scale);
  return p;
}

ProblemSpec cantilever(Scale scale) {
  ProblemSpec p;
  p.id = "cantilever";
  p.mode = ProblemMode::eigen;
  p.interior_op = LinearOperator({{4, 1.0}, {0, -CoeffExpr::lambda()}});
  p.boundary = {
      dirichlet(0.0),
      {0.0, LinearOperator::derivative(1), 0.0},
      {1.0, LinearOperator::derivative(2), 0.0},
      {1.0, LinearOperator::derivative(3), 0.0},
  };
  p.schedule = {1000.0, 0.25, 1.0};
  p.jitter = 1e-5;
  p.grid = {GridKind::power_root, 1.0, std::pow(15.0, 4), 300, 4.0};
  // Peaks of the beam are broader and lower than the second-order problems'.
  p.prominence_decades = 1.0;
  apply_scale(p, scale);
  return p;
}

ProblemSpec loaded_string(double mass, double kappa, Scale scale) {
  if (!(mass > 0.0) || !(kappa > 0.0)) {
    throw InvalidArgument("loaded_string: mass and kappa must be positive");
  }
  const CoeffExpr lam = CoeffExpr::lambda();
  ProblemSpec p;
  p.id = "loaded-string";
  p.mode = ProblemMode::eigen;
  p.interior_op = LinearOperator({{2, -1.0}, {0, -lam}});
  p.boundary = {
      dirichlet(0.0),
      {1.0, LinearOperator({{1, 1.0}, {0, lam * kappa * mass / (lam - kappa)}}), 0.0},
  };
  p.schedule = {150.0, 0.5, 1.0};
  p.jitter = 1e-8;
  p.grid = {GridKind::log, 10.0, 500.0, 300, 1.0};
  p.parameters = {{"mass", mass}, {"kappa", kappa}};
  apply_scale(p, scale);
  return p;
}

ProblemSpec poisson_bvp_demo() {
  ProblemSpec p;
  p.id = "poisson-demo";
  p.mode = ProblemMode::bvp;
  p.interior_op = LinearOperator({{2, -1.0}});
  p.boundary = {dirichlet(0.0), dirichlet(1.0)};
  p.collocation_count = 8;
  p.test_count = 200;
  p.schedule = {150.0, 0.0, 1.0};
  p.fixed_length_scale = 0.2;
  p.jitter = 1e-8;
  p.source.constant = 10.0;
  return p;
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids = {"laplace", "cantilever", "loaded-string",
                                               "poisson-demo"};
  return ids;
}

ProblemSpec make_preset(std::string_view id, Scale scale) {
  if (id == "laplace") return laplace_dirichlet(scale);
  if (id == "cantilever") return cantilever(scale);
  if (id == "loaded-string") return loaded_string(1.0, 1.0, scale);
  if (id == "poisson-demo") return poisson_bvp_demo();
  throw InvalidArgument("unknown problem id '" + std::string(id) + "'");
}

std::vector<double> laplace_eigenvalues(int count) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  std::vector<double> v;
  for (int n = 1; n <= count; ++n) {
    const double a = n * std::numbers::pi;
    v.push_back(a * a);
  }
  return v;
}

double laplace_eigenfunction(int n, double x) { return std::sin(n * std::numbers::pi * x); }

double cantilever_determinant(double alpha) { return std::cosh(alpha) * std::cos(alpha); }

std::vector<double> cantilever_alphas(int count) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  // cos(a) + 1/cosh(a) has the same roots and stays O(1).
  auto f = [](double a) { return std::cos(a) + 1.0 / std::cosh(a); };
  std::vector<double> roots;
  const double step = 0.01;
  const double a_max = (count + 2) * std::numbers::pi;
  double a0 = step;
  double f0 = f(a0);
  while (static_cast<int>(roots.size()) < count) {
    const double a1 = a0 + step;
    if (a1 > a_max) throw BracketNotFound("cantilever_alphas: ran out of brackets");
    const double f1 = f(a1);
    if ((f0 < 0.0) != (f1 < 0.0)) roots.push_back(bisect(f, a0, a1));
    a0 = a1;
    f0 = f1;
  }
  return roots;
}

double cantilever_mode(double alpha, double x, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 4) throw InvalidArgument("cantilever_mode: order 0..4");
  const double s = (std::cosh(alpha) + std::cos(alpha)) / (std::sinh(alpha) + std::sin(alpha));
  const double t = alpha * x;
  const bool even = deriv_order % 2 == 0;
  const double ch = even ? std::cosh(t) : std::sinh(t);
  const double sh = even ? std::sinh(t) : std::cosh(t);
  double c = 0.0;
  double sn = 0.0;
  switch (deriv_order % 4) {
    case 0: c = std::cos(t); sn = std::sin(t); break;
    case 1: c = -std::sin(t); sn = std::cos(t); break;
    case 2: c = -std::cos(t); sn = -std::sin(t); break;
    default: c = std::sin(t); sn = -std::cos(t); break;
  }
  return std::pow(alpha, deriv_order) * (ch - c - s * (sh - sn));
}

double loaded_string_characteristic(double lambda, double mass, double kappa) {
  if (lambda == kappa) {
    throw PoleError("loaded-string characteristic function has a pole at lambda = kappa", lambda);
  }
  const double s = std::sqrt(lambda);
  return s * std::cos(s) + lambda * kappa * mass / (lambda - kappa) * std::sin(s);
}

std::vector<double> loaded_string_roots(double mass, double kappa, double lo, double hi,
                                        int aux_points) {
  if (!(mass > 0.0) || !(kappa > 0.0)) throw InvalidArgument("mass and kappa must be positive");
  if (!(lo > 0.0 && lo < hi) || aux_points < 2) {
    throw InvalidArgument("loaded_string_roots: need 0 < lo < hi and >= 2 points");
  }
  // Multiplying by (lambda - kappa) removes the pole without adding roots
  // away from lambda = kappa.
  auto g = [&](double l) {
    const double s = std::sqrt(l);
    return (l - kappa) * s * std::cos(s) + l * kappa * mass * std::sin(s);
  };
  auto not_pole = [&](double r) { return std::abs(r - kappa) > 1e-12 * kappa; };
  const auto grid = linspace(lo, hi, aux_points);
  std::vector<double> roots;
  double g0 = g(grid[0]);
  if (g0 == 0.0 && not_pole(grid[0])) roots.push_back(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double g1 = g(grid[i]);
    if (g1 == 0.0) {
      if (not_pole(grid[i])) roots.push_back(grid[i]);
    } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
      const double r = bisect(g, grid[i - 1], grid[i]);
      if (not_pole(r)) roots.push_back(r);
    }
    g0 = g1;
  }
  return roots;
}

bool has_reference(const ProblemSpec& problem) {
  return problem.id == "laplace" || problem.id == "cantilever" || problem.id == "loaded-string";
}

std::vector<double> reference_eigenvalues(const ProblemSpec& problem, int count) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  if (problem.id == "laplace") return laplace_eigenvalues(count);
  if (problem.id == "cantilever") {
    auto v = cantilever_alphas(count);
    for (auto& a : v) a = std::pow(a, 4);
    return v;
  }
  if (problem.id == "loaded-string") {
    auto roots = loaded_string_roots(param(problem, "mass"), param(problem, "kappa"),
                                     problem.grid.lo, problem.grid.hi, 10 * problem.grid.count);
    if (static_cast<int>(roots.size()) < count) {
      throw BracketNotFound("loaded-string: only " + std::to_string(roots.size()) +
                            " roots in the searchable range");
    }
    roots.resize(static_cast<std::size_t>(count));
    return roots;
  }
  throw InvalidArgument("no reference eigenvalues for problem '" + problem.id + "'");
}

std::vector<double> reference_eigenvalues(std::string_view problem_id, int count) {
  return reference_eigenvalues(make_preset(problem_id), count);
}

std::vector<double> reference_eigenvalues_in_range(const ProblemSpec& problem) {
  const double lo = problem.grid.lo;
  const double hi = problem.grid.hi;
  if (problem.id == "loaded-string") {
    return loaded_string_roots(param(problem, "mass"), param(problem, "kappa"), lo, hi,
                               10 * problem.grid.count);
  }
  if (!has_reference(problem)) {
    throw InvalidArgument("no reference eigenvalues for problem '" + problem.id + "'");
  }
  std::vector<double> out;
  for (int count = 1;; ++count) {
    const double v = reference_eigenvalues(problem, count).back();
    if (v > hi) break;
    if (v >= lo) out.push_back(v);
  }
  return out;
}

double poisson_exact(double x) { return -5.0 * x * x + 5.0 * x; }

}  // namespace covscan
