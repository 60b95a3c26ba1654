#include "covscan/problem.hpp"

#include <algorithm>
#include <cmath>

#include "covscan/errors.hpp"
#include "covscan/scan.hpp"

namespace covscan {

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("linspace: count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
  v.back() = hi;
  return v;
}

void LambdaGrid::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw InvalidArgument("lambda grid requires finite lo < hi");
  }
  if (count < 2) throw InvalidArgument("lambda grid count must be >= 2");
  if (kind == GridKind::log && lo <= 0.0) throw InvalidArgument("log lambda grid requires lo > 0");
  if (kind == GridKind::power_root) {
    if (!(root > 0.0 && std::isfinite(root))) {
      throw InvalidArgument("power_root grid requires a positive root");
    }
    if (lo < 0.0) throw InvalidArgument("power_root grid requires lo >= 0");
  }
}

void HyperSchedule::validate() const {
  if (!(C > 0.0 && std::isfinite(C))) throw InvalidArgument("schedule C must be positive");
  if (!(exponent >= 0.0 && std::isfinite(exponent))) {
    throw InvalidArgument("schedule exponent must be nonnegative");
  }
  if (!(variance > 0.0 && std::isfinite(variance))) {
    throw InvalidArgument("schedule variance must be positive");
  }
}

double SourceTerm::operator()(double x) const {
  if (table.empty()) return constant;
  if (x <= table.front().first) return table.front().second;
  if (x >= table.back().first) return table.back().second;
  const auto it = std::upper_bound(table.begin(), table.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
  const auto& [x1, f1] = *it;
  const auto& [x0, f0] = *(it - 1);
  return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
}

void ProblemSpec::validate() const {
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && x_lo < x_hi)) {
    throw InvalidArgument("domain requires finite x_lo < x_hi");
  }
  if (mode == ProblemMode::eigen && collocation_count < 1) {
    throw InvalidArgument("eigen mode requires at least one collocation point");
  }
  if (collocation_count < 0) throw InvalidArgument("collocation count must be >= 0");
  if (test_count < 2) throw InvalidArgument("test count must be >= 2");
  if (!(jitter >= 0.0 && std::isfinite(jitter))) throw InvalidArgument("jitter must be >= 0");
  if (!(rcond > 0.0 && std::isfinite(rcond))) throw InvalidArgument("rcond must be > 0");
  if (!(prominence_decades > 0.0)) throw InvalidArgument("prominence must be > 0");
  schedule.validate();
  if (fixed_length_scale && !(*fixed_length_scale > 0.0 && std::isfinite(*fixed_length_scale))) {
    throw InvalidArgument("fixed length scale must be positive");
  }
  if (interior_op.terms().empty()) throw InvalidArgument("interior operator is empty");
  for (const auto& site : boundary) {
    if (!(site.location >= x_lo && site.location <= x_hi)) {
      throw InvalidArgument("boundary site outside the domain");
    }
    if (site.op.terms().empty()) throw InvalidArgument("boundary operator is empty");
  }
  if (mode == ProblemMode::eigen) {
    grid.validate();
  } else {
    if (!fixed_length_scale) throw InvalidArgument("bvp mode requires a fixed length scale");
    if (interior_op.depends_on_lambda()) {
      throw InvalidArgument("bvp mode operators must not depend on lambda");
    }
    for (const auto& site : boundary) {
      if (site.op.depends_on_lambda()) {
        throw InvalidArgument("bvp mode operators must not depend on lambda");
      }
    }
  }
}

std::vector<double> ProblemSpec::collocation_points() const {
  if (collocation_count == 0) return {};
  if (mode == ProblemMode::eigen) return linspace(x_lo, x_hi, collocation_count);
  const double h = (x_hi - x_lo) / static_cast<double>(collocation_count + 1);
  std::vector<double> x(static_cast<std::size_t>(collocation_count));
  for (int i = 0; i < collocation_count; ++i) x[static_cast<std::size_t>(i)] = x_lo + h * (i + 1);
  return x;
}

std::vector<double> ProblemSpec::test_points() const { return linspace(x_lo, x_hi, test_count); }

KernelSpec ProblemSpec::kernel_at(double lambda) const {
  KernelSpec k;
  k.variance = schedule.variance;
  k.length_scale =
      fixed_length_scale ? *fixed_length_scale : length_scale(schedule, lambda, collocation_count);
  return k;
}

}  // namespace covscan
