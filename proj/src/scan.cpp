#include "covscan/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "covscan/errors.hpp"

namespace covscan {

std::vector<double> make_lambda_grid(const LambdaGrid& grid) {
  grid.validate();
  std::vector<double> v;
  switch (grid.kind) {
    case GridKind::linear:
      v = linspace(grid.lo, grid.hi, grid.count);
      break;
    case GridKind::log: {
      v = linspace(std::log(grid.lo), std::log(grid.hi), grid.count);
      for (auto& x : v) x = std::exp(x);
      break;
    }
    case GridKind::power_root: {
      v = linspace(std::pow(grid.lo, 1.0 / grid.root), std::pow(grid.hi, 1.0 / grid.root),
                   grid.count);
      for (auto& x : v) x = std::pow(x, grid.root);
      break;
    }
  }
  v.front() = grid.lo;
  v.back() = grid.hi;
  return v;
}

double length_scale(const HyperSchedule& schedule, double lambda, int N) {
  if (!(lambda > 0.0)) throw InvalidArgument("length_scale: lambda must be positive");
  if (N < 1) throw InvalidArgument("length_scale: N must be >= 1");
  return schedule.C / static_cast<double>(N) * std::pow(lambda, -schedule.exponent);
}

TraceResult evaluate_trace(const ProblemSpec& problem, double lambda, Scaling scaling) {
  const auto blocks = assemble_blocks(problem, lambda);
  return posterior_trace(blocks, {problem.jitter, problem.rcond, scaling});
}

namespace {

ScanPoint scan_point(const ProblemSpec& problem, double lambda, Scaling scaling) {
  ScanPoint p;
  p.lambda = lambda;
  try {
    const auto r = evaluate_trace(problem, lambda, scaling);
    p.trace_J = r.trace_J;
    p.diag = r.diag;
    if (!std::isfinite(p.trace_J)) {
      p.skipped = true;
      p.skip_reason = "non-finite trace";
    }
  } catch (const PoleError& e) {
    p.skipped = true;
    p.skip_reason = std::string("pole: ") + e.what();
  } catch (const Error& e) {
    p.skipped = true;
    p.skip_reason = e.what();
  }
  return p;
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(std::min(workers, n));
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SpectralScan scan_spectrum(const ProblemSpec& problem, const ScanOptions& opts) {
  problem.validate();
  if (problem.mode != ProblemMode::eigen) {
    throw InvalidArgument("scan_spectrum: problem is not in eigen mode");
  }
  SpectralScan scan;
  scan.problem_id = problem.id;
  scan.grid = problem.grid;
  scan.schedule = problem.schedule;
  const auto lambdas = make_lambda_grid(problem.grid);
  scan.points.resize(lambdas.size());
  parallel_for(lambdas.size(), opts.jobs, [&](std::size_t i) {
    scan.points[i] = scan_point(problem, lambdas[i], opts.scaling);
  });
  const bool any_ok = std::any_of(scan.points.begin(), scan.points.end(),
                                  [](const ScanPoint& p) { return !p.skipped; });
  if (!any_ok) {
    throw Error("scan_spectrum: every grid point failed (first: " + scan.points.front().skip_reason +
                ")");
  }
  return scan;
}

std::vector<PeakRecord> detect_peaks(const SpectralScan& scan, double prominence_decades) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    if (!scan.points[i].skipped) idx.push_back(i);
  }
  if (idx.size() < 3) throw InsufficientData("detect_peaks: need at least 3 non-skipped points");

  constexpr double kFloor = 1e-300;
  std::vector<double> lj(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    lj[k] = std::log10(std::max(scan.points[idx[k]].trace_J, kFloor));
  }
  std::vector<double> sorted = lj;
  const auto mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(sorted.begin(),
                                               sorted.begin() + static_cast<std::ptrdiff_t>(mid)));
  }

  std::vector<PeakRecord> peaks;
  for (std::size_t k = 1; k + 1 < lj.size(); ++k) {
    if (!(lj[k] > lj[k - 1])) continue;
    std::size_t m = k;
    while (m + 1 < lj.size() && lj[m + 1] == lj[k]) ++m;
    if (m + 1 < lj.size() && lj[m + 1] < lj[k] && lj[k] - median >= prominence_decades) {
      const auto& p = scan.points[idx[k]];
      peaks.push_back({p.lambda, p.trace_J, static_cast<int>(idx[k]), false});
    }
    k = m;
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const PeakRecord& a, const PeakRecord& b) { return a.lambda_hat < b.lambda_hat; });
  return peaks;
}

GoldenResult golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                     double tol) {
  if (!(a < b)) throw InvalidArgument("golden_section_maximize: need a < b");
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  GoldenResult best{fc >= fd ? c : d, std::max(fc, fd), b - a};
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best.value) best = {c, fc, 0.0};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best.value) best = {d, fd, 0.0};
    }
  }
  best.final_width = b - a;
  return best;
}

PeakRecord refine_peak(const ProblemSpec& problem, const PeakRecord& peak, int iterations,
                       Scaling scaling) {
  if (iterations < 0) throw InvalidArgument("refine_peak: iterations must be >= 0");
  const auto grid = make_lambda_grid(problem.grid);
  const int i = peak.grid_index;
  if (i <= 0 || i + 1 >= static_cast<int>(grid.size())) {
    throw InvalidArgument("refine_peak: peak needs grid neighbours on both sides");
  }
  PeakRecord best = peak;
  best.refined = true;
  if (iterations == 0) return best;

  auto J = [&](double lambda) {
    try {
      const double v = evaluate_trace(problem, lambda, scaling).trace_J;
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double a = grid[static_cast<std::size_t>(i - 1)];
  const double b = grid[static_cast<std::size_t>(i + 1)];
  const auto g = golden_section_maximize(J, a, b, (b - a) / std::ldexp(1.0, iterations));
  if (g.value > best.J_peak) {
    best.lambda_hat = g.x;
    best.J_peak = g.value;
  }
  return best;
}

std::vector<PeakRecord> refine_peaks(const ProblemSpec& problem, const std::vector<PeakRecord>& peaks,
                                     int iterations, const ScanOptions& opts) {
  std::vector<PeakRecord> out(peaks.size());
  parallel_for(peaks.size(), opts.jobs, [&](std::size_t i) {
    out[i] = refine_peak(problem, peaks[i], iterations, opts.scaling);
  });
  return out;
}

DecayFit fit_decay_slope(std::span<const PeakRecord> peaks) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : peaks) {
    if (p.J_peak > 0.0 && p.lambda_hat > 0.0) {
      pts.emplace_back(std::log10(p.lambda_hat), std::log10(p.J_peak));
    }
  }
  if (pts.size() < 2) throw InsufficientData("fit_decay_slope: need at least two positive peaks");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw InsufficientData("fit_decay_slope: peaks share one lambda");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace covscan
