#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "covscan/posterior.hpp"
#include "covscan/problem.hpp"

namespace covscan {

/// Monotone grid of exactly grid.count values with exact endpoints.
std::vector<double> make_lambda_grid(const LambdaGrid& grid);

/// l = C / N * lambda^(-exponent). Throws InvalidArgument for lambda <= 0 or N < 1.
double length_scale(const HyperSchedule& schedule, double lambda, int N);

struct ScanPoint {
  double lambda = 0.0;
  double trace_J = 0.0;
  PseudoinverseDiag diag;
  bool skipped = false;
  std::string skip_reason;
};

struct PeakRecord {
  double lambda_hat = 0.0;
  double J_peak = 0.0;
  int grid_index = 0;
  bool refined = false;
};

struct SpectralScan {
  std::string problem_id;
  LambdaGrid grid;
  HyperSchedule schedule;
  std::vector<ScanPoint> points;
  std::vector<PeakRecord> peaks;
};

struct ScanOptions {
  /// Worker threads for the lambda loop; <= 1 runs serially.
  int jobs = 1;
  Scaling scaling = Scaling::diagonal;
};

/// J(lambda) for one lambda (assembly + trace of the posterior covariance).
TraceResult evaluate_trace(const ProblemSpec& problem, double lambda,
                           Scaling scaling = Scaling::diagonal);

/// Sweeps problem.grid. Points whose assembly or factorization fails (e.g. a
/// coefficient pole) are kept as skipped entries; throws only when every
/// point fails. Output order is grid order regardless of `jobs`.
SpectralScan scan_spectrum(const ProblemSpec& problem, const ScanOptions& opts = {});

/// Interior local maxima of log10 J (over non-skipped points) at least
/// `prominence_decades` above the median log10 J. On a plateau the smallest
/// lambda is reported. Throws InsufficientData for fewer than 3 usable points.
std::vector<PeakRecord> detect_peaks(const SpectralScan& scan, double prominence_decades);

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  double final_width = 0.0;  // width of the last bracket
};

/// Golden-section search for the maximum of f on [a, b], stopping once the
/// bracket is no wider than `tol`. Returns the best evaluated point.
GoldenResult golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                     double tol);

/// Golden-section maximisation of J between the peak's grid neighbours until
/// the bracket is narrower than (neighbour gap) / 2^iterations.
PeakRecord refine_peak(const ProblemSpec& problem, const PeakRecord& peak, int iterations,
                       Scaling scaling = Scaling::diagonal);

/// refine_peak over every peak, spread over opts.jobs threads; order preserved.
std::vector<PeakRecord> refine_peaks(const ProblemSpec& problem, const std::vector<PeakRecord>& peaks,
                                     int iterations, const ScanOptions& opts = {});

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least squares of log10 J_peak against log10 lambda_hat.
DecayFit fit_decay_slope(std::span<const PeakRecord> peaks);

}  // namespace covscan
