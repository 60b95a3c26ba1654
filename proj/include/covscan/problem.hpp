#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covscan/linear_operator.hpp"

namespace covscan {

enum class GridKind { linear, log, power_root };

/// Candidate lambda values. `power_root` is uniform in lambda^(1/root).
struct LambdaGrid {
  GridKind kind = GridKind::log;
  double lo = 1.0;
  double hi = 1000.0;
  int count = 300;
  double root = 1.0;  // power_root only

  void validate() const;
  friend bool operator==(const LambdaGrid&, const LambdaGrid&) = default;
};

/// Length-scale schedule l = C / N * lambda^(-exponent).
struct HyperSchedule {
  double C = 150.0;
  double exponent = 0.5;
  double variance = 1.0;

  void validate() const;
  friend bool operator==(const HyperSchedule&, const HyperSchedule&) = default;
};

/// Right-hand side f of the interior equation in bvp mode: a constant, or a
/// table of (x, f) pairs interpolated linearly when `table` is non-empty.
struct SourceTerm {
  double constant = 0.0;
  std::vector<std::pair<double, double>> table;

  double operator()(double x) const;
  friend bool operator==(const SourceTerm&, const SourceTerm&) = default;
};

enum class ProblemMode { eigen, bvp };

struct ProblemSpec {
  std::string id;
  double x_lo = 0.0;
  double x_hi = 1.0;
  ProblemMode mode = ProblemMode::eigen;
  /// Interior operator; lambda-shifted (L - lambda) in eigen mode.
  LinearOperator interior_op = LinearOperator::identity();
  std::vector<ConstraintSite> boundary;
  int collocation_count = 200;  // N
  int test_count = 200;         // N_t
  HyperSchedule schedule;
  /// When set, overrides the schedule (bvp demo uses a fixed l).
  std::optional<double> fixed_length_scale;
  double jitter = 1e-8;
  double rcond = 1e-12;
  LambdaGrid grid;
  SourceTerm source;
  /// Peak prominence (decades of J above the scan median) used for detection.
  double prominence_decades = 2.0;
  /// Named physical parameters (e.g. mass, kappa) used by reference oracles.
  std::map<std::string, double> parameters;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  /// Uniform collocation sites: endpoints included in eigen mode, excluded
  /// (x_lo + i h, h = width/(N+1)) in bvp mode.
  std::vector<double> collocation_points() const;
  std::vector<double> test_points() const;

  /// Kernel hyperparameters at this lambda.
  KernelSpec kernel_at(double lambda) const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

std::vector<double> linspace(double lo, double hi, int count);

}  // namespace covscan
