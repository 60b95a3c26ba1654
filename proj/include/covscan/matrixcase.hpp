#pragma once

// Finite-dimensional version of the covariance criterion: prior u ~ N(0, K)
// conditioned on A(lambda) u = 0 with A(lambda) = L - lambda I. Used as an
// exact oracle for the PDE path.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace covscan {

struct FiniteDimCase {
  Eigen::MatrixXd L;
  Eigen::MatrixXd K;  // symmetric positive definite
  double lambda = 0.0;

  /// Throws InvalidArgument on shape mismatch or a non-SPD K.
  void validate() const;
  Eigen::MatrixXd shifted() const;  // A(lambda)
};

/// Relative truncation threshold for the exact-theory pseudoinverses.
inline constexpr double kFdRcond = 1e-10;

/// K - K A^T (A K A^T)^+ A K, zero jitter.
Eigen::MatrixXd fd_posterior_covariance(const FiniteDimCase& c);

/// Orthogonal projector I - Q^+ Q with Q = A(lambda) P and K = P P^T.
Eigen::MatrixXd fd_null_projector(const FiniteDimCase& c);

/// B = P (I - Q^+ Q); B B^T equals the posterior covariance.
Eigen::MatrixXd fd_sample_factor(const FiniteDimCase& c);

/// u* = B xi, xi ~ N(0, I); sample i draws from its own (seed, i) stream.
std::vector<Eigen::VectorXd> fd_sample(const FiniteDimCase& c, int count, std::uint64_t seed);

struct FdTrialResult {
  int trial = 0;
  int dim = 0;
  int multiplicity = 0;
  double lambda_on = 0.0;
  double lambda_off = 0.0;
  double off_norm_ratio = 0.0;       // ||K_N(off)||_F / ||K||_F
  double off_sample_norm = 0.0;      // ||B(off)||_F / ||P||_F
  double on_trace_ratio = 0.0;       // tr K_N(on) / lambda_min(K)
  double sample_residual = 0.0;      // max ||A u|| / ||u|| over samples
  double factor_error = 0.0;         // ||B B^T - K_N||_F / ||K_N||_F
  double projector_error = 0.0;      // max(||P^2 - P||, ||P - P^T||)
  int posterior_rank = 0;
  bool passed = false;
};

struct FdTolerances {
  double off_norm = 1e-8;
  double off_sample = 1e-8;
  double on_trace = 1e-4;
  double sample_residual = 1e-8;
  double factor = 1e-9;
  double projector = 1e-10;
};

struct FdTheoremReport {
  std::vector<FdTrialResult> trials;
  FdTolerances tolerances;

  int passed_count() const;
  bool all_passed() const { return passed_count() == static_cast<int>(trials.size()); }
  double worst_off_norm_ratio() const;
  double worst_on_trace_ratio() const;  // smallest
  double worst_sample_residual() const;
  double worst_factor_error() const;
  double worst_projector_error() const;
};

/// Random cases with known spectra (orthogonal similarity of a diagonal,
/// sometimes with a repeated eigenvalue) and random SPD priors, checking both
/// branches of the criterion. Failures are reported, not thrown.
FdTheoremReport fd_theorem_suite(int trials, int max_dim, std::uint64_t seed,
                                 FdTolerances tol = {});

}  // namespace covscan
