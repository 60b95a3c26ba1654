#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "covscan/assembly.hpp"
#include "covscan/problem.hpp"

namespace covscan {

/// How the matrix is scaled before its eigendecomposition.
///
/// `diagonal` factors D A D with D = diag(A_ii)^(-1/2) and returns
/// D (D A D)^+ D. For nonsingular A this is A^{-1}; in general it is a
/// reflexive generalized inverse (A P A = A, P A P = P), which is all the
/// Gaussian conditioning formula needs. It keeps rows of very different
/// magnitude (e.g. fourth-order interior rows next to Dirichlet rows)
/// resolvable in double precision. The truncation threshold then applies to
/// the eigenvalues of the scaled matrix.
enum class Scaling { none, diagonal };

struct PseudoinverseDiag {
  int rank = 0;
  double sv_max = 0.0;
  double sv_min_kept = 0.0;
  int truncated_count = 0;
  double jitter_used = 0.0;
};

/// A = M + jitter I factored as A^+ = D V diag(inv_values) V^T D.
struct PseudoinverseFactor {
  Eigen::VectorXd scale;       // D (all ones for Scaling::none)
  Eigen::MatrixXd vectors;     // V restricted to kept eigenpairs
  Eigen::VectorXd inv_values;  // 1 / eigenvalue for kept eigenpairs
  PseudoinverseDiag diag;

  Eigen::MatrixXd matrix() const;
};

/// Eigendecomposition-based pseudoinverse of M + jitter I, dropping
/// eigenvalues with |e| < rcond * max|e|. Throws DecompositionError on
/// non-finite input and InvalidArgument on a non-square matrix.
PseudoinverseFactor factor_pseudoinverse(const Eigen::MatrixXd& M, double jitter, double rcond,
                                         Scaling scaling = Scaling::none);

std::pair<Eigen::MatrixXd, PseudoinverseDiag> regularized_pseudoinverse(
    const Eigen::MatrixXd& M, double jitter, double rcond, Scaling scaling = Scaling::none);

struct PosteriorOptions {
  double jitter = 1e-8;
  double rcond = 1e-12;
  Scaling scaling = Scaling::diagonal;
};

struct PosteriorSummary {
  double lambda = 0.0;
  double trace_J = 0.0;
  double prior_trace = 0.0;
  Eigen::MatrixXd cov;
  Eigen::VectorXd mean;
  PseudoinverseDiag diag;
  std::vector<double> test_x;
  // Kept for the sample residual diagnostic.
  Eigen::MatrixXd prior;           // K_tt
  Eigen::MatrixXd interior_cross;  // interior rows of K_Ct (N x N_t)
};

PosteriorSummary posterior_covariance(const AssembledBlocks& blocks, const PosteriorOptions& opts);

struct TraceResult {
  double trace_J = 0.0;
  double prior_trace = 0.0;
  PseudoinverseDiag diag;
};

/// trace(K_tt - K_tC A^+ K_Ct) without forming the N_t x N_t covariance.
TraceResult posterior_trace(const AssembledBlocks& blocks, const PosteriorOptions& opts);

enum class Normalization { none, sup_norm, l2 };

struct EigenfunctionSample {
  std::vector<double> values;
  std::uint64_t seed = 0;
  int index = 0;
  Normalization normalization = Normalization::none;
  /// ||E[(L - lambda) u at collocation | u on test grid]|| / ||u||, via the
  /// prior cross-covariances; 0 for a zero sample.
  double residual = 0.0;
};

/// Draws from N(mean, cov) using the eigendecomposition of cov (negative
/// eigenvalues clipped to zero). Sample i uses its own generator seeded from
/// (seed, i), so results do not depend on `count`.
std::vector<EigenfunctionSample> sample_posterior(const PosteriorSummary& summary, int count,
                                                  std::uint64_t seed,
                                                  Normalization normalization);

/// Conditions a bvp-mode problem on its boundary rows and `n_interior`
/// equispaced interior rows (boundaries excluded).
PosteriorSummary solve_bvp(const ProblemSpec& problem, int n_interior);

}  // namespace covscan
