#include "covscan/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "covscan/errors.hpp"

namespace covscan {

Eigen::MatrixXd PseudoinverseFactor::matrix() const {
  const Eigen::MatrixXd SV = scale.asDiagonal() * vectors;
  return SV * inv_values.asDiagonal() * SV.transpose();
}

PseudoinverseFactor factor_pseudoinverse(const Eigen::MatrixXd& M, double jitter, double rcond,
                                         Scaling scaling) {
  if (M.rows() != M.cols()) throw InvalidArgument("pseudoinverse: matrix must be square");
  if (!(jitter >= 0.0) || !(rcond > 0.0)) {
    throw InvalidArgument("pseudoinverse: need jitter >= 0 and rcond > 0");
  }
  if (!M.allFinite()) throw DecompositionError("pseudoinverse: matrix has non-finite entries");

  const Eigen::Index n = M.rows();
  PseudoinverseFactor f;
  f.diag.jitter_used = jitter;
  f.scale = Eigen::VectorXd::Ones(n);
  if (n == 0) {
    f.vectors.resize(0, 0);
    f.inv_values.resize(0);
    return f;
  }

  Eigen::MatrixXd A = M;
  A.diagonal().array() += jitter;
  if (scaling == Scaling::diagonal) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = A(i, i);
      if (d > 0.0) f.scale(i) = 1.0 / std::sqrt(d);
    }
    A = f.scale.asDiagonal() * A * f.scale.asDiagonal();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw DecompositionError("pseudoinverse: symmetric eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double sv_max = ev.cwiseAbs().maxCoeff();
  f.diag.sv_max = sv_max;
  const double threshold = rcond * sv_max;

  std::vector<Eigen::Index> kept;
  kept.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv_max > 0.0 && std::abs(ev(i)) >= threshold && ev(i) != 0.0) kept.push_back(i);
  }
  const auto rank = static_cast<Eigen::Index>(kept.size());
  f.diag.rank = static_cast<int>(rank);
  f.diag.truncated_count = static_cast<int>(n - rank);
  f.vectors.resize(n, rank);
  f.inv_values.resize(rank);
  double min_kept = rank > 0 ? sv_max : 0.0;
  for (Eigen::Index k = 0; k < rank; ++k) {
    const Eigen::Index i = kept[static_cast<std::size_t>(k)];
    f.vectors.col(k) = es.eigenvectors().col(i);
    f.inv_values(k) = 1.0 / ev(i);
    min_kept = std::min(min_kept, std::abs(ev(i)));
  }
  f.diag.sv_min_kept = min_kept;
  return f;
}

std::pair<Eigen::MatrixXd, PseudoinverseDiag> regularized_pseudoinverse(const Eigen::MatrixXd& M,
                                                                        double jitter, double rcond,
                                                                        Scaling scaling) {
  auto f = factor_pseudoinverse(M, jitter, rcond, scaling);
  return {f.matrix(), f.diag};
}

namespace {

// W = K_tC D V, so that K_tC A^+ K_Ct = W diag(inv) W^T.
Eigen::MatrixXd projected_cross(const AssembledBlocks& blocks, const PseudoinverseFactor& f) {
  return (blocks.K_tC * f.scale.asDiagonal()) * f.vectors;
}

void check_blocks(const AssembledBlocks& blocks) {
  const auto M = blocks.K_CC.rows();
  if (blocks.K_CC.cols() != M || blocks.K_tC.cols() != M || blocks.rhs.size() != M ||
      blocks.K_tt.rows() != blocks.K_tt.cols() || blocks.K_tC.rows() != blocks.K_tt.rows()) {
    throw InvalidArgument("posterior: inconsistent block dimensions");
  }
}

}  // namespace

PosteriorSummary posterior_covariance(const AssembledBlocks& blocks, const PosteriorOptions& opts) {
  check_blocks(blocks);
  const auto f = factor_pseudoinverse(blocks.K_CC, opts.jitter, opts.rcond, opts.scaling);
  const Eigen::MatrixXd W = projected_cross(blocks, f);

  PosteriorSummary s;
  s.lambda = blocks.lambda;
  s.diag = f.diag;
  s.test_x = blocks.test_x;
  s.prior = blocks.K_tt;
  s.prior_trace = blocks.K_tt.trace();
  s.interior_cross = blocks.K_tC.leftCols(blocks.interior_rows).transpose();

  Eigen::MatrixXd cov = blocks.K_tt;
  cov.noalias() -= (W * f.inv_values.asDiagonal()) * W.transpose();
  s.cov = 0.5 * (cov + cov.transpose());
  s.trace_J = s.cov.trace();

  const auto Nt = blocks.K_tt.rows();
  if (blocks.rhs.isZero(0.0)) {
    s.mean = Eigen::VectorXd::Zero(Nt);
  } else {
    const Eigen::VectorXd coeffs =
        f.inv_values.cwiseProduct(f.vectors.transpose() * f.scale.cwiseProduct(blocks.rhs));
    s.mean = W * coeffs;
  }
  return s;
}

TraceResult posterior_trace(const AssembledBlocks& blocks, const PosteriorOptions& opts) {
  check_blocks(blocks);
  const auto f = factor_pseudoinverse(blocks.K_CC, opts.jitter, opts.rcond, opts.scaling);
  const Eigen::MatrixXd W = projected_cross(blocks, f);
  TraceResult r;
  r.diag = f.diag;
  r.prior_trace = blocks.K_tt.trace();
  r.trace_J = r.prior_trace - W.colwise().squaredNorm().dot(f.inv_values);
  return r;
}

std::vector<EigenfunctionSample> sample_posterior(const PosteriorSummary& summary, int count,
                                                  std::uint64_t seed,
                                                  Normalization normalization) {
  if (count < 1) throw InvalidArgument("sample_posterior: count must be >= 1");
  const auto n = summary.cov.rows();
  if (summary.cov.cols() != n || summary.mean.size() != n) {
    throw InvalidArgument("sample_posterior: inconsistent summary");
  }
  if (!summary.cov.allFinite()) throw DecompositionError("sample_posterior: non-finite covariance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(summary.cov);
  if (es.info() != Eigen::Success) {
    throw DecompositionError("sample_posterior: eigendecomposition failed");
  }
  const Eigen::MatrixXd factor =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  // Maps a sample on the test grid to the prior-conditional mean of the
  // constraint operator at the interior collocation sites.
  Eigen::MatrixXd residual_map;
  const bool have_residual =
      summary.interior_cross.rows() > 0 && summary.interior_cross.cols() == n &&
      summary.prior.rows() == n;
  if (have_residual) {
    residual_map = summary.interior_cross * regularized_pseudoinverse(summary.prior, 0.0, 1e-10).first;
  }

  std::vector<EigenfunctionSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd xi(n);
    for (Eigen::Index k = 0; k < n; ++k) xi(k) = normal(rng);
    Eigen::VectorXd u = summary.mean + factor * xi;

    EigenfunctionSample sample;
    sample.seed = seed;
    sample.index = i;
    sample.normalization = normalization;
    const double norm = u.norm();
    if (have_residual && norm > 0.0) sample.residual = (residual_map * u).norm() / norm;

    double divisor = 1.0;
    if (normalization == Normalization::sup_norm) divisor = u.cwiseAbs().maxCoeff();
    if (normalization == Normalization::l2) divisor = norm;
    if (divisor > 0.0) u /= divisor;
    sample.values.assign(u.data(), u.data() + n);
    out.push_back(std::move(sample));
  }
  return out;
}

PosteriorSummary solve_bvp(const ProblemSpec& problem, int n_interior) {
  if (problem.mode != ProblemMode::bvp) throw InvalidArgument("solve_bvp: problem is not in bvp mode");
  if (n_interior < 0) throw InvalidArgument("solve_bvp: interior point count must be >= 0");
  ProblemSpec p = problem;
  p.collocation_count = n_interior;
  const auto blocks = assemble_blocks(p, 0.0);
  return posterior_covariance(blocks, {p.jitter, p.rcond, Scaling::diagonal});
}

}  // namespace covscan
