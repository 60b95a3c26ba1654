#include "covscan/matrixcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "covscan/errors.hpp"

namespace covscan {

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), index};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& K) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw DecompositionError("Cholesky of K failed (not SPD)");
  return llt.matrixL();
}

// Round-off in A(lambda) is relative to |L| + |lambda|, so cutoffs are taken
// against that scale too; otherwise an A that is zero up to round-off (L = cI
// at lambda = c) would have its noise inverted.
double operator_scale(const FiniteDimCase& c) {
  return c.L.norm() + std::abs(c.lambda);
}

// Moore-Penrose inverse of a general matrix through its SVD; singular values
// at or below rcond * max(s_max, floor) are dropped.
Eigen::MatrixXd svd_pinv(const Eigen::MatrixXd& Q, double rcond, double floor) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = std::max(s.size() > 0 ? s.maxCoeff() : 0.0, floor);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s(i) > rcond * smax) inv(i) = 1.0 / s(i);
  }
  const auto r = s.size();
  return svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).transpose();
}

// Symmetric version through the eigendecomposition.
Eigen::MatrixXd sym_pinv(const Eigen::MatrixXd& S, double rcond, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw DecompositionError("eigendecomposition failed");
  const Eigen::VectorXd& e = es.eigenvalues();
  const double emax = std::max(e.size() > 0 ? e.cwiseAbs().maxCoeff() : 0.0, floor);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (emax > 0.0 && std::abs(e(i)) > rcond * emax) inv(i) = 1.0 / e(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void FiniteDimCase::validate() const {
  const auto n = L.rows();
  if (n == 0 || L.cols() != n || K.rows() != n || K.cols() != n) {
    throw InvalidArgument("finite-dimensional case: L and K must be square of equal size");
  }
  if (!(K - K.transpose()).isZero(1e-12 * std::max(1.0, K.cwiseAbs().maxCoeff()))) {
    throw InvalidArgument("finite-dimensional case: K must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidArgument("finite-dimensional case: K must be positive definite");
  }
}

Eigen::MatrixXd FiniteDimCase::shifted() const {
  Eigen::MatrixXd A = L;
  A.diagonal().array() -= lambda;
  return A;
}

Eigen::MatrixXd fd_posterior_covariance(const FiniteDimCase& c) {
  c.validate();
  const Eigen::MatrixXd A = c.shifted();
  const Eigen::MatrixXd AK = A * c.K;
  Eigen::MatrixXd S = AK * A.transpose();
  S = 0.5 * (S + S.transpose());
  if (!S.allFinite()) throw DecompositionError("non-finite A K A^T");
  const double a = operator_scale(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kes(c.K, Eigen::EigenvaluesOnly);
  const double k_max = kes.eigenvalues().maxCoeff();
  const Eigen::MatrixXd S_pinv = sym_pinv(S, kFdRcond, a * a * k_max);
  Eigen::MatrixXd KN = c.K - AK.transpose() * S_pinv * AK;
  return 0.5 * (KN + KN.transpose());
}

Eigen::MatrixXd fd_null_projector(const FiniteDimCase& c) {
  c.validate();
  const Eigen::MatrixXd P = cholesky_factor(c.K);
  const Eigen::MatrixXd Q = c.shifted() * P;
  const auto n = Q.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(P);
  const double p_max = psvd.singularValues()(0);
  return Eigen::MatrixXd::Identity(n, n) - svd_pinv(Q, kFdRcond, operator_scale(c) * p_max) * Q;
}

Eigen::MatrixXd fd_sample_factor(const FiniteDimCase& c) {
  c.validate();
  return cholesky_factor(c.K) * fd_null_projector(c);
}

std::vector<Eigen::VectorXd> fd_sample(const FiniteDimCase& c, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("fd_sample: count must be >= 1");
  const Eigen::MatrixXd B = fd_sample_factor(c);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto rng = substream(seed, static_cast<std::uint32_t>(i));
    std::normal_distribution<double> normal;
    Eigen::VectorXd xi(B.cols());
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = normal(rng);
    out.push_back(B * xi);
  }
  return out;
}

int FdTheoremReport::passed_count() const {
  return static_cast<int>(
      std::count_if(trials.begin(), trials.end(), [](const auto& t) { return t.passed; }));
}

double FdTheoremReport::worst_off_norm_ratio() const {
  double w = 0.0;
  for (const auto& t : trials) w = std::max(w, t.off_norm_ratio);
  return w;
}

double FdTheoremReport::worst_on_trace_ratio() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& t : trials) w = std::min(w, t.on_trace_ratio);
  return w;
}

double FdTheoremReport::worst_sample_residual() const {
  double w = 0.0;
  for (const auto& t : trials) w = std::max(w, t.sample_residual);
  return w;
}

double FdTheoremReport::worst_factor_error() const {
  double w = 0.0;
  for (const auto& t : trials) w = std::max(w, t.factor_error);
  return w;
}

double FdTheoremReport::worst_projector_error() const {
  double w = 0.0;
  for (const auto& t : trials) w = std::max(w, t.projector_error);
  return w;
}

namespace {

FdTrialResult run_trial(int trial, int max_dim, std::uint64_t seed, const FdTolerances& tol) {
  auto rng = substream(seed, static_cast<std::uint32_t>(trial));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;

  FdTrialResult r;
  r.trial = trial;
  const int n = 1 + static_cast<int>(unit(rng) * max_dim) % max_dim;
  r.dim = n;

  // Spectrum with gaps >= 0.25, optionally with the first value repeated.
  Eigen::VectorXd d(n);
  double v = -5.0 + 0.5 * unit(rng);
  for (int i = 0; i < n; ++i) {
    d(i) = v;
    v += 0.25 + 0.75 * unit(rng);
  }
  if (n >= 2 && unit(rng) < 0.3) d(1) = d(0);

  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = normal(rng);
  const Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  const Eigen::MatrixXd L = U * d.asDiagonal() * U.transpose();

  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < H.size(); ++i) H.data()[i] = normal(rng);
  Eigen::MatrixXd K = H * H.transpose() / n;
  K.diagonal().array() += 0.5;
  K = 0.5 * (K + K.transpose());

  const int target = static_cast<int>(unit(rng) * n) % n;
  r.lambda_on = d(target);
  r.multiplicity = static_cast<int>((d.array() == r.lambda_on).count());

  const double span_lo = d.minCoeff() - 1.0;
  const double span_hi = d.maxCoeff() + 1.0;
  do {
    r.lambda_off = span_lo + (span_hi - span_lo) * unit(rng);
  } while ((d.array() - r.lambda_off).abs().minCoeff() < 1e-3);

  const double K_norm = K.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kes(K, Eigen::EigenvaluesOnly);
  const double k_min = kes.eigenvalues().minCoeff();

  // Off-spectrum branch.
  FiniteDimCase off{L, K, r.lambda_off};
  r.off_norm_ratio = fd_posterior_covariance(off).norm() / K_norm;
  const Eigen::MatrixXd P = cholesky_factor(K);
  r.off_sample_norm = fd_sample_factor(off).norm() / P.norm();

  // On-spectrum branch.
  FiniteDimCase on{L, K, r.lambda_on};
  const Eigen::MatrixXd KN = fd_posterior_covariance(on);
  r.on_trace_ratio = KN.trace() / k_min;

  const Eigen::MatrixXd Pi = fd_null_projector(on);
  r.projector_error =
      std::max((Pi * Pi - Pi).norm(), (Pi - Pi.transpose()).norm());

  const Eigen::MatrixXd B = P * Pi;
  const double kn_norm = KN.norm();
  r.factor_error = kn_norm > 0.0 ? (B * B.transpose() - KN).norm() / kn_norm
                                 : std::numeric_limits<double>::infinity();

  const Eigen::MatrixXd A = on.shifted();
  const auto samples = fd_sample(on, 16, seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(trial)));
  for (const auto& u : samples) {
    const double un = u.norm();
    if (un > 0.0) r.sample_residual = std::max(r.sample_residual, (A * u).norm() / un);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> nes(KN, Eigen::EigenvaluesOnly);
  const double top = nes.eigenvalues().cwiseAbs().maxCoeff();
  r.posterior_rank = static_cast<int>((nes.eigenvalues().array() > 1e-8 * top).count());

  r.passed = r.off_norm_ratio <= tol.off_norm && r.off_sample_norm <= tol.off_sample &&
             r.on_trace_ratio >= tol.on_trace && r.sample_residual <= tol.sample_residual &&
             r.factor_error <= tol.factor && r.projector_error <= tol.projector &&
             r.posterior_rank == r.multiplicity;
  return r;
}

}  // namespace

FdTheoremReport fd_theorem_suite(int trials, int max_dim, std::uint64_t seed, FdTolerances tol) {
  if (trials < 1) throw InvalidArgument("fd_theorem_suite: trials must be >= 1");
  if (max_dim < 1) throw InvalidArgument("fd_theorem_suite: max_dim must be >= 1");
  FdTheoremReport report;
  report.tolerances = tol;
  report.trials.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) report.trials.push_back(run_trial(t, max_dim, seed, tol));
  return report;
}

}  // namespace covscan
