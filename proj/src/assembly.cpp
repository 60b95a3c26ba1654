#include "covscan/assembly.hpp"

#include <span>

#include "covscan/errors.hpp"

namespace covscan {

namespace {

// Constraint rows sharing one operator.
struct RowGroup {
  std::vector<double> x;
  std::array<double, kMaxArgOrder + 1> coeffs{};
  std::vector<double> rhs;
  Eigen::Index offset = 0;
};

constexpr std::array<double, kMaxArgOrder + 1> kIdentity{1.0, 0.0, 0.0, 0.0, 0.0};

// Fills the symmetric block of `groups` x `groups` into K, computing only the
// upper triangle and mirroring it so K is exactly symmetric.
void fill_symmetric(const KernelSpec& kernel, const std::vector<RowGroup>& groups,
                    Eigen::MatrixXd& K) {
  std::vector<double> row;
  for (std::size_t p = 0; p < groups.size(); ++p) {
    for (std::size_t q = p; q < groups.size(); ++q) {
      const auto w = pair_weights(groups[p].coeffs, groups[q].coeffs);
      const auto& gp = groups[p];
      const auto& gq = groups[q];
      for (std::size_t i = 0; i < gp.x.size(); ++i) {
        const std::size_t j0 = (p == q) ? i : 0;
        const std::span<const double> cols(gq.x.data() + j0, gq.x.size() - j0);
        row.resize(cols.size());
        weighted_derivative_row(kernel, w, gp.x[i], cols, row);
        const Eigen::Index ri = gp.offset + static_cast<Eigen::Index>(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          const Eigen::Index cj = gq.offset + static_cast<Eigen::Index>(j0 + k);
          K(ri, cj) = row[k];
          K(cj, ri) = row[k];
        }
      }
    }
  }
}

}  // namespace

AssembledBlocks assemble_blocks(const ProblemSpec& problem, double lambda) {
  problem.validate();

  AssembledBlocks out;
  out.lambda = lambda;
  out.kernel = problem.kernel_at(lambda);
  out.kernel.validate();
  out.test_x = problem.test_points();
  if (out.test_x.empty()) throw InvalidArgument("assemble_blocks: empty test grid");

  std::vector<RowGroup> groups;
  const auto interior_x = problem.collocation_points();
  if (!interior_x.empty()) {
    RowGroup g;
    g.x = interior_x;
    g.coeffs = problem.interior_op.coefficients(lambda);
    g.rhs.resize(interior_x.size(), 0.0);
    if (problem.mode == ProblemMode::bvp) {
      for (std::size_t i = 0; i < interior_x.size(); ++i) g.rhs[i] = problem.source(interior_x[i]);
    }
    groups.push_back(std::move(g));
  }
  for (const auto& site : problem.boundary) {
    RowGroup g;
    g.x = {site.location};
    g.coeffs = site.op.coefficients(lambda);
    g.rhs = {site.rhs};
    groups.push_back(std::move(g));
  }
  if (groups.empty()) throw InvalidArgument("assemble_blocks: no constraint rows");

  Eigen::Index M = 0;
  for (auto& g : groups) {
    g.offset = M;
    M += static_cast<Eigen::Index>(g.x.size());
    out.constraint_x.insert(out.constraint_x.end(), g.x.begin(), g.x.end());
  }
  out.interior_rows = static_cast<int>(interior_x.size());

  out.K_CC.resize(M, M);
  fill_symmetric(out.kernel, groups, out.K_CC);

  out.rhs.resize(M);
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.rhs.size(); ++i) {
      out.rhs(g.offset + static_cast<Eigen::Index>(i)) = g.rhs[i];
    }
  }

  const auto Nt = static_cast<Eigen::Index>(out.test_x.size());
  out.K_tC.resize(Nt, M);
  std::vector<double> row;
  for (const auto& g : groups) {
    const auto w = pair_weights(kIdentity, g.coeffs);
    row.resize(g.x.size());
    for (Eigen::Index t = 0; t < Nt; ++t) {
      weighted_derivative_row(out.kernel, w, out.test_x[static_cast<std::size_t>(t)], g.x, row);
      for (std::size_t j = 0; j < row.size(); ++j) {
        out.K_tC(t, g.offset + static_cast<Eigen::Index>(j)) = row[j];
      }
    }
  }

  out.K_tt.resize(Nt, Nt);
  RowGroup test_group;
  test_group.x = out.test_x;
  test_group.coeffs = kIdentity;
  fill_symmetric(out.kernel, {test_group}, out.K_tt);

  return out;
}

}  // namespace covscan
