#pragma once

#include <vector>

#include <Eigen/Core>

#include "covscan/kernel.hpp"
#include "covscan/problem.hpp"

namespace covscan {

/// Joint prior blocks for one lambda. Constraint rows are ordered as the
/// interior collocation rows followed by one row per boundary site.
struct AssembledBlocks {
  double lambda = 0.0;
  KernelSpec kernel;
  std::vector<double> test_x;
  std::vector<double> constraint_x;
  int interior_rows = 0;
  Eigen::MatrixXd K_tt;  // N_t x N_t
  Eigen::MatrixXd K_tC;  // N_t x M
  Eigen::MatrixXd K_CC;  // M x M
  Eigen::VectorXd rhs;   // M

  int constraint_count() const { return static_cast<int>(K_CC.rows()); }
};

/// Builds the prior blocks of `problem` at `lambda`. Throws PoleError when a
/// coefficient has a pole at lambda and InvalidArgument for an invalid problem.
AssembledBlocks assemble_blocks(const ProblemSpec& problem, double lambda);

}  // namespace covscan
