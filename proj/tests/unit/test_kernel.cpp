#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "covscan/errors.hpp"
#include "covscan/kernel.hpp"
#include "fd_oracle.hpp"
#include "test_util.hpp"

using namespace covscan;
using covscan::testing::fd_mixed_derivative;
using covscan::testing::rel_err;

namespace {

// Plain double central difference for d/dx d/dx2.
double central_11(const KernelSpec& s, double x, double x2, double h) {
  return (eval_kernel(s, x + h, x2 + h) - eval_kernel(s, x + h, x2 - h) -
          eval_kernel(s, x - h, x2 + h) + eval_kernel(s, x - h, x2 - h)) /
         (4 * h * h);
}

}  // namespace

TEST_CASE("kernel values") {
  const KernelSpec unit{1.0, 1.0};
  CHECK(eval_kernel(unit, 0.0, 0.0) == 1.0);
  CHECK(eval_kernel(unit, 0.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(eval_kernel({4.0, 0.5}, 0.3, 0.3) == 4.0);
  CHECK(eval_kernel({1.0, 0.1}, 0.0, 10.0) == 0.0);
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2), ls(0.05, 2);
  for (int t = 0; t < 200; ++t) {
    const KernelSpec s{1.3, ls(rng)};
    const double x = u(rng), y = u(rng);
    CHECK(eval_kernel(s, x, y) == eval_kernel(s, y, x));
  }
}

TEST_CASE("mixed derivative examples") {
  const KernelSpec unit{1.0, 1.0};
  CHECK(kernel_mixed_derivative(unit, {0, 0}, 0.2, 0.7) == eval_kernel(unit, 0.2, 0.7));
  CHECK(kernel_mixed_derivative(unit, {1, 0}, 0.4, 0.4) == 0.0);
  CHECK(kernel_mixed_derivative(unit, {1, 1}, 0.4, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(kernel_mixed_derivative(unit, {1, 1}, 0.4, 0.4) - central_11(unit, 0.4, 0.4, 1e-4)) <=
        1e-6);

  const KernelSpec s{1.0, 0.5};
  const double got = kernel_mixed_derivative(s, {2, 2}, 0.1, 0.4);
  CHECK(rel_err(got, fd_mixed_derivative(1.0, 0.5, 2, 2, 0.1, 0.4)) <= 1e-6);
}

TEST_CASE("transpose rule") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1), ls(0.05, 1);
  for (int t = 0; t < 100; ++t) {
    const KernelSpec s{1.0, ls(rng)};
    const double x = u(rng), y = u(rng);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        const double lhs = kernel_mixed_derivative(s, {a, b}, x, y);
        const double rhs = kernel_mixed_derivative(s, {b, a}, y, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13).scale(1e-300));
      }
  }
}

TEST_CASE("mixed derivatives agree with a multiprecision finite-difference oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1), ls(0.05, 1), var(0.5, 2);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const KernelSpec s{var(rng), ls(rng)};
    // keep r within a few length scales so the value is not pure underflow
    const double x = u(rng);
    const double y = x + (u(rng) - 0.5) * 4 * s.length_scale;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        const double got = kernel_mixed_derivative(s, {a, b}, x, y);
        const double want = fd_mixed_derivative(s.variance, s.length_scale, a, b, x, y);
        const double scale = s.variance / std::pow(s.length_scale, a + b);
        worst = std::max(worst, std::abs(got - want) / scale);
      }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("derivative stack matches mixed derivatives") {
  const KernelSpec s{2.0, 0.3};
  const double r = 0.17;
  const auto g = derivative_stack(s, r, kMaxTotalOrder);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      const double sign = (b % 2) ? -1.0 : 1.0;
      CHECK(kernel_mixed_derivative(s, {a, b}, r, 0.0) ==
            doctest::Approx(sign * g[a + b]).epsilon(1e-14));
    }
}

TEST_CASE("unsupported orders and bad hyperparameters") {
  const KernelSpec unit{1.0, 1.0};
  CHECK_THROWS_AS(kernel_mixed_derivative(unit, {5, 0}, 0, 0), UnsupportedOrder);
  CHECK_THROWS_AS(kernel_mixed_derivative(unit, {0, 5}, 0, 0), UnsupportedOrder);
  CHECK_THROWS_AS(kernel_mixed_derivative(unit, {-1, 0}, 0, 0), UnsupportedOrder);
  CHECK_THROWS_AS((KernelSpec{0.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((KernelSpec{1.0, -1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((KernelSpec{1.0, std::nan("")}.validate()), InvalidArgument);
}

TEST_CASE("gram matrix") {
  const KernelSpec unit{1.0, 1.0};
  const std::vector<double> two{0.0, 1.0};
  const Eigen::MatrixXd G = gram(unit, {0, 0}, two, two);
  CHECK(G(0, 0) == doctest::Approx(1.0));
  CHECK(G(1, 1) == doctest::Approx(1.0));
  CHECK(G(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(G(1, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  const std::vector<double> one{0.5};
  CHECK(gram(unit, {0, 0}, one, one)(0, 0) == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> xs(10), ys(7);
  for (auto& v : xs) v = u(rng);
  for (auto& v : ys) v = u(rng);
  const KernelSpec s{1.5, 0.3};
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      const Eigen::MatrixXd M = gram(s, {a, b}, xs, ys);
      REQUIRE(M.rows() == 10);
      REQUIRE(M.cols() == 7);
      const double scale = s.variance / std::pow(s.length_scale, a + b);
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 7; ++j)
          CHECK(std::abs(M(i, j) - kernel_mixed_derivative(s, {a, b}, xs[i], ys[j])) <=
                1e-12 * scale);
    }
}

TEST_CASE("gram matrices are positive semidefinite") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> xs(10);
  for (auto& v : xs) v = u(rng);
  for (int k = 0; k <= 4; ++k) {
    const Eigen::MatrixXd G = gram({1.0, 0.3}, {k, k}, xs, xs);
    CHECK((G - G.transpose()).norm() <= 1e-12 * G.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * G.trace());
  }
}
