#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "covscan/problem.hpp"

namespace covscan {

/// Desk presets use N = N_t = 200 and 300 lambda points; paper presets use
/// 500 for all three.
enum class Scale { desk, paper };

/// -u'' = lambda u on [0, 1], u(0) = u(1) = 0.
ProblemSpec laplace_dirichlet(Scale scale = Scale::desk);

/// u'''' = lambda u on [0, 1]; u(0) = u'(0) = 0, u''(1) = u'''(1) = 0.
ProblemSpec cantilever(Scale scale = Scale::desk);

/// -u'' = lambda u, u(0) = 0, u'(1) + lambda kappa M / (lambda - kappa) u(1) = 0.
/// Throws InvalidArgument for nonpositive mass or kappa.
ProblemSpec loaded_string(double mass = 1.0, double kappa = 1.0, Scale scale = Scale::desk);

/// -u'' = 10 on [0, 1], u(0) = u(1) = 0, fixed l = 0.2.
ProblemSpec poisson_bvp_demo();

/// Ids accepted by make_preset: laplace, cantilever, loaded-string, poisson-demo.
const std::vector<std::string>& preset_ids();

/// Throws InvalidArgument for an unknown id.
ProblemSpec make_preset(std::string_view id, Scale scale = Scale::desk);

// Reference solutions.

/// (n pi)^2, n = 1..count.
std::vector<double> laplace_eigenvalues(int count);
double laplace_eigenfunction(int n, double x);

/// cosh(a) cos(a); the clamped-free roots are where this equals -1.
double cantilever_determinant(double alpha);

/// First `count` positive roots of cosh(a) cos(a) = -1, by bisection.
std::vector<double> cantilever_alphas(int count);

/// Clamped-free mode shape for root `alpha` and its x-derivatives up to 3:
/// cosh(ax) - cos(ax) - s (sinh(ax) - sin(ax)), s = (cosh a + cos a)/(sinh a + sin a).
double cantilever_mode(double alpha, double x, int deriv_order);

/// sqrt(l) cos(sqrt(l)) + (l kappa M / (l - kappa)) sin(sqrt(l)); PoleError at l = kappa.
double loaded_string_characteristic(double lambda, double mass, double kappa);

/// Roots of the loaded-string characteristic function in [lo, hi], bracketed
/// on `aux_points` uniform points and bisected to 1e-10 relative width.
std::vector<double> loaded_string_roots(double mass, double kappa, double lo, double hi,
                                        int aux_points);

/// Reference eigenvalues for a preset (dispatch on problem.id; loaded-string
/// roots are searched over problem.grid with 10x its point count). Throws
/// BracketNotFound when fewer than `count` roots exist in the searchable
/// range and InvalidArgument for a problem without an oracle.
std::vector<double> reference_eigenvalues(const ProblemSpec& problem, int count);
std::vector<double> reference_eigenvalues(std::string_view problem_id, int count);

/// All reference eigenvalues inside problem.grid (no count limit).
std::vector<double> reference_eigenvalues_in_range(const ProblemSpec& problem);

/// True when a reference oracle exists for this problem id.
bool has_reference(const ProblemSpec& problem);

/// Exact solution of the Poisson demo, -5x^2 + 5x.
double poisson_exact(double x);

}  // namespace covscan
