#pragma once

#include <cstddef>
#include <string_view>

namespace covscan::simd {

enum class Level { scalar, avx2 };

std::string_view to_string(Level level);

/// Best level supported by both this build and the running CPU.
Level detected_level();

/// Level used by weighted_derivative_row. Initialised from detected_level(),
/// unless the COVSCAN_SIMD environment variable is set to "scalar".
Level active_level();

/// Throws InvalidArgument when `level` is not supported here.
void set_active_level(Level level);

bool level_supported(Level level);

/// Row kernel signature shared by every variant.
///   out[j] = variance * exp(-r_j^2 * inv_two_l2) * sum_{n<=max_order} w[n] h_n(r_j),
///   r_j = x - x2[j], h_0 = 1, h_1 = -r inv_l2, h_n = -inv_l2 (r h_{n-1} + (n-1) h_{n-2}).
using RowKernel = void (*)(double variance, double inv_l2, const double* w, int max_order,
                           double x, const double* x2, double* out, std::size_t n);

/// Kernel for an explicit level; throws InvalidArgument when unsupported.
RowKernel row_kernel(Level level);

namespace detail {
void row_scalar(double variance, double inv_l2, const double* w, int max_order, double x,
                const double* x2, double* out, std::size_t n);
#if defined(COVSCAN_HAVE_AVX2)
void row_avx2(double variance, double inv_l2, const double* w, int max_order, double x,
              const double* x2, double* out, std::size_t n);
#endif
}  // namespace detail

}  // namespace covscan::simd
