// Reference row kernel. The AVX2 variant mirrors this operation order so the
// two agree to a few ulps (the only intended difference is the exp routine).

#include <cmath>

#include "covscan/kernel.hpp"
#include "covscan/simd/dispatch.hpp"

namespace covscan::simd::detail {

void row_scalar(double variance, double inv_l2, const double* w, int max_order, double x,
                const double* x2, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double r = x - x2[j];
    const double e = std::exp(-0.5 * inv_l2 * (r * r));
    double h_prev = 1.0;
    double acc = w[0];
    if (max_order >= 1) {
      double h = -r * inv_l2;
      acc += w[1] * h;
      for (int k = 2; k <= max_order; ++k) {
        const double h_next = -inv_l2 * (r * h + static_cast<double>(k - 1) * h_prev);
        h_prev = h;
        h = h_next;
        acc += w[k] * h;
      }
    }
    out[j] = variance * e * acc;
  }
}

}  // namespace covscan::simd::detail
