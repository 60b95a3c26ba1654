// AVX2/FMA row kernel. Compiled with -mavx2 -mfma and only called after a
// runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include "covscan/simd/dispatch.hpp"

namespace covscan::simd::detail {

namespace {

// exp(x) for x in roughly [-708, 709]; Cephes rational approximation with a
// two-constant ln2 split. Inputs below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  xc = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125e-1), xc);
  xc = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212e-6), xc);

  const __m256d xx = _mm256_mul_pd(xc, xc);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878e-4), xx,
                              _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, xc);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042e-6), xx,
                              _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009e0));

  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^fx via the exponent field; fx is within [-1022, 1023] after clamping.
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n64));

  return _mm256_andnot_pd(underflow, r);
}

}  // namespace

void row_avx2(double variance, double inv_l2, const double* w, int max_order, double x,
              const double* x2, double* out, std::size_t n) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vinv = _mm256_set1_pd(inv_l2);
  const __m256d vneg_inv = _mm256_set1_pd(-inv_l2);
  const __m256d vneg_half_inv = _mm256_set1_pd(-0.5 * inv_l2);
  const __m256d vvar = _mm256_set1_pd(variance);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d r = _mm256_sub_pd(vx, _mm256_loadu_pd(x2 + j));
    const __m256d e = exp_pd(_mm256_mul_pd(vneg_half_inv, _mm256_mul_pd(r, r)));
    __m256d acc = _mm256_set1_pd(w[0]);
    if (max_order >= 1) {
      __m256d h_prev = _mm256_set1_pd(1.0);
      __m256d h = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), r), vinv);
      acc = _mm256_fmadd_pd(_mm256_set1_pd(w[1]), h, acc);
      for (int k = 2; k <= max_order; ++k) {
        const __m256d t =
            _mm256_fmadd_pd(r, h, _mm256_mul_pd(_mm256_set1_pd(static_cast<double>(k - 1)), h_prev));
        const __m256d h_next = _mm256_mul_pd(vneg_inv, t);
        h_prev = h;
        h = h_next;
        acc = _mm256_fmadd_pd(_mm256_set1_pd(w[k]), h, acc);
      }
    }
    _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_mul_pd(vvar, e), acc));
  }
  if (j < n) row_scalar(variance, inv_l2, w, max_order, x, x2 + j, out + j, n - j);
}

}  // namespace covscan::simd::detail
