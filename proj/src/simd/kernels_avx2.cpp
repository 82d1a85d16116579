// AVX2/FMA variants. Compiled with -mavx2 -mfma and only reached after the
// dispatcher has confirmed both feature bits.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace osgood::simd {
namespace {

constexpr double kExpHi = 709.782712893384;
constexpr double kExpLo = -745.1332191019411;

// exp on four lanes: Cody-Waite reduction by ln 2, degree-13 Taylor
// polynomial on |r| <= ln2/2, and a two-factor 2^n scale so that results
// down to the subnormal range are formed without overflow in the exponent.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(kExpHi);
  const __m256d lo = _mm256_set1_pd(kExpLo);
  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), xc);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(n32, 1);
  const __m128i n2 = _mm_sub_epi32(n32, n1);
  const __m128i bias = _mm_set1_epi32(1023);
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n1, bias)), 52));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n2, bias)), 52));
  __m256d y = _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);

  y = _mm256_blendv_pd(y, _mm256_set1_pd(HUGE_VAL), _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  y = _mm256_blendv_pd(y, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  return y;
}

// (1 - e^-x)/x for x >= 0, given e = e^-x.
inline __m256d one_minus_exp_over_x(__m256d x, __m256d e) {
  const __m256d direct = _mm256_div_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), e), x);
  // sum_{k=0}^{15} (-x)^k / (k+1)!
  const __m256d mx = _mm256_sub_pd(_mm256_setzero_pd(), x);
  __m256d p = _mm256_set1_pd(1.0 / 355687428096000.0);
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 20922789888000.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 1307674368000.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 87178291200.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 6227020800.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, mx, _mm256_set1_pd(1.0));
  const __m256d small = _mm256_cmp_pd(x, _mm256_set1_pd(0.5), _CMP_LT_OQ);
  return _mm256_blendv_pd(direct, p, small);
}

void exp_batch_avx2(const double* x, double* out, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  }
  if (i < count) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < count; ++j) buf[j - i] = x[j];
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    for (std::size_t j = i; j < count; ++j) out[j] = buf[j - i];
  }
}

inline __m256d kernel_lanes(int dim, __m256d rv, __m256d inv4t, __m256d invt, __m256d pref,
                            __m256d rho) {
  const __m256d d = _mm256_sub_pd(rv, rho);
  const __m256d g = exp_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), _mm256_sub_pd(_mm256_setzero_pd(), inv4t)));
  const __m256d x = _mm256_mul_pd(_mm256_mul_pd(rv, rho), invt);
  __m256d a;
  if (dim == 1) {
    a = _mm256_add_pd(_mm256_set1_pd(1.0), exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), x)));
  } else if (dim == 2) {
    alignas(32) double xs[4];
    alignas(32) double as[4];
    _mm256_store_pd(xs, x);
    for (int l = 0; l < 4; ++l) as[l] = scaled_bessel_i0_half(xs[l]);
    a = _mm256_load_pd(as);
  } else {
    a = one_minus_exp_over_x(x, exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), x)));
  }
  return _mm256_mul_pd(_mm256_mul_pd(pref, g), a);
}

void radial_kernel_avx2(int dim, double r, double t, const double* rho, double* out,
                        std::size_t count) {
  const __m256d rv = _mm256_set1_pd(r);
  const __m256d inv4t = _mm256_set1_pd(1.0 / (4.0 * t));
  const __m256d invt = _mm256_set1_pd(1.0 / t);
  const __m256d pref = _mm256_set1_pd(detail::kernel_prefactor(dim, t));
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(out + i, kernel_lanes(dim, rv, inv4t, invt, pref, _mm256_loadu_pd(rho + i)));
  }
  if (i < count) {
    alignas(32) double buf[4];
    for (std::size_t j = 0; j < 4; ++j) buf[j] = i + j < count ? rho[i + j] : rho[i];
    _mm256_store_pd(buf, kernel_lanes(dim, rv, inv4t, invt, pref, _mm256_load_pd(buf)));
    for (std::size_t j = i; j < count; ++j) out[j] = buf[j - i];
  }
}

double dot_avx2(const double* a, const double* b, std::size_t count) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= count; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < count; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelTable& detail::avx2_table() noexcept {
  static const KernelTable table{Isa::Avx2, &exp_batch_avx2, &radial_kernel_avx2, &dot_avx2};
  return table;
}

}  // namespace osgood::simd
