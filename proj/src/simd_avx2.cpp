#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <utility>

#include "simd_internal.hpp"

// AVX2+FMA implementations of the grid loops.  sin/cos are computed with a
// Cody-Waite three-term reduction (n = round(x * 2/pi), each pi/2 chunk 33
// bits wide, so n * chunk is exact for |n| < 2^20) followed by the classic
// double-precision minimax polynomials on |r| <= pi/4.  Arguments beyond the
// reduction's validity window fall back to libm lane by lane, as do blocks
// containing NaN/Inf.

namespace hlat::simd::detail {

namespace {

constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Mid = 6.07710050630396597660e-11;
constexpr double kPio2Lo = 2.02226624871116645580e-21;
// 2^20 * pi/2, slightly rounded down: beyond this the reduction products
// would no longer be exact.
constexpr double kMaxFastArg = 1.6471e6;

constexpr double kS1 = -1.66666666666666324348e-01;
constexpr double kS2 = 8.33333333332248946124e-03;
constexpr double kS3 = -1.98412698298579493134e-04;
constexpr double kS4 = 2.75573137070700676789e-06;
constexpr double kS5 = -2.50507602534068634195e-08;
constexpr double kS6 = 1.58969099521155010221e-10;

constexpr double kC1 = 4.16666666666666019037e-02;
constexpr double kC2 = -1.38888888888741095749e-03;
constexpr double kC3 = 2.48015872894767294178e-05;
constexpr double kC4 = -2.75573143513906633035e-07;
constexpr double kC5 = 2.08757232129817482790e-09;
constexpr double kC6 = -1.13596475577881948265e-11;

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// True (per lane) when |x| exceeds the fast-path window or is NaN.
inline int slow_lane_mask(__m256d x) {
  const __m256d bad =
      _mm256_cmp_pd(abs_pd(x), _mm256_set1_pd(kMaxFastArg), _CMP_NLE_UQ);
  return _mm256_movemask_pd(bad);
}

// Requires every lane within the fast-path window.
inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d n_d =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n_d, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(n_d, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(n_d, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(kS6);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS5));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS2));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS1));
  ps = _mm256_mul_pd(ps, z);
  ps = _mm256_fmadd_pd(ps, r, r);  // r + r*z*(S1 + z*(...))

  __m256d pc = _mm256_set1_pd(kC6);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC4));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC2));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC1));
  pc = _mm256_mul_pd(pc, _mm256_mul_pd(z, z));
  pc = _mm256_add_pd(
      pc, _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  // Quadrant recombination: q = n mod 4 swaps sin/cos on bit 0; the signs are
  // bit 1 of n (sin) and bit 1 of n+1 (cos).
  const __m128i n32 = _mm256_cvtpd_epi32(n_d);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(n64, one), one));
  const __m256d sneg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(n64, two), two));
  const __m256d cneg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(
      _mm256_and_si256(_mm256_add_epi64(n64, one), two), two));
  const __m256d signbit = _mm256_set1_pd(-0.0);
  s_out = _mm256_xor_pd(_mm256_blendv_pd(ps, pc, swap),
                        _mm256_and_pd(sneg, signbit));
  c_out = _mm256_xor_pd(_mm256_blendv_pd(pc, ps, swap),
                        _mm256_and_pd(cneg, signbit));
}

}  // namespace

void avx2_vsincos(const double* x, double* out_s, double* out_c,
                  std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    if (slow_lane_mask(xv)) {
      for (int l = 0; l < 4; ++l) {
        out_s[i + l] = std::sin(x[i + l]);
        out_c[i + l] = std::cos(x[i + l]);
      }
      continue;
    }
    __m256d s, c;
    sincos4(xv, s, c);
    _mm256_storeu_pd(out_s + i, s);
    _mm256_storeu_pd(out_c + i, c);
  }
  if (i < n) {
    alignas(32) double xb[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double sb[4];
    alignas(32) double cb[4];
    const std::size_t tail = n - i;
    for (std::size_t l = 0; l < tail; ++l) xb[l] = x[i + l];
    const __m256d xv = _mm256_load_pd(xb);
    if (slow_lane_mask(xv)) {
      for (std::size_t l = 0; l < tail; ++l) {
        out_s[i + l] = std::sin(x[i + l]);
        out_c[i + l] = std::cos(x[i + l]);
      }
      return;
    }
    __m256d s, c;
    sincos4(xv, s, c);
    _mm256_store_pd(sb, s);
    _mm256_store_pd(cb, c);
    for (std::size_t l = 0; l < tail; ++l) {
      out_s[i + l] = sb[l];
      out_c[i + l] = cb[l];
    }
  }
}

void avx2_fill_multiplier_rows(double two_t, double gamma_sq_base,
                               const double* gamma_sq_var, double* out_m_minus,
                               double* out_m0, double* out_m_plus,
                               std::size_t n) {
  const __m256d base = _mm256_set1_pd(gamma_sq_base);
  const __m256d tt = _mm256_set1_pd(two_t);
  const __m256d signbit = _mm256_set1_pd(-0.0);

  auto scalar_block = [&](std::size_t start, std::size_t count) {
    for (std::size_t l = 0; l < count; ++l) {
      const double g = std::sqrt(gamma_sq_base + gamma_sq_var[start + l]);
      const double phase = two_t * g;
      const double s = std::sin(phase);
      if (out_m0) out_m0[start + l] = std::cos(phase);
      if (out_m_plus) out_m_plus[start + l] = -g * s;
      if (out_m_minus) out_m_minus[start + l] = -s / g;
    }
  };

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g =
        _mm256_sqrt_pd(_mm256_add_pd(base, _mm256_loadu_pd(gamma_sq_var + i)));
    const __m256d phase = _mm256_mul_pd(tt, g);
    if (slow_lane_mask(phase)) {
      scalar_block(i, 4);
      continue;
    }
    __m256d s, c;
    sincos4(phase, s, c);
    if (out_m0) _mm256_storeu_pd(out_m0 + i, c);
    if (out_m_plus) {
      _mm256_storeu_pd(out_m_plus + i, _mm256_xor_pd(_mm256_mul_pd(g, s), signbit));
    }
    if (out_m_minus) {
      _mm256_storeu_pd(out_m_minus + i, _mm256_xor_pd(_mm256_div_pd(s, g), signbit));
    }
  }
  if (i < n) scalar_block(i, n - i);
}

std::pair<double, double> avx2_dual_dot(const double* a, const double* b,
                                        const double* c, std::size_t n) {
  __m256d accb = _mm256_setzero_pd();
  __m256d accc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    accb = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + i), accb);
    accc = _mm256_fmadd_pd(av, _mm256_loadu_pd(c + i), accc);
  }
  alignas(32) double tb[4];
  alignas(32) double tc[4];
  _mm256_store_pd(tb, accb);
  _mm256_store_pd(tc, accc);
  double sb = (tb[0] + tb[1]) + (tb[2] + tb[3]);
  double sc = (tc[0] + tc[1]) + (tc[2] + tc[3]);
  for (; i < n; ++i) {
    sb += a[i] * b[i];
    sc += a[i] * c[i];
  }
  return {sb, sc};
}

}  // namespace hlat::simd::detail
