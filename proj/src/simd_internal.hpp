#pragma once

#include <cstddef>
#include <utility>

// Declarations of the AVX2 translation unit's entry points.  Only compiled and
// referenced when the build enables HLAT_HAVE_AVX2.

namespace hlat::simd::detail {

void avx2_vsincos(const double* x, double* out_s, double* out_c, std::size_t n);

void avx2_fill_multiplier_rows(double two_t, double gamma_sq_base,
                               const double* gamma_sq_var, double* out_m_minus,
                               double* out_m0, double* out_m_plus,
                               std::size_t n);

std::pair<double, double> avx2_dual_dot(const double* a, const double* b,
                                        const double* c, std::size_t n);

}  // namespace hlat::simd::detail
