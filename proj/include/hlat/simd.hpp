#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

namespace hlat::simd {

// Numerical backends for the hot grid loops.  Scalar is the portable libm
// reference; Avx2 is an x86 vector implementation selected at runtime when the
// CPU supports it.  Results agree to ~1e-13 but are not bit-identical, so one
// run sticks to one backend.
enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);

// Parses "scalar" / "avx2".  Throws InvalidArgument for anything else.
Backend backend_from_name(std::string_view name);

// True if the backend can run on this machine (Scalar always can).
bool backend_available(Backend b);

// The backend used by all operations below.  Resolution order: a forced
// override if set, else the HLAT_BACKEND environment variable ("scalar" or
// "avx2"; anything else throws InvalidArgument), else the best available.
Backend active_backend();

// Overrides backend selection process-wide.  Throws InvalidArgument if the
// backend is not available on this machine.
void force_backend(Backend b);

// Removes the override; selection reverts to environment/auto.
void clear_backend_override();

// out_s[i] = sin(x[i]), out_c[i] = cos(x[i]).
void vsincos(const double* x, double* out_s, double* out_c, std::size_t n);

// Fills up to three Fourier-multiplier rows from a row of squared dispersion
// values gamma^2 = gamma_sq_base + gamma_sq_var[i]:
//   out_m0[i]      = cos(two_t * g)
//   out_m_plus[i]  = -g * sin(two_t * g)
//   out_m_minus[i] = -sin(two_t * g) / g
// Null output pointers skip that component.  The m = -1 row requires
// gamma^2 > 0 on every point.
void fill_multiplier_rows(double two_t, double gamma_sq_base,
                          const double* gamma_sq_var, double* out_m_minus,
                          double* out_m0, double* out_m_plus, std::size_t n);

// (sum_i a[i]*b[i], sum_i a[i]*c[i]) in one pass over a.
std::pair<double, double> dual_dot(const double* a, const double* b,
                                   const double* c, std::size_t n);

}  // namespace hlat::simd
