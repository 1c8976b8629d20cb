#include "hlat/simd.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "hlat/errors.hpp"
#include "simd_internal.hpp"

namespace hlat::simd {

namespace {

void scalar_vsincos(const double* x, double* out_s, double* out_c,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out_s[i] = std::sin(x[i]);
    out_c[i] = std::cos(x[i]);
  }
}

void scalar_fill_multiplier_rows(double two_t, double gamma_sq_base,
                                 const double* gamma_sq_var,
                                 double* out_m_minus, double* out_m0,
                                 double* out_m_plus, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::sqrt(gamma_sq_base + gamma_sq_var[i]);
    const double phase = two_t * g;
    const double s = std::sin(phase);
    if (out_m0) out_m0[i] = std::cos(phase);
    if (out_m_plus) out_m_plus[i] = -g * s;
    if (out_m_minus) out_m_minus[i] = -s / g;
  }
}

std::pair<double, double> scalar_dual_dot(const double* a, const double* b,
                                          const double* c, std::size_t n) {
  double sb = 0.0;
  double sc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sb += a[i] * b[i];
    sc += a[i] * c[i];
  }
  return {sb, sc};
}

bool cpu_has_avx2() {
#if defined(HLAT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

// -1 = no override; otherwise the forced Backend value.
std::atomic<int> g_override{-1};

Backend resolve_from_environment_or_auto() {
  if (const char* env = std::getenv("HLAT_BACKEND")) {
    const Backend b = backend_from_name(env);
    if (!backend_available(b)) {
      throw InvalidArgument(std::string("HLAT_BACKEND requests '") + env +
                            "' but this machine does not support it");
    }
    return b;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

const char* backend_name(Backend b) {
  return b == Backend::Scalar ? "scalar" : "avx2";
}

Backend backend_from_name(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw InvalidArgument("unknown backend '" + std::string(name) +
                        "' (expected 'scalar' or 'avx2')");
}

bool backend_available(Backend b) {
  return b == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() {
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Backend>(forced);
  static const Backend resolved = resolve_from_environment_or_auto();
  return resolved;
}

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw InvalidArgument(std::string("backend '") + backend_name(b) +
                          "' is not available on this machine");
  }
  g_override.store(static_cast<int>(b), std::memory_order_relaxed);
}

void clear_backend_override() {
  g_override.store(-1, std::memory_order_relaxed);
}

void vsincos(const double* x, double* out_s, double* out_c, std::size_t n) {
#if defined(HLAT_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) {
    detail::avx2_vsincos(x, out_s, out_c, n);
    return;
  }
#endif
  scalar_vsincos(x, out_s, out_c, n);
}

void fill_multiplier_rows(double two_t, double gamma_sq_base,
                          const double* gamma_sq_var, double* out_m_minus,
                          double* out_m0, double* out_m_plus, std::size_t n) {
#if defined(HLAT_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) {
    detail::avx2_fill_multiplier_rows(two_t, gamma_sq_base, gamma_sq_var,
                                      out_m_minus, out_m0, out_m_plus, n);
    return;
  }
#endif
  scalar_fill_multiplier_rows(two_t, gamma_sq_base, gamma_sq_var, out_m_minus,
                              out_m0, out_m_plus, n);
}

std::pair<double, double> dual_dot(const double* a, const double* b,
                                   const double* c, std::size_t n) {
#if defined(HLAT_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) {
    return detail::avx2_dual_dot(a, b, c, n);
  }
#endif
  return scalar_dual_dot(a, b, c, n);
}

}  // namespace hlat::simd
