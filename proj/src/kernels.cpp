#include "hlat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

#include "hlat/errors.hpp"
#include "hlat/fft.hpp"
#include "hlat/simd.hpp"

namespace hlat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hard ceiling on grid points per refinement level so that three in-flight
// multiplier grids stay within a few gigabytes.
constexpr double kMaxGridPoints = 1.5e8;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int mod_reduce(long long v, int n) {
  const long long r = v % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

// Flip the site to its canonical representative (first nonzero component
// positive) so that x and -x evaluate identically, bit for bit.
std::vector<int> canonical_site(const std::vector<int>& x) {
  for (int v : x) {
    if (v > 0) return x;
    if (v < 0) {
      std::vector<int> y(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) y[j] = -x[j];
      return y;
    }
  }
  return x;
}

void check_site_rank(const ModelParams& params, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != params.d) {
    throw DimensionMismatch("kernel site rank does not match the model dimension");
  }
}

// Starting grid points per axis: enough to resolve the phase oscillation at
// this t, to hold the requested box, and never below base_points.
int initial_grid(const ModelParams& params, double t, int radius,
                 const QuadratureSpec& spec) {
  if (!spec.auto_scale) {
    if (spec.base_points < 2 * radius + 1) {
      throw BoxTooLarge("requested box does not fit in the fixed quadrature grid");
    }
    return spec.base_points;
  }
  const double lam_sum = params.lambda_sum();
  const double omega_eff =
      params.omega > 0.0 ? params.omega : std::sqrt(std::max(lam_sum, 1e-300));
  const double oscillation =
      8.0 * (1.0 + std::ceil(std::abs(t) * (params.omega + lam_sum) / omega_eff));
  const double demand = std::max(
      {static_cast<double>(spec.base_points), oscillation, 2.0 * radius + 2.0});
  if (demand > kMaxGridPoints) {
    throw BoxTooLarge("starting quadrature grid exceeds the point budget");
  }
  int n = spec.base_points;
  while (n < demand) n *= 2;
  return n;
}

void check_level_budget(int n, int d) {
  if (std::pow(static_cast<double>(n), d) > kMaxGridPoints) {
    throw BoxTooLarge("refined quadrature grid exceeds the point budget");
  }
}

// Per-level precomputation shared by the streamed and tabulated paths.
// sinsq[i] = sin^2(pi i / n) is filled for i <= n/2 and mirrored bitwise to
// i > n/2, which keeps every multiplier grid exactly even on the grid.
struct LevelContext {
  std::vector<double> sinsq;
  std::vector<double> var;  // 4 lambda_last sin^2(pi i / n)

  LevelContext(const ModelParams& params, int n) : sinsq(n), var(n) {
    for (int i = 0; i <= n / 2; ++i) {
      const double s = std::sin(kPi * i / n);
      sinsq[i] = s * s;
    }
    for (int i = n / 2 + 1; i < n; ++i) sinsq[i] = sinsq[n - i];
    const double c = 4.0 * params.lambdas.back();
    for (int i = 0; i < n; ++i) var[i] = c * sinsq[i];
  }

  double row_base(const ModelParams& params, const std::vector<int>& digits) const {
    double base = params.omega * params.omega;
    for (std::size_t j = 0; j < digits.size(); ++j) {
      base += 4.0 * params.lambdas[j] * sinsq[digits[j]];
    }
    return base;
  }
};

bool advance_odometer(std::vector<int>& digits, int n) {
  for (int j = static_cast<int>(digits.size()) - 1; j >= 0; --j) {
    if (++digits[j] < n) return true;
    digits[j] = 0;
  }
  return false;
}

// Trapezoid sums for the requested weight exponents at a single canonical
// site, streaming the grid one innermost-axis row at a time.
std::array<double, 3> stream_point(const ModelParams& params, double t,
                                   const std::vector<int>& x, int n,
                                   const std::array<bool, 3>& want) {
  const int d = params.d;
  const LevelContext ctx(params, n);

  // cos / sin of 2 pi q / n, indexed by the phase residue q.
  std::vector<double> angles(n), ctab(n), stab(n);
  for (int q = 0; q < n; ++q) angles[q] = kTwoPi * q / n;
  simd::vsincos(angles.data(), stab.data(), ctab.data(), n);

  // Innermost-axis phase factors for this site.
  const int step = mod_reduce(x[d - 1], n);
  std::vector<double> cos_row(n), sin_row(n);
  int q = 0;
  for (int i = 0; i < n; ++i) {
    cos_row[i] = ctab[q];
    sin_row[i] = stab[q];
    q += step;
    if (q >= n) q -= n;
  }

  std::vector<double> row_minus(want[0] ? n : 0);
  std::vector<double> row_zero(want[1] ? n : 0);
  std::vector<double> row_plus(want[2] ? n : 0);

  std::vector<int> digits(d > 1 ? d - 1 : 0, 0);
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  do {
    const double base = ctx.row_base(params, digits);
    long long qrest = 0;
    for (std::size_t j = 0; j < digits.size(); ++j) {
      qrest += static_cast<long long>(digits[j]) * mod_reduce(x[j], n);
    }
    const int qr = mod_reduce(qrest, n);
    simd::fill_multiplier_rows(2.0 * t, base, ctx.var.data(),
                               want[0] ? row_minus.data() : nullptr,
                               want[1] ? row_zero.data() : nullptr,
                               want[2] ? row_plus.data() : nullptr, n);
    const double cphi = ctab[qr];
    const double sphi = stab[qr];
    const auto accumulate = [&](int slot, const std::vector<double>& row) {
      const auto [sc, ss] =
          simd::dual_dot(row.data(), cos_row.data(), sin_row.data(), n);
      acc[slot] += cphi * sc - sphi * ss;
    };
    if (want[0]) accumulate(0, row_minus);
    if (want[1]) accumulate(1, row_zero);
    if (want[2]) accumulate(2, row_plus);
  } while (advance_odometer(digits, n));

  const double norm = std::pow(static_cast<double>(n), -d);
  for (double& v : acc) v *= norm;
  return acc;
}

// A grid-to-grid difference of exactly zero only means the change fell below
// the rounding resolution of the sums; it cannot certify accuracy beyond
// machine precision.  Flooring the reported error there keeps sub-epsilon
// tolerances honestly unattainable.
double error_floor(double magnitude) {
  return std::numeric_limits<double>::epsilon() * std::max(1.0, magnitude);
}

std::array<double, 3> refine_point(const ModelParams& params, double t,
                                   const std::vector<int>& x,
                                   const QuadratureSpec& spec,
                                   const std::array<bool, 3>& want,
                                   double* est_error_out) {
  int radius = 0;
  for (int v : x) radius = std::max(radius, std::abs(v));
  const int n0 = initial_grid(params, t, radius, spec);
  check_level_budget(n0, params.d);
  std::array<double, 3> prev = stream_point(params, t, x, n0, want);
  for (int k = 1; k <= spec.max_doublings; ++k) {
    const long long n = static_cast<long long>(n0) << k;
    if (n > static_cast<long long>(kMaxGridPoints)) {
      throw BoxTooLarge("refined quadrature grid exceeds the point budget");
    }
    check_level_budget(static_cast<int>(n), params.d);
    const std::array<double, 3> cur =
        stream_point(params, t, x, static_cast<int>(n), want);
    double delta = 0.0;
    double magnitude = 0.0;
    for (int s = 0; s < 3; ++s) {
      if (!want[s]) continue;
      delta = std::max(delta, std::abs(cur[s] - prev[s]));
      magnitude = std::max(magnitude, std::abs(cur[s]));
    }
    delta = std::max(delta, error_floor(magnitude));
    if (delta <= spec.tolerance) {
      if (est_error_out) *est_error_out = delta;
      return cur;
    }
    prev = cur;
  }
  throw NoConvergence("kernel quadrature did not reach tolerance within the doubling budget");
}

// One full table level: fill the three multiplier grids in a single
// dispersion pass, transform, and extract the box.  Mirror sites are copied
// from their canonical representative so the parity symmetry is exact.
std::array<std::vector<double>, 3> table_level(const ModelParams& params,
                                               double t, int radius, int n) {
  const int d = params.d;
  const LevelContext ctx(params, n);
  const std::vector<int> shape(static_cast<std::size_t>(d), n);
  fft::RealGridTransform grid_minus(shape);
  fft::RealGridTransform grid_zero(shape);
  fft::RealGridTransform grid_plus(shape);

  std::vector<int> digits(d > 1 ? d - 1 : 0, 0);
  std::size_t r = 0;
  do {
    const double base = ctx.row_base(params, digits);
    simd::fill_multiplier_rows(2.0 * t, base, ctx.var.data(),
                               grid_minus.row(r), grid_zero.row(r),
                               grid_plus.row(r), n);
    ++r;
  } while (advance_odometer(digits, n));

  grid_minus.execute();
  grid_zero.execute();
  grid_plus.execute();

  const fft::RealGridTransform* grids[3] = {&grid_minus, &grid_zero, &grid_plus};
  // The multiplier grids are exactly even, so the spectra are real up to
  // rounding; the residue bound scales with the largest multiplier value.
  const double gamma_max =
      std::sqrt(params.omega * params.omega + 4.0 * params.lambda_sum());
  const double residue_bounds[3] = {std::max(1.0, 1.0 / params.omega), 1.0,
                                    std::max(1.0, gamma_max)};

  const double norm = std::pow(static_cast<double>(n), -d);
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  std::size_t box_total = 1;
  for (int j = 0; j < d; ++j) box_total *= side;

  std::array<std::vector<double>, 3> out;
  for (auto& layer : out) layer.resize(box_total);

  std::vector<int> site(static_cast<std::size_t>(d), -radius);
  std::size_t flat = 0;
  while (true) {
    const std::vector<int> c = canonical_site(site);
    for (int s = 0; s < 3; ++s) {
      out[s][flat] = grids[s]->real_at(c) * norm;
      const double residue = std::abs(grids[s]->imag_at(c)) * norm;
      if (!(residue <= 1e-9 * residue_bounds[s])) {
        throw Error("internal: even-symmetry residue of the kernel spectrum exceeded its bound");
      }
    }
    ++flat;
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++site[j] <= radius) break;
      site[j] = -radius;
    }
    if (j < 0) break;
  }
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (base_points < 16 || !is_power_of_two(base_points)) {
    throw InvalidArgument("base_points must be a power of two, at least 16");
  }
  if (!(tolerance > 0.0)) {
    throw InvalidArgument("tolerance must be positive");
  }
  if (max_doublings < 1 || max_doublings > 12) {
    throw InvalidArgument("max_doublings must lie in 1..12");
  }
  if (!(truncation_tolerance > 0.0)) {
    throw InvalidArgument("truncation_tolerance must be positive");
  }
  if (max_radius_growths < 1) {
    throw InvalidArgument("max_radius_growths must be positive");
  }
}

KernelIndex::KernelIndex(int m) : m_(m) {
  if (m < -1 || m > 1) {
    throw InvalidArgument("kernel weight exponent must be -1, 0, or +1");
  }
}

double KernelTable::value(KernelIndex m, const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != params.d) {
    throw DimensionMismatch("table lookup rank does not match the model dimension");
  }
  std::size_t flat = 0;
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  for (int j = 0; j < params.d; ++j) {
    if (x[j] < -radius || x[j] > radius) {
      throw InvalidArgument("site lies outside the tabulated box");
    }
    flat = flat * side + static_cast<std::size_t>(x[j] + radius);
  }
  return values[static_cast<std::size_t>(m.get() + 1)][flat];
}

double kernel_value(const ModelParams& params, KernelIndex m, double t,
                    const std::vector<int>& x, const QuadratureSpec& spec,
                    double* est_error_out) {
  params.validate();
  spec.validate();
  check_site_rank(params, x);
  if (m.get() == -1 && !(params.omega > 0.0)) {
    throw InvalidKernel("the 1/dispersion weight diverges for a gapless model");
  }
  const std::vector<int> c = canonical_site(x);
  std::array<bool, 3> want{false, false, false};
  want[static_cast<std::size_t>(m.get() + 1)] = true;
  const auto vals = refine_point(params, t, c, spec, want, est_error_out);
  return vals[static_cast<std::size_t>(m.get() + 1)];
}

std::array<double, 3> kernel_values_at(const ModelParams& params, double t,
                                       const std::vector<int>& x,
                                       const QuadratureSpec& spec,
                                       double* est_error_out) {
  params.validate();
  spec.validate();
  check_site_rank(params, x);
  if (!(params.omega > 0.0)) {
    throw InvalidKernel("the 1/dispersion weight diverges for a gapless model");
  }
  const std::vector<int> c = canonical_site(x);
  return refine_point(params, t, c, spec, {true, true, true}, est_error_out);
}

KernelTable kernel_table(const ModelParams& params, double t, int radius,
                         const QuadratureSpec& spec) {
  params.validate();
  spec.validate();
  if (radius < 0) throw InvalidArgument("table radius must be non-negative");
  if (!(params.omega > 0.0)) {
    throw InvalidKernel("the 1/dispersion weight diverges for a gapless model");
  }
  const int n0 = initial_grid(params, t, radius, spec);
  check_level_budget(n0, params.d);
  std::array<std::vector<double>, 3> prev = table_level(params, t, radius, n0);
  for (int k = 1; k <= spec.max_doublings; ++k) {
    const long long n = static_cast<long long>(n0) << k;
    if (n > static_cast<long long>(kMaxGridPoints)) {
      throw BoxTooLarge("refined quadrature grid exceeds the point budget");
    }
    check_level_budget(static_cast<int>(n), params.d);
    std::array<std::vector<double>, 3> cur =
        table_level(params, t, radius, static_cast<int>(n));
    double delta = 0.0;
    double magnitude = 0.0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < cur[s].size(); ++i) {
        delta = std::max(delta, std::abs(cur[s][i] - prev[s][i]));
        magnitude = std::max(magnitude, std::abs(cur[s][i]));
      }
    }
    delta = std::max(delta, error_floor(magnitude));
    if (delta <= spec.tolerance) {
      KernelTable table;
      table.params = params;
      table.t = t;
      table.radius = radius;
      table.resolution = static_cast<int>(n);
      table.est_error = delta;
      table.values = std::move(cur);
      return table;
    }
    prev = std::move(cur);
  }
  throw NoConvergence("kernel quadrature did not reach tolerance within the doubling budget");
}

double stationary_phase_estimate(const ModelParams& params, KernelIndex m,
                                 double t, const std::vector<int>& x) {
  params.validate_strict();
  check_site_rank(params, x);
  if (!(std::abs(t) >= 1.0)) {
    throw InvalidArgument("the stationary phase expansion requires |t| >= 1");
  }
  const int d = params.d;
  double lam_prod = 1.0;
  for (double l : params.lambdas) lam_prod *= l;
  const double prefactor =
      std::pow(kPi / std::abs(t), d / 2.0) / std::pow(kTwoPi, d);
  const double time_sign = t > 0.0 ? 1.0 : -1.0;

  std::complex<double> sum = 0.0;
  for (const CriticalPoint& cp : critical_points(params)) {
    // Coordinates are exactly 0 or pi, so the plane-wave factor at an integer
    // site is exactly +1 or -1 and the signature counts the curvature signs.
    int pi_site_sum = 0;
    int signature = 0;
    for (int j = 0; j < d; ++j) {
      if (cp.coords[j] == 0.0) {
        signature += 1;
      } else {
        signature -= 1;
        pi_site_sum += x[j];
      }
    }
    const double plane_wave = (pi_site_sum % 2 == 0) ? 1.0 : -1.0;
    const double amplitude =
        std::pow(cp.gamma_value, m.get() + d / 2.0) / std::sqrt(lam_prod);
    const double phase =
        -2.0 * t * cp.gamma_value - (kPi / 4.0) * time_sign * signature;
    sum += plane_wave * amplitude * std::polar(1.0, phase);
  }
  const std::complex<double> value = prefactor * sum;
  return m.get() == 0 ? value.real() : value.imag();
}

double bessel_oracle_1d(double lambda, double t, long long x) {
  if (!(lambda > 0.0)) {
    throw InvalidArgument("the closed-form oracle requires a positive coupling");
  }
  const double order = 2.0 * static_cast<double>(x < 0 ? -x : x);
  return std::cyl_bessel_j(order, 4.0 * std::sqrt(lambda) * std::abs(t));
}

double gaussian_quadratic_selftest(int d, const std::vector<int>& signature,
                                   double t) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (static_cast<int>(signature.size()) != d) {
    throw InvalidArgument("signature size must equal the dimension");
  }
  std::complex<double> prod = 1.0;
  for (int s : signature) {
    if (s != 1 && s != -1) {
      throw InvalidArgument("signature entries must be +1 or -1");
    }
    prod *= std::sqrt(kPi / std::complex<double>(1.0, -static_cast<double>(s) * t));
  }
  return std::abs(prod);
}

}  // namespace hlat
