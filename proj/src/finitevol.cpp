#include "hlat/finitevol.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "hlat/dynamics.hpp"
#include "hlat/errors.hpp"
#include "hlat/fft.hpp"

namespace hlat {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_rank(const FiniteVolume& vol, const std::vector<int>& site) {
  if (static_cast<int>(site.size()) != vol.params.d) {
    throw DimensionMismatch("site has rank " + std::to_string(site.size()) +
                            ", box has dimension " + std::to_string(vol.params.d));
  }
}

}  // namespace

FiniteVolume::FiniteVolume(int box_radius, ModelParams model)
    : L(box_radius), params(std::move(model)) {
  params.validate();
  if (L < 1) throw InvalidArgument("box radius must be >= 1, got " + std::to_string(L));
}

std::size_t FiniteVolume::box_size() const {
  std::size_t n = 1;
  for (int j = 0; j < params.d; ++j) n *= static_cast<std::size_t>(2 * L);
  return n;
}

std::size_t FiniteVolume::index_of(const std::vector<int>& site) const {
  check_rank(*this, site);
  std::size_t flat = 0;
  for (int x : site) {
    if (x <= -L || x > L) {
      throw InvalidArgument("site coordinate " + std::to_string(x) +
                            " outside (-L, L] for L = " + std::to_string(L));
    }
    const int digit = x >= 0 ? x : x + 2 * L;
    flat = flat * static_cast<std::size_t>(2 * L) + static_cast<std::size_t>(digit);
  }
  return flat;
}

std::vector<int> FiniteVolume::site_of(std::size_t index) const {
  if (index >= box_size()) {
    throw InvalidArgument("flat index " + std::to_string(index) +
                          " outside a box of size " + std::to_string(box_size()));
  }
  std::vector<int> site(params.d);
  const std::size_t n = static_cast<std::size_t>(2 * L);
  for (int j = params.d - 1; j >= 0; --j) {
    const int digit = static_cast<int>(index % n);
    index /= n;
    site[j] = digit <= L ? digit : digit - 2 * L;
  }
  return site;
}

BoxFunction evolve_finite(const FiniteVolume& vol, const BoxFunction& f, double t) {
  const std::size_t size = vol.box_size();
  if (f.size() != size) {
    throw SizeMismatch("box function has " + std::to_string(f.size()) +
                       " entries, box has " + std::to_string(size));
  }
  if (!(vol.params.omega > 0.0)) {
    throw InvalidModel("finite-volume evolution needs a positive gap");
  }
  if (t == 0.0) return f;

  const int d = vol.params.d;
  const int n = 2 * vol.L;
  const std::vector<int> shape(static_cast<std::size_t>(d), n);

  BoxFunction conj_f(size);
  for (std::size_t i = 0; i < size; ++i) conj_f[i] = std::conj(f[i]);
  BoxFunction p = fft::forward(f, shape);
  BoxFunction q = fft::forward(conj_f, shape);

  // Per-axis spectral weights 4 lambda_j sin^2(k_j / 2) at k_j = pi g / L.
  std::vector<std::vector<double>> var(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    var[j].resize(static_cast<std::size_t>(n));
    for (int g = 0; g < n; ++g) {
      const double s = std::sin(kPi * g / n);
      var[j][g] = 4.0 * vol.params.lambdas[j] * s * s;
    }
  }

  // Diagonalize mode by mode: split (p, q) into normal-mode amplitudes with
  // the weights 1/sqrt(gamma) +- sqrt(gamma), rotate them by exp(+-2i gamma t),
  // and recombine.  The splitting satisfies gp^2 - gm^2 = 4, so t = 0 is the
  // identity up to rounding.
  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  const std::complex<double> half_i(0.0, 0.5);
  for (std::size_t i = 0; i < size; ++i) {
    double gamma_sq = vol.params.omega * vol.params.omega;
    for (int j = 0; j < d; ++j) gamma_sq += var[j][digit[j]];
    const double gamma = std::sqrt(gamma_sq);
    const double root = std::sqrt(gamma);
    const double gp = 1.0 / root + root;
    const double gm = 1.0 / root - root;

    const std::complex<double> p1 = -half_i * (gp * p[i] + gm * q[i]);
    const std::complex<double> q1 = half_i * (gp * q[i] + gm * p[i]);
    const std::complex<double> phase = std::polar(1.0, 2.0 * gamma * t);
    const std::complex<double> p2 = phase * p1;
    const std::complex<double> q2 = std::conj(phase) * q1;
    p[i] = half_i * (gp * p2 + gm * q2);

    for (int j = d - 1; j >= 0; --j) {
      if (++digit[j] < n) break;
      digit[j] = 0;
    }
  }

  return fft::backward(p, shape);
}

double discrete_symplectic_form(const BoxFunction& f, const BoxFunction& g) {
  if (f.size() != g.size()) {
    throw SizeMismatch("box functions have sizes " + std::to_string(f.size()) +
                       " and " + std::to_string(g.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc += std::imag(std::conj(f[i]) * g[i]);
  }
  return acc;
}

double compare_finite_infinite(const ModelParams& params, int L,
                               const LatticeFunction& f, double t,
                               const QuadratureSpec& spec) {
  if (f.dimension() != params.d) {
    throw DimensionMismatch("function has dimension " + std::to_string(f.dimension()) +
                            ", model has " + std::to_string(params.d));
  }
  const FiniteVolume vol(L, params);
  BoxFunction boxed(vol.box_size());
  for (const auto& [site, amp] : f.entries()) {
    for (int x : site) {
      if (x <= -L || x > L) {
        throw InvalidArgument("support of f does not fit in the box of radius " +
                              std::to_string(L));
      }
    }
    boxed[vol.index_of(site)] = amp;
  }

  const BoxFunction finite = evolve_finite(vol, boxed, t);
  const EvolutionResult infinite = evolve_covering(params, f, t, spec, L);

  double worst = 0.0;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    const double diff = std::abs(finite[i] - infinite.function.at(vol.site_of(i)));
    worst = std::max(worst, diff);
  }
  return worst;
}

}  // namespace hlat
