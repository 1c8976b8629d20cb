#include "hlat/model.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "hlat/errors.hpp"

namespace hlat {

namespace {

constexpr double kPi = std::numbers::pi;

double canonical_angle(double k) {
  double r = std::remainder(k, 2 * kPi);
  if (r <= -kPi) r = kPi;  // remainder lands in [-pi, pi]; fold -pi to +pi
  return r;
}

// The canonical representative of pi is the nearest double, where std::sin
// returns ~1.2e-16 instead of 0.  Parity identities (gradient zeros, vanishing
// off-diagonal curvature) are stated exactly at {0, pi}, so treat those two
// representatives as the exact angles.
double sin_canonical(double k) {
  if (k == 0.0 || k == kPi) return 0.0;
  return std::sin(k);
}

void check_dimension(const ModelParams& params, const TorusPoint& k) {
  if (static_cast<int>(k.k.size()) != params.d) {
    throw DimensionMismatch("torus point has dimension " +
                            std::to_string(k.k.size()) + ", model has " +
                            std::to_string(params.d));
  }
}

}  // namespace

void ModelParams::validate() const {
  if (d < 1) throw InvalidModel("dimension must be >= 1, got " + std::to_string(d));
  if (!(omega >= 0.0)) {
    throw InvalidModel("on-site energy must be >= 0, got " + std::to_string(omega));
  }
  if (static_cast<int>(lambdas.size()) != d) {
    throw InvalidModel("expected " + std::to_string(d) + " couplings, got " +
                       std::to_string(lambdas.size()));
  }
  for (double l : lambdas) {
    if (!(l >= 0.0)) {
      throw InvalidModel("couplings must be >= 0, got " + std::to_string(l));
    }
  }
}

void ModelParams::validate_strict() const {
  validate();
  if (!(omega > 0.0)) {
    throw InvalidModel("on-site energy must be > 0 in strict mode");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) {
      throw DegenerateModel("all couplings must be > 0 in strict mode");
    }
  }
}

double ModelParams::lambda_sum() const {
  double s = 0.0;
  for (double l : lambdas) s += l;
  return s;
}

TorusPoint::TorusPoint(std::vector<double> coords) : k(std::move(coords)) {
  for (auto& c : k) c = canonical_angle(c);
}

double dispersion(const ModelParams& params, const TorusPoint& k) {
  params.validate();
  check_dimension(params, k);
  double s = params.omega * params.omega;
  for (int j = 0; j < params.d; ++j) {
    const double sj = std::sin(k.k[j] / 2);
    s += 4.0 * params.lambdas[j] * sj * sj;
  }
  return std::sqrt(s);
}

std::vector<double> dispersion_gradient(const ModelParams& params,
                                        const TorusPoint& k) {
  params.validate();
  check_dimension(params, k);
  const double g = dispersion(params, k);
  std::vector<double> grad(params.d);
  for (int j = 0; j < params.d; ++j) {
    grad[j] = params.lambdas[j] * sin_canonical(k.k[j]) / g;
  }
  return grad;
}

std::vector<std::vector<double>> dispersion_hessian(const ModelParams& params,
                                                    const TorusPoint& k) {
  params.validate();
  check_dimension(params, k);
  const double g = dispersion(params, k);
  const double g3 = g * g * g;
  std::vector<std::vector<double>> h(params.d, std::vector<double>(params.d));
  for (int j = 0; j < params.d; ++j) {
    // omega_sq_j = gamma^2 with the j-th coupling term removed.
    double omega_sq_j = params.omega * params.omega;
    for (int i = 0; i < params.d; ++i) {
      if (i == j) continue;
      const double si = std::sin(k.k[i] / 2);
      omega_sq_j += 4.0 * params.lambdas[i] * si * si;
    }
    const double lj = params.lambdas[j];
    const double cj = std::cos(k.k[j]);
    h[j][j] = (lj * omega_sq_j * cj - lj * lj * (1 - cj) * (1 - cj)) / g3;
    for (int i = 0; i < j; ++i) {
      const double off = -params.lambdas[i] * lj * sin_canonical(k.k[i]) *
                         sin_canonical(k.k[j]) / g3;
      h[i][j] = off;
      h[j][i] = off;
    }
  }
  return h;
}

std::vector<CriticalPoint> critical_points(const ModelParams& params) {
  params.validate_strict();
  std::vector<CriticalPoint> pts;
  pts.reserve(std::size_t{1} << params.d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << params.d); ++mask) {
    CriticalPoint cp;
    cp.coords.resize(params.d);
    for (int j = 0; j < params.d; ++j) {
      // Last axis counts fastest.
      cp.coords[j] = ((mask >> (params.d - 1 - j)) & 1) ? kPi : 0.0;
    }
    cp.gamma_value = dispersion(params, TorusPoint(cp.coords));
    cp.hessian_diag.resize(params.d);
    cp.signature.resize(params.d);
    for (int j = 0; j < params.d; ++j) {
      const double c = (cp.coords[j] == 0.0) ? 1.0 : -1.0;
      cp.hessian_diag[j] = params.lambdas[j] * c / cp.gamma_value;
      cp.signature[j] = (cp.hessian_diag[j] > 0) ? 1 : -1;
    }
    pts.push_back(std::move(cp));
  }
  return pts;
}

std::pair<double, double> bogoliubov_multipliers(const ModelParams& params,
                                                 const TorusPoint& k) {
  params.validate();
  if (!(params.omega > 0.0)) {
    throw InvalidModel("bogoliubov multipliers need omega > 0 (finite 1/gamma)");
  }
  const double g = dispersion(params, k);
  const double rs = std::sqrt(g);
  return {1.0 / rs + rs, 1.0 / rs - rs};
}

}  // namespace hlat
