#pragma once

#include <utility>
#include <vector>

namespace hlat {

// Harmonic-lattice model: dimension d, on-site energy omega, and one
// nearest-neighbour coupling per axis.
struct ModelParams {
  int d = 1;
  double omega = 1.0;
  std::vector<double> lambdas;

  // Invariants every operation relies on: d >= 1, omega >= 0 (omega = 0 is the
  // oracle regime a few kernel routines admit), lambdas.size() == d, every
  // coupling >= 0.  Throws InvalidModel.
  void validate() const;

  // Additionally requires omega > 0 and every coupling > 0, the regime in
  // which the dispersion has isolated non-degenerate critical points.  Throws
  // InvalidModel (omega) or DegenerateModel (couplings).
  void validate_strict() const;

  double lambda_sum() const;
};

// A point on the d-torus with every component canonicalized into (-pi, pi].
struct TorusPoint {
  std::vector<double> k;

  explicit TorusPoint(std::vector<double> coords);
};

// One critical point of the dispersion: coordinates in {0, pi}^d, the
// dispersion value there, and the (diagonal) curvatures with their signs.
struct CriticalPoint {
  std::vector<double> coords;
  double gamma_value = 0.0;
  std::vector<double> hessian_diag;
  std::vector<int> signature;
};

// gamma(k) = sqrt(omega^2 + 4 sum_j lambda_j sin^2(k_j / 2)).
double dispersion(const ModelParams& params, const TorusPoint& k);

// Component j: lambda_j sin(k_j) / gamma(k).
std::vector<double> dispersion_gradient(const ModelParams& params,
                                        const TorusPoint& k);

// Dense symmetric d x d matrix of second derivatives of gamma.
std::vector<std::vector<double>> dispersion_hessian(const ModelParams& params,
                                                    const TorusPoint& k);

// The 2^d points of {0, pi}^d, ordered by binary counting over axes (0 before
// pi, last axis fastest).  Requires strict parameters.
std::vector<CriticalPoint> critical_points(const ModelParams& params);

// (G+, G-) with G+- = 1/sqrt(gamma) +- sqrt(gamma); G+ > 0 always and
// G+^2 - G-^2 = 4.
std::pair<double, double> bogoliubov_multipliers(const ModelParams& params,
                                                 const TorusPoint& k);

}  // namespace hlat
