#pragma once

#include <utility>
#include <vector>

#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"
#include "hlat/model.hpp"

namespace hlat {

// Polynomial site weight w(x) = (1 + |x|_1)^exponent.  The default exponent
// d + 3 is the power the fixed-site decay bounds are stated with.
struct WeightSpec {
  int d;
  int exponent;

  explicit WeightSpec(int dimension);        // exponent = d + 3
  WeightSpec(int dimension, int exponent_);  // custom power >= 0
};

// sum_x |f(x)| w(x); always >= the plain l1 norm since w >= 1.
double weighted_l1_norm(const LatticeFunction& f, const WeightSpec& spec);

// Power-law fit value ~ amplitude * t^exponent, least squares on log-log axes.
struct DecayFit {
  double exponent = 0.0;   // fitted log-log slope
  double amplitude = 0.0;  // exp of the fitted intercept
  double residual = 0.0;   // max |log value - log fit|
  double t_min = 0.0;
  double t_max = 0.0;
  int n_points = 0;
};

// Fits the series (times[i], values[i]).  Requires at least 5 points, times
// strictly increasing with times.front() >= 1 (the decay statements hold for
// t >= 1 only), and positive values (NonPositiveValue otherwise).
DecayFit fit_decay(const std::vector<double>& times,
                   const std::vector<double>& values);

// Envelope of an oscillating series: the maximum of |value| over each sliding
// window of `window` consecutive samples, duplicates collapsed (ties keep the
// earliest sample).  Returns parallel (times, magnitudes) suitable for
// fit_decay; the returned times are strictly increasing.
std::pair<std::vector<double>, std::vector<double>> envelope_maxima(
    const std::vector<double>& times, const std::vector<double>& values,
    int window = 5);

// Deterministic geometric sample grid: n times from t_min to t_max with a
// constant ratio, endpoints exact.
std::vector<double> geometric_times(double t_min, double t_max, int n);

// Result of the uniform sup-norm decay check: S(t) = sup over the light-cone
// box |x|_inf <= ceil(2 t sum(lambda) / omega) + 16 of sum_m |H_t^(m)(x)|,
// rescaled by t^(1/2) (effective dimension >= 2) or t^(1/3) (dimension 1).
// Axes with zero coupling are dropped first; the check passes when the
// rescaled sequence shows no upward trend (log-log slope <= the threshold).
struct UniformDecayReport {
  std::vector<double> times;
  std::vector<double> sup_values;  // S(t)
  std::vector<double> rescaled;    // S(t) * t^rescale_power
  double rescale_power = 0.0;
  int effective_dimension = 0;
  double slope = 0.0;  // log-log OLS slope of the rescaled sequence
  double max_rescaled = 0.0;
  double slope_threshold = 0.05;
  bool pass = false;
};

UniformDecayReport verify_uniform_decay(const ModelParams& params,
                                        const std::vector<double>& t_samples,
                                        const QuadratureSpec& spec);

// Fits the large-time decay at a fixed site x.  The returned fit is of the
// envelope of the Weyl commutator norm for the probe pair (delta_0, delta_x),
// the quantity the decay bounds control; it is computed from the exact
// single-pair phase sigma(T_t delta_0, delta_x) = H_t^(-1)(x).  When
// kernel_fit is non-null it receives the envelope fit of |H_t^(0)(x)| from
// the same quadrature passes.  Expected exponent circa -d/2 for both.
// Requires strict model parameters and times in [1, inf) spanning at least
// one decade.
DecayFit verify_fixed_x_decay(const ModelParams& params,
                              const std::vector<int>& x,
                              const std::vector<double>& t_samples,
                              const QuadratureSpec& spec,
                              DecayFit* kernel_fit = nullptr);

// Classification of a commutator-norm cell against fixed thresholds.
enum class Region {
  ExponentiallySmall,  // < 1e-8: outside the light cone
  PowerLaw,            // in between: dispersive decay region
  OrderOne,            // > 0.1: inside the cone, no decay yet
};

Region region_of(double value);

// Commutator-norm landscape for the probe pair (delta_0, delta_x) with
// x = n e_1, n = 0..x_max: values[i][n] is the norm at t_samples[i].  One
// truncated evolution of delta_0 per time is shared across the whole column.
struct ConeScan {
  ModelParams model;
  std::vector<double> times;
  int x_max = 0;
  std::vector<std::vector<double>> values;  // [time][n], each in [0, 2]
};

ConeScan cone_scan(const ModelParams& params,
                   const std::vector<double>& t_samples, int x_max,
                   const QuadratureSpec& spec);

}  // namespace hlat
