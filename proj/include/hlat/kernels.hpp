#pragma once

#include <array>
#include <vector>

#include "hlat/model.hpp"

namespace hlat {

// Controls the self-refining torus quadrature behind every kernel
// evaluation, plus the truncation knobs used by the lattice dynamics that
// consume those kernels.
struct QuadratureSpec {
  // Starting grid points per axis; a power of two, at least 16.
  int base_points = 16;
  // Accept once two successive grids agree to this absolute tolerance; the
  // accepted difference is reported as the estimated error.  The estimate is
  // floored at the rounding resolution of the grid sums, so tolerances below
  // machine precision are unattainable by construction.
  double tolerance = 1e-10;
  // Grid doublings allowed before giving up with NoConvergence (1..12).
  int max_doublings = 10;
  // Pick the starting grid from t, the couplings, and the requested box
  // instead of using base_points verbatim.  When disabled, the requested box
  // must fit inside base_points grid points per axis.
  bool auto_scale = true;
  // Spatial truncation threshold for evolved lattice functions.
  double truncation_tolerance = 1e-12;
  // How many times a truncation radius may grow before TruncationFailure.
  int max_radius_growths = 12;

  void validate() const;  // throws InvalidArgument on any bad field
};

// Selects one of the three propagator kernels by the exponent of the
// dispersion weight inside the integral: -1, 0, or +1.
class KernelIndex {
 public:
  explicit KernelIndex(int m);  // throws InvalidArgument outside {-1, 0, 1}
  int get() const noexcept { return m_; }

 private:
  int m_;
};

// Kernel values on the closed box [-radius, radius]^d, one layer per weight
// exponent, each stored row-major with the last axis fastest.  Mirror sites
// x and -x hold bitwise-identical values.
struct KernelTable {
  ModelParams params;
  double t = 0.0;
  int radius = 0;
  int resolution = 0;      // grid points per axis at acceptance
  double est_error = 0.0;  // grid-to-grid change at acceptance, <= tolerance
  std::array<std::vector<double>, 3> values;  // indexed by weight exponent + 1

  double value(KernelIndex m, const std::vector<int>& x) const;
};

// Evaluates one kernel at a single lattice site by streaming the quadrature
// grid row by row (no full grid is stored).  A gapless model (omega = 0)
// admits only the weight exponents 0 and +1; asking for -1 throws
// InvalidKernel.  Throws NoConvergence if the tolerance is not reached within
// the doubling budget and BoxTooLarge if the grid demand exceeds the point
// budget.  On success *est_error_out (if given) receives the final
// grid-to-grid change.
double kernel_value(const ModelParams& params, KernelIndex m, double t,
                    const std::vector<int>& x, const QuadratureSpec& spec,
                    double* est_error_out = nullptr);

// All three kernels at one site from a single quadrature pass, ordered by
// weight exponent (-1, 0, +1).  Requires omega > 0 (the -1 kernel is always
// included); refinement stops when the worst of the three has converged.
std::array<double, 3> kernel_values_at(const ModelParams& params, double t,
                                       const std::vector<int>& x,
                                       const QuadratureSpec& spec,
                                       double* est_error_out = nullptr);

// Tabulates all three kernels on [-radius, radius]^d via real-to-complex
// transforms of the multiplier grids.  Requires omega > 0; throws
// BoxTooLarge when the box cannot fit in the allowed grid and NoConvergence
// when refinement fails.
KernelTable kernel_table(const ModelParams& params, double t, int radius,
                         const QuadratureSpec& spec);

// Leading large-|t| asymptotics of a kernel: the sum over the 2^d dispersion
// critical points of their quadratic-phase contributions.  Requires a
// strictly positive gap and couplings (DegenerateModel / InvalidModel
// otherwise) and |t| >= 1 (InvalidArgument), since the expansion is a
// large-time statement.
double stationary_phase_estimate(const ModelParams& params, KernelIndex m,
                                 double t, const std::vector<int>& x);

// Closed form of the gapless one-dimensional weight-0 kernel: a Bessel
// function of integer order 2|x| evaluated at 4 sqrt(lambda) |t|.  Used as an
// independent oracle for the quadrature.
double bessel_oracle_1d(double lambda, double t, long long x);

// Magnitude of the d-dimensional Gaussian integral with quadratic phase
// t * sum_j s_j x_j^2 (signature entries +1 or -1): the closed form
// (pi / sqrt(1 + t^2))^{d/2}, evaluated through the complex product so the
// code path mirrors the oscillatory-integral reasoning it sanity-checks.
double gaussian_quadratic_selftest(int d, const std::vector<int>& signature,
                                   double t);

}  // namespace hlat
