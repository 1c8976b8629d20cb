#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"
#include "hlat/model.hpp"

namespace hlat {

// A complex function on the periodic box, stored row-major over the d axes
// with per-axis index n = x mod 2L.
using BoxFunction = std::vector<std::complex<double>>;

// The periodic box (-L, L]^d together with the model whose dynamics it
// carries; the dual grid is {pi n / L : n in [0, 2L)} per axis.  Requires a
// positive gap (the Bogoliubov multipliers contain 1/sqrt(dispersion)).
struct FiniteVolume {
  int L = 0;
  ModelParams params;

  FiniteVolume(int box_radius, ModelParams model);

  std::size_t box_size() const;  // (2L)^d

  // Flat index of a site in (-L, L]^d, and back.
  std::size_t index_of(const std::vector<int>& site) const;
  std::vector<int> site_of(std::size_t index) const;
};

// One step of the exact finite-volume dynamics: Fourier transform the pair
// (f, conj f), apply the Bogoliubov splitting, the diagonal phase
// exp(2 i dispersion t), and the reassembly, then transform back.  Exact up
// to round-off (no truncation or quadrature error); t = 0 returns f
// unchanged.
BoxFunction evolve_finite(const FiniteVolume& vol, const BoxFunction& f,
                          double t);

// Im<f, g> on the box, conjugate-linear in the first argument (the discrete
// counterpart of the lattice symplectic form).
double discrete_symplectic_form(const BoxFunction& f, const BoxFunction& g);

// Max-norm difference on the box between the finite-volume evolution of f
// (embedded periodically) and the infinite-volume evolution evaluated on the
// box.  The support of f must lie inside (-L, L]^d.
double compare_finite_infinite(const ModelParams& params, int L,
                               const LatticeFunction& f, double t,
                               const QuadratureSpec& spec);

}  // namespace hlat
