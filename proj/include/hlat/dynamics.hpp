#pragma once

#include <utility>
#include <vector>

#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"
#include "hlat/model.hpp"

namespace hlat {

// An evolved lattice function together with the truncation evidence: the
// kernel truncation radius that was accepted and the largest kernel
// magnitude found on its outermost shell (always below the configured
// truncation tolerance).
struct EvolutionResult {
  LatticeFunction function;
  int truncation_radius = 0;
  double tail_bound = 0.0;
};

// The symplectic form Im<f, g> with the inner product conjugate-linear in
// the first argument, so that sigma(delta_0, i delta_0) = +1.  Antisymmetric
// and exactly zero on disjoint supports.
double symplectic_form(const LatticeFunction& f, const LatticeFunction& g);

// The infinite-volume evolution applied to a finitely supported function:
// the two-convolution identity
//   T_t f = f * (H0 - (i/2)(Hminus + Hplus)) + conj(f) * ((i/2)(Hplus - Hminus))
// evaluated from a kernel table truncated where the kernels have decayed
// below the truncation tolerance.  Requires a strictly positive gap and
// couplings and a nonempty f; t = 0 returns f exactly.  The result covers
// every site the truncated kernels reach from supp(f).
EvolutionResult evolve(const ModelParams& params, const LatticeFunction& f,
                       double t, const QuadratureSpec& spec);

// As evolve, but the returned function is additionally evaluated on at least
// the box of the given radius, so a later pairing against a function
// supported there sees no missing sites.
EvolutionResult evolve_covering(const ModelParams& params,
                                const LatticeFunction& f, double t,
                                const QuadratureSpec& spec, int cover_radius);

// Exact Weyl commutator norm |1 - exp(i sigma(T_t f, g))| in [0, 2],
// computed from the truncated evolution of f paired against g; the
// truncation is extended to cover supp(g).
double commutator_norm(const ModelParams& params, const LatticeFunction& f,
                       const LatticeFunction& g, double t,
                       const QuadratureSpec& spec);

// The a-priori bound sum_{x,y} |f(x)| |g(y)| sum_m |H_t^(m)(x - y)|; always
// at least |sigma(T_t f, g)| up to truncation error.
double commutator_bound(const ModelParams& params, const LatticeFunction& f,
                        const LatticeFunction& g, double t,
                        const QuadratureSpec& spec);

// The sub-model on the axes with strictly positive coupling, plus the list
// of those axes numbered from 1.  Kernels of the full model factor as the
// sub-model kernel on the active axes times a delta in every dropped axis.
// Throws DegenerateModel when every coupling vanishes.
std::pair<ModelParams, std::vector<int>> reduce_degenerate(
    const ModelParams& params);

}  // namespace hlat
