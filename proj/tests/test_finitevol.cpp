#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hlat/errors.hpp"
#include "hlat/finitevol.hpp"
#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"
#include "hlat/model.hpp"

using namespace hlat;
using namespace std::complex_literals;

namespace {

ModelParams chain_1d() { return ModelParams{1, 1.0, {1.0}}; }

BoxFunction random_box(const FiniteVolume& vol, std::mt19937& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  BoxFunction f(vol.box_size());
  for (auto& v : f) v = {amp(rng), amp(rng)};
  return f;
}

double max_diff(const BoxFunction& a, const BoxFunction& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("box indexing covers (-L, L]^d and round-trips") {
  const FiniteVolume vol(4, ModelParams{2, 1.0, {1.0, 0.5}});
  CHECK(vol.box_size() == 64);

  // Every site in the box maps to a distinct flat index and back.
  std::vector<bool> seen(vol.box_size(), false);
  for (int x0 = -3; x0 <= 4; ++x0) {
    for (int x1 = -3; x1 <= 4; ++x1) {
      const std::size_t n = vol.index_of({x0, x1});
      REQUIRE(n < vol.box_size());
      CHECK(!seen[n]);
      seen[n] = true;
      CHECK(vol.site_of(n) == std::vector<int>{x0, x1});
    }
  }

  // Positive sites keep their coordinates as digits; the origin is index 0.
  CHECK(vol.index_of({0, 0}) == 0);
  CHECK(vol.index_of({1, 2}) == 1 * 8 + 2);
  // x <= 0 wraps to the upper half of the digit range: -1 -> 7 for L = 4.
  CHECK(vol.index_of({-1, 0}) == 7 * 8);

  CHECK_THROWS_AS(vol.index_of({5, 0}), InvalidArgument);   // outside (-L, L]
  CHECK_THROWS_AS(vol.index_of({0, -4}), InvalidArgument);  // -L is excluded
  CHECK_THROWS_AS(vol.index_of({1}), DimensionMismatch);
  CHECK_THROWS_AS(vol.site_of(64), InvalidArgument);

  CHECK_THROWS_AS(FiniteVolume(0, chain_1d()), InvalidArgument);
  CHECK_THROWS_AS(FiniteVolume(4, ModelParams{1, -1.0, {1.0}}), InvalidModel);
}

TEST_CASE("time zero returns the input unchanged") {
  const FiniteVolume vol(8, chain_1d());
  std::mt19937 rng(11);
  const BoxFunction f = random_box(vol, rng);
  const BoxFunction g = evolve_finite(vol, f, 0.0);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);  // bitwise

  CHECK_THROWS_AS(evolve_finite(vol, BoxFunction(7), 1.0), SizeMismatch);
  const FiniteVolume gapless(8, ModelParams{1, 0.0, {1.0}});
  CHECK_THROWS_AS(evolve_finite(gapless, f, 1.0), InvalidModel);
}

TEST_CASE("evolution preserves the discrete symplectic form") {
  const FiniteVolume vol(8, chain_1d());
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const BoxFunction f = random_box(vol, rng);
    const BoxFunction g = random_box(vol, rng);
    const double before = discrete_symplectic_form(f, g);
    for (double t : {0.5, 2.0, 10.0}) {
      const double after =
          discrete_symplectic_form(evolve_finite(vol, f, t), evolve_finite(vol, g, t));
      CHECK(std::abs(after - before) < 1e-12);
    }
  }
  CHECK_THROWS_AS(discrete_symplectic_form(BoxFunction(4), BoxFunction(8)),
                  SizeMismatch);
}

TEST_CASE("evolving twice composes the times") {
  const FiniteVolume vol(8, ModelParams{1, 0.7, {1.3}});
  std::mt19937 rng(37);
  const BoxFunction f = random_box(vol, rng);
  const BoxFunction two_step = evolve_finite(vol, evolve_finite(vol, f, 1.5), 2.5);
  const BoxFunction one_step = evolve_finite(vol, f, 4.0);
  CHECK(max_diff(two_step, one_step) < 1e-12);

  // Running backwards undoes the evolution.
  const BoxFunction round_trip = evolve_finite(vol, evolve_finite(vol, f, 3.0), -3.0);
  CHECK(max_diff(round_trip, f) < 1e-12);
}

TEST_CASE("point mass on the box matches the summed kernel images") {
  // On the periodic box the evolved point mass equals the infinite-volume
  // result summed over translates x + 2Ln.  At t = 2, L = 64 only the
  // n in {-1, 0, 1} translates are above round-off.
  const int L = 64;
  const FiniteVolume vol(L, chain_1d());
  BoxFunction f(vol.box_size());
  f[vol.index_of({0})] = 1.0;
  const BoxFunction evolved = evolve_finite(vol, f, 2.0);

  QuadratureSpec spec;
  const KernelTable table = kernel_table(chain_1d(), 2.0, 3 * L, spec);
  double worst = 0.0;
  for (std::size_t n = 0; n < vol.box_size(); ++n) {
    const int x = vol.site_of(n)[0];
    std::complex<double> image_sum = 0.0;
    for (int img = -1; img <= 1; ++img) {
      const std::vector<int> z{x + 2 * L * img};
      image_sum += table.value(KernelIndex(0), z) - 1.0i * table.value(KernelIndex(-1), z);
    }
    worst = std::max(worst, std::abs(evolved[n] - image_sum));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("large boxes reproduce the infinite-volume kernel") {
  // At L = 64 the periodization error at t = 2 is far below round-off, so the
  // evolved point mass must agree with the converged kernel values directly.
  const int L = 64;
  const FiniteVolume vol(L, chain_1d());
  BoxFunction f(vol.box_size());
  f[vol.index_of({0})] = 1.0;
  const BoxFunction evolved = evolve_finite(vol, f, 2.0);

  QuadratureSpec spec;
  spec.tolerance = 1e-13;
  const KernelTable table = kernel_table(chain_1d(), 2.0, 16, spec);
  double worst = 0.0;
  for (int x = -16; x <= 16; ++x) {
    const std::complex<double> expected =
        table.value(KernelIndex(0), {x}) - 1.0i * table.value(KernelIndex(-1), {x});
    worst = std::max(worst, std::abs(evolved[vol.index_of({x})] - expected));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("finite and infinite evolutions are compared on the box") {
  const LatticeFunction f = LatticeFunction::delta(1, {0});
  QuadratureSpec spec;

  // t = 0: both sides return f exactly.
  CHECK(compare_finite_infinite(chain_1d(), 16, f, 0.0, spec) == 0.0);

  // The t = 2 box differences are already near round-off at these sizes; the
  // periodization analysis above pins the true gap, so here only the scale is
  // checked.  (Resolving the L-dependence needs times where the light cone
  // reaches the boundary; the acceptance harness measures that sequence.)
  CHECK(compare_finite_infinite(chain_1d(), 32, f, 2.0, spec) < 1e-8);

  // Larger times: the cone reaches past L = 8 but not L = 32, so the gap is
  // genuine at the small box and gone at the large one.
  const double coarse = compare_finite_infinite(chain_1d(), 8, f, 8.0, spec);
  const double fine = compare_finite_infinite(chain_1d(), 32, f, 8.0, spec);
  CHECK(coarse > 1e-6);
  CHECK(fine < 1e-8);
  CHECK(fine < coarse);

  LatticeFunction wide(1);
  wide.set({-20}, 1.0);
  CHECK_THROWS_AS(compare_finite_infinite(chain_1d(), 16, wide, 1.0, spec),
                  InvalidArgument);
  CHECK_THROWS_AS(compare_finite_infinite(chain_1d(), 16, LatticeFunction(2), 1.0, spec),
                  DimensionMismatch);
}
