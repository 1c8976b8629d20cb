#include "hlat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "hlat/errors.hpp"

namespace hlat {
namespace {

using namespace std::complex_literals;

// Truncation start: the support, the group-velocity cone, and a safety
// margin.  Kernels decay super-polynomially beyond the cone, so the shell
// test below usually accepts this radius immediately.
int initial_truncation_radius(const ModelParams& params,
                              const LatticeFunction& f, double t) {
  const double cone = 2.0 * std::abs(t) * params.lambda_sum() / params.omega;
  return f.extent() + static_cast<int>(std::ceil(cone)) + 8;
}

// Largest kernel magnitude over the three kernels on the shell
// ||z||_inf = radius of the tabulated box.
double shell_maximum(const KernelTable& table, int radius) {
  const int d = table.params.d;
  double largest = 0.0;
  std::vector<int> site(static_cast<std::size_t>(d), -radius);
  while (true) {
    int norm = 0;
    for (int c : site) norm = std::max(norm, std::abs(c));
    if (norm == radius) {
      for (int m : {-1, 0, 1}) {
        largest = std::max(largest, std::abs(table.value(KernelIndex(m), site)));
      }
    }
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++site[j] <= radius) break;
      site[j] = -radius;
    }
    if (j < 0) break;
  }
  return largest;
}

EvolutionResult assemble(const ModelParams& params, const LatticeFunction& f,
                         const KernelTable& table, int out_radius,
                         int truncation_radius, double tail_bound) {
  const int d = params.d;
  LatticeFunction out(d);
  std::vector<int> site(static_cast<std::size_t>(d), -out_radius);
  std::vector<int> z(static_cast<std::size_t>(d));
  while (true) {
    std::complex<double> value = 0.0;
    for (const auto& [y, amplitude] : f.entries()) {
      for (int j = 0; j < d; ++j) z[j] = site[j] - y[j];
      const double h0 = table.value(KernelIndex(0), z);
      const double hm = table.value(KernelIndex(-1), z);
      const double hp = table.value(KernelIndex(1), z);
      const std::complex<double> a = h0 - 0.5i * (hm + hp);
      const std::complex<double> b = 0.5i * (hp - hm);
      value += amplitude * a + std::conj(amplitude) * b;
    }
    out.set(site, value);  // exact zeros are dropped by the sparse form
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++site[j] <= out_radius) break;
      site[j] = -out_radius;
    }
    if (j < 0) break;
  }
  return EvolutionResult{std::move(out), truncation_radius, tail_bound};
}

EvolutionResult evolve_impl(const ModelParams& params,
                            const LatticeFunction& f, double t,
                            const QuadratureSpec& spec, int cover_radius) {
  params.validate_strict();
  spec.validate();
  if (f.dimension() != params.d) {
    throw DimensionMismatch("function dimension does not match the model");
  }
  if (f.empty()) throw InvalidArgument("cannot evolve an empty function");
  if (t == 0.0) return EvolutionResult{f, f.extent(), 0.0};

  int radius = initial_truncation_radius(params, f, t);
  for (int attempt = 0;; ++attempt) {
    const int out_radius = std::max(radius + f.extent(), cover_radius);
    const int table_radius = out_radius + f.extent();
    const KernelTable table = kernel_table(params, t, table_radius, spec);
    const double tail = shell_maximum(table, radius);
    if (tail < spec.truncation_tolerance) {
      return assemble(params, f, table, out_radius, radius, tail);
    }
    if (attempt >= spec.max_radius_growths) {
      throw TruncationFailure(
          "kernel tail stayed above the truncation tolerance at the radius cap");
    }
    radius += (radius + 1) / 2;  // grow by 50%
  }
}

}  // namespace

double symplectic_form(const LatticeFunction& f, const LatticeFunction& g) {
  if (f.dimension() != g.dimension()) {
    throw DimensionMismatch("symplectic form requires matching dimensions");
  }
  // Iterate the smaller support; sites missing from the other function
  // contribute exact zeros, so both orders see the same terms.
  double sigma = 0.0;
  if (f.support_size() <= g.support_size()) {
    for (const auto& [site, fv] : f.entries()) {
      sigma += std::imag(std::conj(fv) * g.at(site));
    }
  } else {
    for (const auto& [site, gv] : g.entries()) {
      sigma += std::imag(std::conj(f.at(site)) * gv);
    }
  }
  return sigma;
}

EvolutionResult evolve(const ModelParams& params, const LatticeFunction& f,
                       double t, const QuadratureSpec& spec) {
  return evolve_impl(params, f, t, spec, 0);
}

EvolutionResult evolve_covering(const ModelParams& params,
                                const LatticeFunction& f, double t,
                                const QuadratureSpec& spec, int cover_radius) {
  if (cover_radius < 0) {
    throw InvalidArgument("cover radius must be non-negative");
  }
  return evolve_impl(params, f, t, spec, cover_radius);
}

double commutator_norm(const ModelParams& params, const LatticeFunction& f,
                       const LatticeFunction& g, double t,
                       const QuadratureSpec& spec) {
  if (g.dimension() != params.d) {
    throw DimensionMismatch("function dimension does not match the model");
  }
  if (g.empty()) return 0.0;
  const EvolutionResult tf = evolve_covering(params, f, t, spec, g.extent());
  const double sigma = symplectic_form(tf.function, g);
  return 2.0 * std::abs(std::sin(0.5 * sigma));
}

double commutator_bound(const ModelParams& params, const LatticeFunction& f,
                        const LatticeFunction& g, double t,
                        const QuadratureSpec& spec) {
  params.validate_strict();
  spec.validate();
  if (f.dimension() != params.d || g.dimension() != params.d) {
    throw DimensionMismatch("function dimension does not match the model");
  }
  if (f.empty() || g.empty()) return 0.0;
  const int radius = f.extent() + g.extent();
  const KernelTable table = kernel_table(params, t, radius, spec);
  std::vector<int> z(static_cast<std::size_t>(params.d));
  double total = 0.0;
  for (const auto& [y, fv] : f.entries()) {
    for (const auto& [x, gv] : g.entries()) {
      for (int j = 0; j < params.d; ++j) z[j] = x[j] - y[j];
      double kernel_sum = 0.0;
      for (int m : {-1, 0, 1}) {
        kernel_sum += std::abs(table.value(KernelIndex(m), z));
      }
      total += std::abs(fv) * std::abs(gv) * kernel_sum;
    }
  }
  return total;
}

std::pair<ModelParams, std::vector<int>> reduce_degenerate(
    const ModelParams& params) {
  params.validate();
  ModelParams sub;
  sub.omega = params.omega;
  sub.lambdas.clear();
  std::vector<int> axes;  // numbered from 1
  for (int j = 0; j < params.d; ++j) {
    if (params.lambdas[j] > 0.0) {
      axes.push_back(j + 1);
      sub.lambdas.push_back(params.lambdas[j]);
    }
  }
  if (axes.empty()) {
    throw DegenerateModel("every coupling vanishes; there is no active sub-model");
  }
  sub.d = static_cast<int>(axes.size());
  return {sub, axes};
}

}  // namespace hlat
