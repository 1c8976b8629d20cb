#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

namespace hlat {

// A finitely supported complex-valued function on the d-dimensional integer
// lattice, kept in canonical sparse form: exact zeros are never stored, and
// entries iterate in lexicographic site order so that reductions over the
// support are deterministic.
class LatticeFunction {
 public:
  using Map = std::map<std::vector<int>, std::complex<double>>;

  explicit LatticeFunction(int d);

  int dimension() const noexcept { return d_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t support_size() const noexcept { return entries_.size(); }

  // Largest max-norm of a support site; 0 for the empty function.
  int extent() const noexcept;

  // Value at a site, zero off the support.
  std::complex<double> at(const std::vector<int>& x) const;

  // Assigns a value; an exact zero erases the entry.
  void set(const std::vector<int>& x, std::complex<double> v);

  double l1_norm() const;
  double max_norm() const;

  const Map& entries() const noexcept { return entries_; }

  static LatticeFunction delta(int d, const std::vector<int>& x,
                               std::complex<double> amplitude = 1.0);

 private:
  void check_rank(const std::vector<int>& x) const;

  int d_;
  Map entries_;
};

// Largest pointwise difference |a(x) - b(x)| over the union of supports.
double max_difference(const LatticeFunction& a, const LatticeFunction& b);

}  // namespace hlat
