#include "hlat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hlat/errors.hpp"

namespace hlat {

LatticeFunction::LatticeFunction(int d) : d_(d) {
  if (d < 1) throw InvalidArgument("lattice dimension must be positive");
}

int LatticeFunction::extent() const noexcept {
  int e = 0;
  for (const auto& [site, value] : entries_) {
    (void)value;
    for (int c : site) e = std::max(e, std::abs(c));
  }
  return e;
}

std::complex<double> LatticeFunction::at(const std::vector<int>& x) const {
  check_rank(x);
  const auto it = entries_.find(x);
  return it == entries_.end() ? std::complex<double>(0.0) : it->second;
}

void LatticeFunction::set(const std::vector<int>& x, std::complex<double> v) {
  check_rank(x);
  if (v == 0.0) {
    entries_.erase(x);
  } else {
    entries_[x] = v;
  }
}

double LatticeFunction::l1_norm() const {
  double total = 0.0;
  for (const auto& [site, value] : entries_) {
    (void)site;
    total += std::abs(value);
  }
  return total;
}

double LatticeFunction::max_norm() const {
  double largest = 0.0;
  for (const auto& [site, value] : entries_) {
    (void)site;
    largest = std::max(largest, std::abs(value));
  }
  return largest;
}

void LatticeFunction::check_rank(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatch("site rank does not match the function dimension");
  }
}

LatticeFunction LatticeFunction::delta(int d, const std::vector<int>& x,
                                       std::complex<double> amplitude) {
  LatticeFunction f(d);
  f.set(x, amplitude);
  return f;
}

double max_difference(const LatticeFunction& a, const LatticeFunction& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("cannot compare functions of different dimension");
  }
  double largest = 0.0;
  for (const auto& [site, value] : a.entries()) {
    largest = std::max(largest, std::abs(value - b.at(site)));
  }
  for (const auto& [site, value] : b.entries()) {
    largest = std::max(largest, std::abs(value - a.at(site)));
  }
  return largest;
}

}  // namespace hlat
