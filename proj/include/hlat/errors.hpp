#pragma once

#include <stdexcept>
#include <string>

namespace hlat {

// Base class for every failure this library reports.  Each subclass names one
// failure mode so callers (and the CLI exit-code mapping) can distinguish
// usage errors from computational failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition on plain arguments was violated (bad spec fields, malformed
// ranges, unknown enum values).  Usage error, not a computational failure.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// ModelParams violate their invariants (d < 1, omega < 0, negative coupling,
// size mismatch between d and the coupling list).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// An operation that needs isolated non-degenerate critical points was given a
// model with a vanishing coupling or vanishing on-site energy.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

// The m = -1 kernel was requested for omega = 0, where the integrand 1/gamma
// is non-integrable in one dimension.
class InvalidKernel : public Error {
 public:
  using Error::Error;
};

// Resolution doubling hit its cap with the inter-resolution delta still above
// the requested tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// The requested box cannot be represented at any admissible resolution (radius
// exceeds the grid, or the grid would exceed the memory budget).
class BoxTooLarge : public Error {
 public:
  using Error::Error;
};

// Evolution truncation radius hit its growth cap with the kernel tail still
// above the truncation tolerance.
class TruncationFailure : public Error {
 public:
  using Error::Error;
};

// Two lattice objects with different dimensions were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A boxed array does not match the volume it is used with.
class SizeMismatch : public Error {
 public:
  using Error::Error;
};

// A log-log fit was given a value <= 0.
class NonPositiveValue : public Error {
 public:
  using Error::Error;
};

// A fit was given fewer points than the minimum.
class TooFewPoints : public Error {
 public:
  using Error::Error;
};

}  // namespace hlat
