#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Thin RAII wrappers around the discrete Fourier transforms used in this
// library: a padded in-place real-to-complex transform for the kernel
// quadrature grids, and out-of-place complex transforms for the periodic
// finite-volume evolution.  Plans are created with FFTW_ESTIMATE so results
// are reproducible run to run, and plan creation / destruction is serialized
// because the FFTW planner is not thread-safe.

struct fftw_plan_s;  // keep <fftw3.h> out of the public headers

namespace hlat::fft {

// Forward DFT (negative exponent convention), unnormalized.
std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in, const std::vector<int>& shape);

// Inverse DFT (positive exponent convention), normalized by the grid size so
// that backward(forward(f)) == f up to rounding.
std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in, const std::vector<int>& shape);

// A row-major real grid with the last axis padded for an in-place
// real-to-complex transform.  Fill the logical rows through row(), call
// execute(), then read spectrum entries at integer lattice offsets; offsets
// are reduced modulo the grid and the missing half-spectrum is recovered from
// Hermitian symmetry.
class RealGridTransform {
 public:
  explicit RealGridTransform(const std::vector<int>& shape);
  ~RealGridTransform();
  RealGridTransform(const RealGridTransform&) = delete;
  RealGridTransform& operator=(const RealGridTransform&) = delete;

  std::size_t rows() const { return rows_; }
  int row_length() const { return shape_.back(); }
  double* row(std::size_t r) { return data_ + r * padded_last_; }

  void execute();

  double real_at(const std::vector<int>& x) const;
  double imag_at(const std::vector<int>& x) const;

 private:
  std::size_t half_index(const std::vector<int>& x, bool* mirrored) const;

  std::vector<int> shape_;
  std::size_t rows_ = 0;
  std::size_t padded_last_ = 0;
  double* data_ = nullptr;
  fftw_plan_s* plan_ = nullptr;
};

}  // namespace hlat::fft
