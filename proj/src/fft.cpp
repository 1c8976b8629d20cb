#include "hlat/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <new>

#include "hlat/errors.hpp"

namespace hlat::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t checked_size(const std::vector<int>& shape) {
  if (shape.empty()) throw InvalidArgument("fft: shape must not be empty");
  std::size_t total = 1;
  for (int n : shape) {
    if (n < 1) throw InvalidArgument("fft: grid extents must be positive");
    total *= static_cast<std::size_t>(n);
  }
  return total;
}

std::vector<std::complex<double>> transform(
    const std::vector<std::complex<double>>& in, const std::vector<int>& shape,
    int sign) {
  const std::size_t total = checked_size(shape);
  if (in.size() != total) throw SizeMismatch("fft: data size does not match shape");
  std::vector<std::complex<double>> out(total);
  // std::complex<double> is layout-compatible with fftw_complex; out-of-place
  // c2c transforms leave the input untouched.
  auto* src = reinterpret_cast<fftw_complex*>(
      const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), src, dst,
                         sign, FFTW_ESTIMATE);
  }
  if (!plan) throw Error("fft: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  if (sign == FFTW_BACKWARD) {
    const double scale = 1.0 / static_cast<double>(total);
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in,
    const std::vector<int>& shape) {
  return transform(in, shape, FFTW_FORWARD);
}

std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in,
    const std::vector<int>& shape) {
  return transform(in, shape, FFTW_BACKWARD);
}

RealGridTransform::RealGridTransform(const std::vector<int>& shape)
    : shape_(shape) {
  checked_size(shape_);
  rows_ = 1;
  for (std::size_t j = 0; j + 1 < shape_.size(); ++j) {
    rows_ *= static_cast<std::size_t>(shape_[j]);
  }
  padded_last_ = 2 * (static_cast<std::size_t>(shape_.back()) / 2 + 1);
  const std::size_t doubles = rows_ * padded_last_;
  data_ = static_cast<double*>(fftw_malloc(sizeof(double) * doubles));
  if (!data_) throw std::bad_alloc();
  std::memset(data_, 0, sizeof(double) * doubles);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c(static_cast<int>(shape_.size()), shape_.data(),
                              data_, reinterpret_cast<fftw_complex*>(data_),
                              FFTW_ESTIMATE);
  }
  if (!plan_) {
    fftw_free(data_);
    data_ = nullptr;
    throw Error("fft: planner failed");
  }
}

RealGridTransform::~RealGridTransform() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  if (data_) fftw_free(data_);
}

void RealGridTransform::execute() { fftw_execute(plan_); }

std::size_t RealGridTransform::half_index(const std::vector<int>& x,
                                          bool* mirrored) const {
  if (x.size() != shape_.size()) {
    throw DimensionMismatch("fft: offset rank does not match grid rank");
  }
  const std::size_t d = shape_.size();
  std::vector<int> n(d);
  for (std::size_t j = 0; j < d; ++j) {
    const int nj = shape_[j];
    n[j] = ((x[j] % nj) + nj) % nj;
  }
  // The transform stores only the non-negative half of the last axis; the
  // other half follows from Hermitian symmetry of a real-input spectrum.
  *mirrored = n[d - 1] > shape_[d - 1] / 2;
  if (*mirrored) {
    for (std::size_t j = 0; j < d; ++j) {
      n[j] = (shape_[j] - n[j]) % shape_[j];
    }
  }
  std::size_t flat = 0;
  for (std::size_t j = 0; j + 1 < d; ++j) {
    flat = flat * static_cast<std::size_t>(shape_[j]) +
           static_cast<std::size_t>(n[j]);
  }
  return flat * (padded_last_ / 2) + static_cast<std::size_t>(n[d - 1]);
}

double RealGridTransform::real_at(const std::vector<int>& x) const {
  bool mirrored = false;
  const std::size_t idx = half_index(x, &mirrored);
  return data_[2 * idx];
}

double RealGridTransform::imag_at(const std::vector<int>& x) const {
  bool mirrored = false;
  const std::size_t idx = half_index(x, &mirrored);
  return mirrored ? -data_[2 * idx + 1] : data_[2 * idx + 1];
}

}  // namespace hlat::fft
