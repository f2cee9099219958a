#include "cuepoint/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <utility>

#include "cuepoint/error.h"

namespace cuepoint {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "FFT size must be a power of two");
  }
  std::lock_guard lock(planner_mutex());
  in_ = fftw_alloc_real(size_);
  auto* out = fftw_alloc_complex(n_bins());
  out_ = out;
  // FFTW_ESTIMATE keeps plans (and hence results) independent of timing.
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), in_, out,
                               FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  if (plan_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

RealFft::RealFft(RealFft&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    RealFft tmp(std::move(other));
    std::swap(size_, tmp.size_);
    std::swap(in_, tmp.in_);
    std::swap(out_, tmp.out_);
    std::swap(plan_, tmp.plan_);
  }
  return *this;
}

void RealFft::execute(std::span<const double> input,
                      std::span<std::complex<double>> output) {
  std::copy(input.begin(), input.end(), in_);
  auto* out = static_cast<fftw_complex*>(out_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  for (std::size_t k = 0; k < n_bins(); ++k) {
    output[k] = {out[k][0], out[k][1]};
  }
}

}  // namespace cuepoint
