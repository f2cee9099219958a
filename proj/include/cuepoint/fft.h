#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cuepoint {

/// Real-to-complex forward FFT of a fixed power-of-two size, backed by FFTW.
/// Planning is serialized internally; execute() is safe to call from several
/// threads on distinct RealFft instances.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const noexcept { return size_; }
  std::size_t n_bins() const noexcept { return size_ / 2 + 1; }

  /// input.size() == size(), output.size() == n_bins().
  void execute(std::span<const double> input,
               std::span<std::complex<double>> output);

 private:
  std::size_t size_ = 0;
  double* in_ = nullptr;
  void* out_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace cuepoint
