#include <cmath>
#include <complex>
#include <numbers>

#include "cuepoint/dsp.h"
#include "cuepoint/error.h"
#include "cuepoint/fft.h"

namespace cuepoint {

std::vector<double> hann_window(int length) {
  std::vector<double> w(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

Spectrogram stft(const AudioBuffer& buffer, int window, int hop) {
  if (window < 256 || (window & (window - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "STFT window must be a power of two >= 256");
  }
  if (hop <= 0 || hop > window) {
    throw Error(ErrorCode::kInvalidArgument, "STFT hop must be in (0, window]");
  }
  const auto samples = buffer.samples();
  if (samples.size() < static_cast<std::size_t>(window)) {
    throw Error(ErrorCode::kBufferTooShort,
                "buffer shorter than one STFT window (" +
                    std::to_string(samples.size()) + " < " +
                    std::to_string(window) + " samples)");
  }

  const auto w = hann_window(window);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  const double scale = 1.0 / wsum;

  const std::size_t n_frames = 1 + (samples.size() - window) / hop;
  RealFft fft(static_cast<std::size_t>(window));

  Spectrogram spec;
  spec.kind = SpectrogramKind::kStft;
  spec.hop = hop;
  spec.window = window;
  spec.center_offset = window / 2.0;
  spec.sample_rate = buffer.sample_rate();
  spec.frames = Matrix<float>(n_frames, fft.n_bins());
  spec.bin_frequencies.resize(fft.n_bins());
  for (std::size_t k = 0; k < fft.n_bins(); ++k) {
    spec.bin_frequencies[k] = static_cast<double>(k) * spec.sample_rate / window;
  }

  std::vector<double> frame(static_cast<std::size_t>(window));
  std::vector<std::complex<double>> bins(fft.n_bins());
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = t * hop;
    for (int n = 0; n < window; ++n) frame[n] = samples[start + n] * w[n];
    fft.execute(frame, bins);
    auto row = spec.frames.row(t);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      row[k] = static_cast<float>(std::abs(bins[k]) * scale);
    }
  }
  return spec;
}

}  // namespace cuepoint
