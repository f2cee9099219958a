#include <algorithm>
#include <cmath>

#include "cuepoint/dsp.h"
#include "cuepoint/error.h"

namespace cuepoint {

std::vector<float> median_filter(const std::vector<float>& x, int length) {
  if (length < 1 || length % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "median length must be odd");
  }
  const auto n = static_cast<long>(x.size());
  std::vector<float> out(x.size());
  if (n == 0) return out;
  const long half = length / 2;
  // Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) ...
  auto at = [&](long i) {
    const long period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? x[i] : x[period - 1 - i];
  };
  std::vector<float> padded(static_cast<std::size_t>(n + 2 * half));
  for (long i = -half; i < n + half; ++i) padded[i + half] = at(i);

  // Sliding window kept sorted: drop the outgoing sample, insert the new one.
  std::vector<float> window(padded.begin(), padded.begin() + length);
  std::sort(window.begin(), window.end());
  out[0] = window[half];
  for (long i = 1; i < n; ++i) {
    const float gone = padded[i - 1];
    const float added = padded[i + length - 1];
    window.erase(std::lower_bound(window.begin(), window.end(), gone));
    window.insert(std::upper_bound(window.begin(), window.end(), added), added);
    out[i] = window[half];
  }
  return out;
}

HpssPair hpss(const Spectrogram& spec, int kernel, double power) {
  if (spec.kind != SpectrogramKind::kStft) {
    throw Error(ErrorCode::kInvalidArgument, "hpss expects an STFT spectrogram");
  }
  const std::size_t n_frames = spec.n_frames();
  const std::size_t n_bins = spec.n_bins();

  // Time-direction median (per bin) enhances sustained, harmonic energy.
  Matrix<float> harm_med(n_frames, n_bins);
  std::vector<float> column(n_frames);
  for (std::size_t k = 0; k < n_bins; ++k) {
    for (std::size_t t = 0; t < n_frames; ++t) column[t] = spec.frames(t, k);
    const auto filtered = median_filter(column, kernel);
    for (std::size_t t = 0; t < n_frames; ++t) harm_med(t, k) = filtered[t];
  }

  HpssPair out{spec, spec};
  std::vector<float> row(n_bins);
  for (std::size_t t = 0; t < n_frames; ++t) {
    auto in_row = spec.frames.row(t);
    std::copy(in_row.begin(), in_row.end(), row.begin());
    // Frequency-direction median (per frame) enhances transients.
    const auto perc_med = median_filter(row, kernel);
    auto h_row = out.harmonic.frames.row(t);
    auto p_row = out.percussive.frames.row(t);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double hm = harm_med(t, k);
      const double pm = perc_med[k];
      const double h = power == 2.0 ? hm * hm : std::pow(hm, power);
      const double p = power == 2.0 ? pm * pm : std::pow(pm, power);
      const double mask = (h + p) > 0.0 ? h / (h + p) : 0.5;
      const float harmonic = static_cast<float>(in_row[k] * mask);
      h_row[k] = harmonic;
      p_row[k] = std::max(0.0f, in_row[k] - harmonic);
    }
  }
  return out;
}

}  // namespace cuepoint
