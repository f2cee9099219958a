#include <algorithm>
#include <cmath>
#include <numeric>

#include "cuepoint/dsp.h"
#include "cuepoint/error.h"

namespace cuepoint {
namespace {

constexpr long kMeanHalfWidth = 8;  // frames, about +-93 ms at hop 512
constexpr double kDeltaRatio = 0.1;

}  // namespace

std::string_view to_string(DrumBand band) {
  switch (band) {
    case DrumBand::kKick: return "kick";
    case DrumBand::kSnare: return "snare";
    case DrumBand::kHihat: return "hihat";
  }
  return "?";
}

BandRange band_range(DrumBand band) {
  switch (band) {
    case DrumBand::kKick: return {20.0, 150.0};
    case DrumBand::kSnare: return {150.0, 2500.0};
    case DrumBand::kHihat: return {5000.0, 16000.0};
  }
  return {0.0, 0.0};
}

std::vector<double> band_flux(const Spectrogram& spec, BandRange range) {
  std::size_t lo = spec.n_bins();
  std::size_t hi = 0;
  for (std::size_t k = 0; k < spec.n_bins(); ++k) {
    const double f = spec.bin_frequencies[k];
    if (f >= range.low_hz && f <= range.high_hz) {
      lo = std::min(lo, k);
      hi = std::max(hi, k + 1);
    }
  }
  std::vector<double> flux(spec.n_frames(), 0.0);
  if (lo >= hi) return flux;
  // The frame before the first is taken as silence, so a sound present from
  // the very first sample still registers as an onset.
  for (std::size_t t = 0; t < spec.n_frames(); ++t) {
    const auto cur = spec.frames.row(t);
    double acc = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double d = static_cast<double>(cur[k]) - (t > 0 ? spec.frames(t - 1, k) : 0.0f);
      if (d > 0.0) acc += d;
    }
    flux[t] = acc;
  }
  return flux;
}

std::vector<std::size_t> pick_onsets(const std::vector<double>& curve,
                                     double frames_per_second) {
  const auto n = static_cast<long>(curve.size());
  std::vector<std::size_t> picked;
  if (n < 3) return picked;
  const double peak = *std::max_element(curve.begin(), curve.end());
  if (!(peak > 0.0)) return picked;
  const double delta = kDeltaRatio * peak;

  std::vector<double> prefix(curve.size() + 1, 0.0);
  for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + curve[i];

  const long hold = std::max(1L, std::lround(kOnsetMaxWindowS * frames_per_second));
  std::vector<long> candidates;
  for (long t = 0; t + 1 < n; ++t) {
    const double left = t > 0 ? curve[t - 1] : 0.0;
    if (!(curve[t] > left && curve[t] >= curve[t + 1])) continue;
    bool is_max = true;
    for (long s = std::max(0L, t - hold); s <= std::min(n - 1, t + hold) && is_max; ++s) {
      if ((s < t && curve[s] >= curve[t]) || (s > t && curve[s] > curve[t])) is_max = false;
    }
    if (!is_max) continue;
    const long a = std::max(0L, t - kMeanHalfWidth);
    const long b = std::min(n - 1, t + kMeanHalfWidth);
    const double mean = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
    if (curve[t] > mean + delta && curve[t] >= kMinOnsetFlux) candidates.push_back(t);
  }

  const long min_gap =
      std::max(1L, static_cast<long>(std::ceil(kMinOnsetGapS * frames_per_second - 1e-9)));
  std::vector<long> order = candidates;
  std::stable_sort(order.begin(), order.end(),
                   [&](long x, long y) { return curve[x] > curve[y]; });
  std::vector<long> kept;
  for (long t : order) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](long k) {
      return std::abs(k - t) < min_gap;
    });
    if (!clash) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  picked.assign(kept.begin(), kept.end());
  return picked;
}

OnsetCurve band_onsets(const Spectrogram& spec, DrumBand band) {
  if (spec.kind != SpectrogramKind::kStft) {
    throw Error(ErrorCode::kInvalidArgument, "band_onsets expects an STFT spectrogram");
  }
  OnsetCurve curve;
  curve.band = band;
  curve.values = band_flux(spec, band_range(band));
  const double fps = static_cast<double>(spec.sample_rate) / spec.hop;
  curve.onsets = pick_onsets(curve.values, fps);
  curve.onset_times.reserve(curve.onsets.size());
  for (std::size_t t : curve.onsets) curve.onset_times.push_back(spec.frame_time(t));
  return curve;
}

}  // namespace cuepoint
