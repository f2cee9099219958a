#include "cuepoint/features.h"

#include <algorithm>
#include <cmath>

#include "cuepoint/error.h"

namespace cuepoint {
namespace {

// Shared RMS aggregation over time-sorted frames; frame(j) yields row j.
template <typename RowFn>
FeatureSeries aggregate_rms(Feature name, const std::vector<double>& frame_times,
                            std::size_t dim, RowFn frame_row,
                            const StrongBeatGrid& grid) {
  FeatureSeries series;
  series.name = name;
  series.sparse = false;
  const std::size_t n = grid.size() >= 1 ? grid.size() - 1 : 0;
  series.values = Matrix<double>(n, dim);
  series.times.assign(grid.times.begin(), grid.times.begin() + static_cast<long>(n));

  std::size_t j = 0;
  std::vector<double> acc(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = grid.times[i];
    const double hi = grid.times[i + 1];
    while (j < frame_times.size() && frame_times[j] < lo) ++j;
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t count = 0;
    for (std::size_t f = j; f < frame_times.size() && frame_times[f] < hi; ++f) {
      const auto r = frame_row(f);
      for (std::size_t d = 0; d < dim; ++d) acc[d] += static_cast<double>(r[d]) * r[d];
      ++count;
    }
    auto out = series.values.row(i);
    if (count == 0) {
      ++series.empty_intervals;
      if (i > 0) {
        const auto prev = series.values.row(i - 1);
        std::copy(prev.begin(), prev.end(), out.begin());
      }
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) out[d] = std::sqrt(acc[d] / count);
  }
  return series;
}

}  // namespace

std::string_view to_string(Feature feature) {
  switch (feature) {
    case Feature::kKick: return "kick";
    case Feature::kSnare: return "snare";
    case Feature::kHihat: return "hihat";
    case Feature::kHarmonicLoudness: return "harmonic_loudness";
    case Feature::kPercussiveLoudness: return "percussive_loudness";
    case Feature::kCqt: return "cqt";
    case Feature::kPcp: return "pcp";
  }
  return "?";
}

std::optional<Feature> feature_from_string(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

bool is_sparse(Feature feature) {
  return feature == Feature::kKick || feature == Feature::kSnare ||
         feature == Feature::kHihat;
}

std::string_view feature_group(Feature feature) {
  switch (feature) {
    case Feature::kKick:
    case Feature::kSnare:
    case Feature::kHihat:
      return "rhythm";
    case Feature::kHarmonicLoudness:
    case Feature::kPercussiveLoudness:
      return "loudness";
    case Feature::kCqt:
    case Feature::kPcp:
      return "spectrum";
  }
  return "?";
}

FeatureSeries agg_rms(Feature name, const Spectrogram& frames, const StrongBeatGrid& grid) {
  std::vector<double> times(frames.n_frames());
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = frames.frame_time(t);
  return aggregate_rms(name, times, frames.n_bins(),
                       [&](std::size_t f) { return frames.frames.row(f); }, grid);
}

FeatureSeries agg_rms(Feature name, const FrameCurve& curve, const StrongBeatGrid& grid) {
  if (curve.values.size() != curve.times.size()) {
    throw Error(ErrorCode::kInvalidArgument, "curve values and times differ in length");
  }
  return aggregate_rms(name, curve.times, 1,
                       [&](std::size_t f) { return std::span(&curve.values[f], 1); },
                       grid);
}

FeatureSeries agg_count(Feature name, const std::vector<double>& onset_times,
                        const StrongBeatGrid& grid) {
  FeatureSeries series;
  series.name = name;
  series.sparse = true;
  const std::size_t n = grid.size() >= 1 ? grid.size() - 1 : 0;
  series.values = Matrix<double>(n, 1);
  series.times.assign(grid.times.begin(), grid.times.begin() + static_cast<long>(n));
  // Interval edges move earlier by a small fraction of the interval so that
  // onsets detected a few milliseconds ahead of a beat still count for it.
  auto edge = [&](std::size_t i) {
    const std::size_t k = std::min(i, grid.size() - 2);
    return grid.times[i] - kOnsetEdgeFraction * (grid.times[k + 1] - grid.times[k]);
  };
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (j < onset_times.size() && onset_times[j] < edge(i)) ++j;
    std::size_t count = 0;
    while (j < onset_times.size() && onset_times[j] < edge(i + 1)) {
      ++count;
      ++j;
    }
    series.values(i, 0) = static_cast<double>(count);
  }
  return series;
}

FeatureSeries agg_count(Feature name, const OnsetCurve& onsets, const StrongBeatGrid& grid) {
  return agg_count(name, onsets.onset_times, grid);
}

void to_db(FeatureSeries& series, double top_db) {
  auto& v = series.values.data();
  double top = 0.0;
  for (double x : v) top = std::max(top, x);
  const double floor_db = -top_db;
  for (double& x : v) {
    x = top > 0.0 && x > 0.0 ? std::max(floor_db, 20.0 * std::log10(x / top)) : floor_db;
  }
}

FrameCurve loudness_curve(const Spectrogram& component) {
  FrameCurve curve;
  curve.values.resize(component.n_frames());
  curve.times.resize(component.n_frames());
  for (std::size_t t = 0; t < component.n_frames(); ++t) {
    double acc = 0.0;
    for (float v : component.frames.row(t)) acc += static_cast<double>(v) * v;
    curve.values[t] = std::sqrt(acc);
    curve.times[t] = component.frame_time(t);
  }
  return curve;
}

FrameFeatures extract_frame_features(const AudioBuffer& buffer) {
  return extract_frame_features(buffer, stft(buffer));
}

FrameFeatures extract_frame_features(const AudioBuffer& buffer, Spectrogram stft_spec) {
  FrameFeatures f;
  f.stft = std::move(stft_spec);
  f.hpss = hpss(f.stft);
  f.kick = band_onsets(f.hpss.percussive, DrumBand::kKick);
  f.snare = band_onsets(f.hpss.percussive, DrumBand::kSnare);
  f.hihat = band_onsets(f.hpss.percussive, DrumBand::kHihat);
  f.harmonic_loudness = loudness_curve(f.hpss.harmonic);
  f.percussive_loudness = loudness_curve(f.hpss.percussive);
  f.cqt = cqt(buffer);
  f.pcp = pcp(buffer);
  return f;
}

std::vector<FeatureSeries> beat_sync_features(const FrameFeatures& frames,
                                              const StrongBeatGrid& grid) {
  std::vector<FeatureSeries> out;
  out.reserve(kAllFeatures.size());
  out.push_back(agg_count(Feature::kKick, frames.kick, grid));
  out.push_back(agg_count(Feature::kSnare, frames.snare, grid));
  out.push_back(agg_count(Feature::kHihat, frames.hihat, grid));
  out.push_back(agg_rms(Feature::kHarmonicLoudness, frames.harmonic_loudness, grid));
  out.push_back(agg_rms(Feature::kPercussiveLoudness, frames.percussive_loudness, grid));
  out.push_back(agg_rms(Feature::kCqt, frames.cqt, grid));
  to_db(out.back());
  out.push_back(agg_rms(Feature::kPcp, frames.pcp, grid));
  return out;
}

}  // namespace cuepoint
