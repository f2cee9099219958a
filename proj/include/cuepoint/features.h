#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "cuepoint/beatgrid.h"
#include "cuepoint/dsp.h"
#include "cuepoint/matrix.h"

namespace cuepoint {

enum class Feature {
  kKick,
  kSnare,
  kHihat,
  kHarmonicLoudness,
  kPercussiveLoudness,
  kCqt,
  kPcp,
};

inline constexpr std::array<Feature, 7> kAllFeatures = {
    Feature::kKick,      Feature::kSnare,          Feature::kHihat,
    Feature::kHarmonicLoudness, Feature::kPercussiveLoudness,
    Feature::kCqt,       Feature::kPcp};

std::string_view to_string(Feature feature);
std::optional<Feature> feature_from_string(std::string_view name);

/// Drum features are sparse (onset counts); everything else is dense (RMS).
bool is_sparse(Feature feature);

/// Coarse grouping used in coverage reports: rhythm, loudness, spectrum.
std::string_view feature_group(Feature feature);

/// One row per strong-beat interval [times[i], times[i+1]).
struct FeatureSeries {
  Feature name = Feature::kKick;
  Matrix<double> values;      // [n_intervals x dim]
  std::vector<double> times;  // start time of each row
  bool sparse = false;
  std::size_t empty_intervals = 0;  // rows back-filled from the previous row

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
};

/// Per-frame scalar curve with frame-centre times.
struct FrameCurve {
  std::vector<double> values;
  std::vector<double> times;
};

/// Row i = per-dimension RMS of the frames whose centre lies in
/// [times[i], times[i+1]). An interval without frames repeats the previous
/// row (zeros for the first) and is counted in empty_intervals.
FeatureSeries agg_rms(Feature name, const Spectrogram& frames, const StrongBeatGrid& grid);
FeatureSeries agg_rms(Feature name, const FrameCurve& curve, const StrongBeatGrid& grid);

/// Fraction of a strong-beat interval by which count intervals start early.
inline constexpr double kOnsetEdgeFraction = 1.0 / 16.0;

/// Row i = number of onsets in [times[i] - e, times[i+1] - e), where e is
/// kOnsetEdgeFraction of the interval.
FeatureSeries agg_count(Feature name, const OnsetCurve& onsets, const StrongBeatGrid& grid);
FeatureSeries agg_count(Feature name, const std::vector<double>& onset_times,
                        const StrongBeatGrid& grid);

/// Dynamic range kept by to_db; anything quieter is clamped to the floor.
inline constexpr double kTopDb = 80.0;

/// In place: 20 log10 of each value relative to the series maximum, clamped
/// at -kTopDb. An all-zero series stays at the floor.
void to_db(FeatureSeries& series, double top_db = kTopDb);

/// Per-frame sqrt of summed squared magnitudes.
FrameCurve loudness_curve(const Spectrogram& component);

/// Frame-level analysis shared by the seven features.
struct FrameFeatures {
  Spectrogram stft;
  HpssPair hpss;
  OnsetCurve kick;
  OnsetCurve snare;
  OnsetCurve hihat;
  FrameCurve harmonic_loudness;
  FrameCurve percussive_loudness;
  Spectrogram cqt;
  Spectrogram pcp;
};

/// Drum onsets are detected on the percussive component, where sustained
/// bass and pad notes no longer mask them.
FrameFeatures extract_frame_features(const AudioBuffer& buffer);
FrameFeatures extract_frame_features(const AudioBuffer& buffer, Spectrogram stft_spec);

/// The seven strong-beat-synchronous series, in kAllFeatures order. The cqt
/// series is log-scaled by to_db so near-silent bins cannot dominate the
/// standardized distance.
std::vector<FeatureSeries> beat_sync_features(const FrameFeatures& frames,
                                              const StrongBeatGrid& grid);

}  // namespace cuepoint
