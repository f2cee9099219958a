#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cuepoint/features.h"
#include "cuepoint/novelty.h"

namespace cuepoint {

inline constexpr std::size_t kPeriodStrongBeats = 8;  // four bars
inline constexpr double kSalienceThreshold = 0.4;

struct PeriodEstimate {
  std::size_t period = kPeriodStrongBeats;
  std::size_t offset = 0;
  std::vector<double> scores;  // one RMS score per offset
  bool all_zero = false;       // no curve carried any novelty
};

/// Combined curve C[t] = mean over curves with a positive maximum of
/// values[t] / max. score[o] = RMS of C at o, o + period, ... restricted to
/// indices where at least one contributing curve is defined. The offset is
/// the arg max, ties (within 1e-12 relative) going to the smaller offset.
PeriodEstimate estimate_period(std::span<const NoveltyCurve> curves,
                               std::size_t period = kPeriodStrongBeats);

enum class Stage { kNovelty, kPeriod, kSalience };

std::string_view to_string(Stage stage);

struct SwitchPoint {
  std::size_t index = 0;  // strong-beat index
  double time_s = 0.0;
  std::vector<Feature> features;  // contributing features, kAllFeatures order
  Stage stage = Stage::kNovelty;

  bool operator==(const SwitchPoint&) const = default;
};

struct SwitchPointSet {
  std::vector<SwitchPoint> points;  // strictly increasing index

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  std::vector<std::size_t> indices() const;
  std::vector<double> times() const;
};

/// Union of per-feature peaks; duplicate indices merge their features.
SwitchPointSet merge_peaks(std::span<const PeakSet> peaks,
                           std::span<const double> strong_times);

/// Keeps points with index == offset (mod period).
SwitchPointSet period_filter(const SwitchPointSet& candidates, const PeriodEstimate& period);

/// Keeps point p iff the mean of harmonic rows [p, p + span) (clipped to the
/// track) is positive and >= ratio * max over all rows.
SwitchPointSet salience_filter(const SwitchPointSet& candidates, const FeatureSeries& harmonic,
                               double ratio = kSalienceThreshold,
                               std::size_t span = kPeriodStrongBeats);

}  // namespace cuepoint
