#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cuepoint/audio.h"
#include "cuepoint/beatgrid.h"
#include "cuepoint/evaluation.h"
#include "cuepoint/features.h"
#include "cuepoint/novelty.h"
#include "cuepoint/selection.h"

namespace cuepoint {

/// Which of the three filtering rules run. Novelty is the base stage and is
/// always on; the others can be switched off for ablation.
struct RuleSet {
  bool novelty = true;
  bool period = true;
  bool salience = true;

  bool operator==(const RuleSet&) const = default;
};

/// Parses "novelty[,period][,salience]" (any order). Throws kInvalidArgument.
RuleSet parse_rules(std::string_view spec);
std::string format_rules(const RuleSet& rules);

struct PipelineConfig {
  double peak_threshold = kPeakThreshold;          // x max of each novelty curve
  double salience_threshold = kSalienceThreshold;  // x max harmonic energy
  int kernel_bars = 8;        // full checkerboard width
  int peak_window_bars = 4;   // peaks are maxima within +- this many bars
  int period_strong_beats = static_cast<int>(kPeriodStrongBeats);
  double hit_window_s = kHitWindowS;
  RuleSet enabled_rules;

  /// Throws kInvalidConfig.
  void validate() const;

  /// Kernel half width in strong beats (two per bar).
  int kernel_half_size() const { return kernel_bars; }
  std::size_t peak_half_window() const {
    return static_cast<std::size_t>(peak_window_bars) * StrongBeatGrid::kPerBar;
  }

  bool operator==(const PipelineConfig&) const = default;
};

struct GridSummary {
  double tempo_bpm = 0.0;
  GridSource source = GridSource::kEstimated;
  int downbeat_offset = 0;
  std::size_t n_beats = 0;
  std::size_t n_strong_beats = 0;
  double first_beat_s = 0.0;
  double confidence = 1.0;
};

struct AnalysisResult {
  std::string track_id;
  SwitchPointSet switch_points;
  PeriodEstimate period;
  GridSummary grid;
  std::vector<PeakSet> per_feature_peaks;  // kAllFeatures order
  std::vector<double> strong_beat_times;
  std::size_t novelty_candidates = 0;  // after the union of peaks
  std::size_t period_candidates = 0;   // after period filtering (== novelty if off)
  std::vector<std::string> warnings;
  PipelineConfig config;
  std::map<std::string, double> timings_ms;  // wall time per stage
};

/// Intermediate data, filled on request for dumps and plots.
struct PipelineTrace {
  std::vector<FeatureSeries> features;
  std::vector<NoveltyCurve> novelty;
};

/// Runs the full switch-point procedure on one track: features, strong-beat
/// aggregation, per-feature novelty and peaks, then the period and salience
/// filters as enabled. Throws kTrackTooShort, kTooFewBeats, kInvalidConfig.
AnalysisResult get_switch_points(const AudioBuffer& buffer, const BeatGrid& grid,
                                 const PipelineConfig& config = {},
                                 PipelineTrace* trace = nullptr);

/// Same, reusing precomputed frame features.
AnalysisResult get_switch_points(const FrameFeatures& frames, const BeatGrid& grid,
                                 const PipelineConfig& config = {},
                                 PipelineTrace* trace = nullptr);

/// Stages after feature extraction, exposed for tests with synthetic series.
AnalysisResult select_switch_points(const std::vector<FeatureSeries>& features,
                                    const StrongBeatGrid& strong,
                                    const PipelineConfig& config,
                                    PipelineTrace* trace = nullptr);

/// Feature x column binary matrix: which features have a novelty peak within
/// the hit window of each column. Columns are the emitted switch points, or
/// the annotations when given.
struct CoverageReport {
  bool per_annotation = false;
  std::vector<double> column_times;
  std::vector<std::vector<int>> hits;  // [feature][column], kAllFeatures order
  std::vector<std::size_t> feature_counts;
  std::map<std::string, std::size_t> group_counts;        // rhythm/loudness/spectrum
  std::map<std::string, std::size_t> group_intersections;  // e.g. "loudness+rhythm"
  std::size_t missed = 0;  // all-zero columns
};

CoverageReport explain(const AnalysisResult& result,
                       const AnnotationSet* annotations = nullptr);

}  // namespace cuepoint
