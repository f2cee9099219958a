#include "cuepoint/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "cuepoint/error.h"

namespace cuepoint {
namespace {

class StageTimer {
 public:
  StageTimer(std::map<std::string, double>& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto end = std::chrono::steady_clock::now();
    sink_[name_] += std::chrono::duration<double, std::milli>(end - start_).count();
  }

 private:
  std::map<std::string, double>& sink_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

GridSummary summarize(const BeatGrid& grid, const StrongBeatGrid& strong) {
  GridSummary s;
  s.tempo_bpm = grid.tempo_bpm;
  s.source = grid.source;
  s.downbeat_offset = grid.downbeat_offset;
  s.n_beats = grid.beat_times.size();
  s.n_strong_beats = strong.size();
  s.first_beat_s = grid.beat_times.empty() ? 0.0 : grid.beat_times.front();
  s.confidence = grid.confidence;
  return s;
}

void check_length(const StrongBeatGrid& strong, const PipelineConfig& config) {
  const std::size_t rows = strong.size() > 0 ? strong.size() - 1 : 0;
  const auto side = static_cast<std::size_t>(2 * config.kernel_half_size());
  if (rows < side) {
    throw Error(ErrorCode::kTrackTooShort,
                "track too short: " + std::to_string(rows) +
                    " strong-beat intervals, need at least " + std::to_string(side));
  }
}

std::string track_id_from(const AudioBuffer& buffer) {
  if (buffer.source_path().empty()) return "track";
  return std::filesystem::path(buffer.source_path()).stem().string();
}

}  // namespace

RuleSet parse_rules(std::string_view spec) {
  RuleSet rules{false, false, false};
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string_view token = spec.substr(pos, comma - pos);
    if (token == "novelty") {
      rules.novelty = true;
    } else if (token == "period") {
      rules.period = true;
    } else if (token == "salience") {
      rules.salience = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown rule '" + std::string(token) +
                      "' (expected novelty, period, salience)");
    }
    pos = comma + 1;
  }
  if (!rules.novelty) {
    throw Error(ErrorCode::kInvalidArgument, "the novelty rule cannot be disabled");
  }
  return rules;
}

std::string format_rules(const RuleSet& rules) {
  std::string out = "novelty";
  if (rules.period) out += ",period";
  if (rules.salience) out += ",salience";
  return out;
}

void PipelineConfig::validate() const {
  auto ratio_ok = [](double r) { return r > 0.0 && r <= 1.0; };
  if (!ratio_ok(peak_threshold)) {
    throw Error(ErrorCode::kInvalidConfig, "peak_threshold must be in (0, 1]");
  }
  if (!ratio_ok(salience_threshold)) {
    throw Error(ErrorCode::kInvalidConfig, "salience_threshold must be in (0, 1]");
  }
  if (kernel_bars < 2 || kernel_bars % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "kernel_bars must be even and >= 2");
  }
  if (peak_window_bars < 1) {
    throw Error(ErrorCode::kInvalidConfig, "peak_window_bars must be >= 1");
  }
  if (period_strong_beats < 1) {
    throw Error(ErrorCode::kInvalidConfig, "period_strong_beats must be >= 1");
  }
  if (!(hit_window_s >= 0.0) || !std::isfinite(hit_window_s)) {
    throw Error(ErrorCode::kInvalidConfig, "hit_window_s must be >= 0");
  }
  if (!enabled_rules.novelty) {
    throw Error(ErrorCode::kInvalidConfig, "the novelty rule cannot be disabled");
  }
}

AnalysisResult select_switch_points(const std::vector<FeatureSeries>& features,
                                    const StrongBeatGrid& strong,
                                    const PipelineConfig& config, PipelineTrace* trace) {
  config.validate();
  check_length(strong, config);
  AnalysisResult result;
  result.config = config;
  result.strong_beat_times = strong.times;

  const FeatureSeries* harmonic = nullptr;
  std::vector<NoveltyCurve> curves;
  {
    StageTimer timer(result.timings_ms, "novelty");
    const Matrix<double> kernel = checkerboard_kernel(config.kernel_half_size());
    for (const auto& series : features) {
      if (series.name == Feature::kHarmonicLoudness) harmonic = &series;
      if (series.empty_intervals > 0) {
        result.warnings.push_back(std::string(to_string(series.name)) + ": " +
                                  std::to_string(series.empty_intervals) +
                                  " empty strong-beat interval(s) back-filled");
      }
      const SelfSimilarityMatrix m = ssm(series);
      if (m.degenerate) {
        result.warnings.push_back(std::string(to_string(series.name)) +
                                  ": degenerate series, no novelty");
      }
      curves.push_back(novelty_curve(m, kernel, default_padding(series.name), series.name));
      result.per_feature_peaks.push_back(
          pick_peaks(curves.back(), config.peak_threshold, config.peak_half_window()));
    }
  }

  SwitchPointSet points = merge_peaks(result.per_feature_peaks, strong.times);
  result.novelty_candidates = points.size();

  result.period = estimate_period(curves, static_cast<std::size_t>(config.period_strong_beats));
  if (result.period.all_zero) result.warnings.push_back("all novelty curves are zero");
  if (config.enabled_rules.period) points = period_filter(points, result.period);
  result.period_candidates = points.size();

  if (config.enabled_rules.salience) {
    if (harmonic == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "salience needs the harmonic_loudness series");
    }
    points = salience_filter(points, *harmonic, config.salience_threshold,
                             static_cast<std::size_t>(config.period_strong_beats));
  }
  result.switch_points = std::move(points);

  if (trace != nullptr) {
    trace->features = features;
    trace->novelty = std::move(curves);
  }
  return result;
}

AnalysisResult get_switch_points(const FrameFeatures& frames, const BeatGrid& grid,
                                 const PipelineConfig& config, PipelineTrace* trace) {
  config.validate();
  const StrongBeatGrid strong = strong_beats(grid);
  check_length(strong, config);
  std::map<std::string, double> timings;
  std::vector<FeatureSeries> series;
  {
    StageTimer timer(timings, "beat_sync");
    series = beat_sync_features(frames, strong);
  }
  AnalysisResult result = select_switch_points(series, strong, config, trace);
  result.grid = summarize(grid, strong);
  for (const auto& [k, v] : timings) result.timings_ms[k] += v;
  return result;
}

AnalysisResult get_switch_points(const AudioBuffer& buffer, const BeatGrid& grid,
                                 const PipelineConfig& config, PipelineTrace* trace) {
  config.validate();
  check_length(strong_beats(grid), config);
  std::map<std::string, double> timings;
  FrameFeatures frames;
  {
    StageTimer timer(timings, "features");
    frames = extract_frame_features(buffer);
  }
  AnalysisResult result = get_switch_points(frames, grid, config, trace);
  result.track_id = track_id_from(buffer);
  for (const auto& [k, v] : timings) result.timings_ms[k] += v;
  return result;
}

CoverageReport explain(const AnalysisResult& result, const AnnotationSet* annotations) {
  CoverageReport report;
  report.per_annotation = annotations != nullptr;
  report.column_times = annotations != nullptr ? annotations->times : result.switch_points.times();
  const double window = result.config.hit_window_s + 1e-9;

  const std::size_t n_cols = report.column_times.size();
  report.hits.assign(kAllFeatures.size(), std::vector<int>(n_cols, 0));
  report.feature_counts.assign(kAllFeatures.size(), 0);
  for (std::size_t f = 0; f < kAllFeatures.size(); ++f) {
    const PeakSet* peaks = nullptr;
    for (const auto& p : result.per_feature_peaks) {
      if (p.feature == kAllFeatures[f]) peaks = &p;
    }
    if (peaks == nullptr) continue;
    for (std::size_t c = 0; c < n_cols; ++c) {
      for (std::size_t idx : peaks->indices) {
        if (idx < result.strong_beat_times.size() &&
            std::abs(result.strong_beat_times[idx] - report.column_times[c]) <= window) {
          report.hits[f][c] = 1;
          break;
        }
      }
      report.feature_counts[f] += static_cast<std::size_t>(report.hits[f][c]);
    }
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    std::set<std::string> groups;
    for (std::size_t f = 0; f < kAllFeatures.size(); ++f) {
      if (report.hits[f][c] != 0) groups.insert(std::string(feature_group(kAllFeatures[f])));
    }
    if (groups.empty()) {
      ++report.missed;
      continue;
    }
    std::string key;
    for (const auto& g : groups) {
      ++report.group_counts[g];
      key += key.empty() ? g : "+" + g;
    }
    ++report.group_intersections[key];
  }
  return report;
}

}  // namespace cuepoint
