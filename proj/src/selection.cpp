#include "cuepoint/selection.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "cuepoint/error.h"

namespace cuepoint {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kNovelty: return "novelty";
    case Stage::kPeriod: return "period";
    case Stage::kSalience: return "salience";
  }
  return "?";
}

std::vector<std::size_t> SwitchPointSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.index);
  return out;
}

std::vector<double> SwitchPointSet::times() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.time_s);
  return out;
}

PeriodEstimate estimate_period(std::span<const NoveltyCurve> curves, std::size_t period) {
  if (period == 0) throw Error(ErrorCode::kInvalidArgument, "period must be positive");
  PeriodEstimate est;
  est.period = period;
  est.scores.assign(period, 0.0);
  if (curves.empty()) {
    est.all_zero = true;
    return est;
  }
  const std::size_t n = curves.front().values.size();
  for (const auto& c : curves) {
    if (c.values.size() != n) {
      throw Error(ErrorCode::kInvalidArgument, "novelty curves differ in length");
    }
  }

  std::vector<double> combined(n, 0.0);
  std::size_t used = 0;
  std::size_t from = n;
  std::size_t to = 0;
  for (const auto& c : curves) {
    const double peak = c.values.empty() ? 0.0 : *std::max_element(c.values.begin(), c.values.end());
    if (!(peak > 0.0)) continue;
    ++used;
    from = std::min(from, c.valid_from);
    to = std::max(to, c.valid_to);
    for (std::size_t t = 0; t < n; ++t) combined[t] += c.values[t] / peak;
  }
  if (used == 0) {
    est.all_zero = true;
    return est;
  }
  for (double& v : combined) v /= static_cast<double>(used);

  for (std::size_t o = 0; o < period; ++o) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t t = o; t < n; t += period) {
      if (t < from || t >= to) continue;
      acc += combined[t] * combined[t];
      ++count;
    }
    est.scores[o] = count > 0 ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
  }
  std::size_t best = 0;
  for (std::size_t o = 1; o < period; ++o) {
    if (est.scores[o] > est.scores[best] * (1.0 + 1e-12) + 1e-300) best = o;
  }
  est.offset = best;
  return est;
}

SwitchPointSet merge_peaks(std::span<const PeakSet> peaks, std::span<const double> strong_times) {
  std::map<std::size_t, std::vector<Feature>> by_index;
  for (const auto& set : peaks) {
    for (std::size_t idx : set.indices) {
      if (idx >= strong_times.size()) {
        throw Error(ErrorCode::kInvalidArgument, "peak index beyond the strong-beat grid");
      }
      by_index[idx].push_back(set.feature);
    }
  }
  SwitchPointSet out;
  for (auto& [idx, feats] : by_index) {
    std::sort(feats.begin(), feats.end());
    feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
    out.points.push_back({idx, strong_times[idx], feats, Stage::kNovelty});
  }
  return out;
}

SwitchPointSet period_filter(const SwitchPointSet& candidates, const PeriodEstimate& period) {
  SwitchPointSet out;
  for (const auto& p : candidates.points) {
    if (p.index % period.period == period.offset) {
      auto kept = p;
      kept.stage = Stage::kPeriod;
      out.points.push_back(std::move(kept));
    }
  }
  return out;
}

SwitchPointSet salience_filter(const SwitchPointSet& candidates, const FeatureSeries& harmonic,
                               double ratio, std::size_t span) {
  if (harmonic.dim() != 1 && harmonic.rows() > 0) {
    throw Error(ErrorCode::kInvalidArgument, "salience expects a scalar harmonic series");
  }
  const std::size_t n = harmonic.rows();
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, harmonic.values(i, 0));
  const double threshold = ratio * peak;

  SwitchPointSet out;
  for (const auto& p : candidates.points) {
    if (p.index >= n) continue;
    const std::size_t end = std::min(n, p.index + span);
    double acc = 0.0;
    for (std::size_t i = p.index; i < end; ++i) acc += harmonic.values(i, 0);
    const double mean = acc / static_cast<double>(end - p.index);
    if (mean > 0.0 && mean >= threshold) {
      auto kept = p;
      kept.stage = Stage::kSalience;
      out.points.push_back(std::move(kept));
    }
  }
  return out;
}

}  // namespace cuepoint
