#include "cuepoint/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "cuepoint/error.h"

namespace cuepoint {

void AnnotationSet::validate() const {
  if (!std::isfinite(region_end)) {
    throw Error(ErrorCode::kParseError, track_id + ": region_end_s must be finite");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) {
      throw Error(ErrorCode::kParseError, track_id + ": non-finite annotation time");
    }
    if (times[i] > region_end) {
      throw Error(ErrorCode::kParseError,
                  track_id + ": annotation beyond region_end_s");
    }
    if (i > 0 && times[i] - times[i - 1] < 0.001) {
      throw Error(ErrorCode::kParseError,
                  track_id + ": annotation times must be sorted and at least 1 ms apart");
    }
  }
}

Matching match(std::span<const double> candidates, const AnnotationSet& annotations,
               double window_s) {
  if (!(window_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "hit window must be non-negative");
  }
  Matching m;
  const double upper = annotations.region_end + window_s;
  for (double c : candidates) {
    if (c >= 0.0 && c <= upper) m.evaluated.push_back(c);
  }
  std::vector<std::size_t> order(m.evaluated.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m.evaluated[a] < m.evaluated[b]; });

  std::vector<std::size_t> ann(annotations.times.size());
  for (std::size_t i = 0; i < ann.size(); ++i) ann[i] = i;
  std::stable_sort(ann.begin(), ann.end(), [&](std::size_t a, std::size_t b) {
    return annotations.times[a] < annotations.times[b];
  });

  // Candidates left of the current annotation's window can never be used by
  // a later annotation, so a single forward cursor suffices.
  std::vector<bool> used(order.size(), false);
  std::size_t cursor = 0;
  // Guard against rounding at the window edge (times carry ms precision).
  const double tol = window_s + 1e-9;
  for (std::size_t a : ann) {
    const double t = annotations.times[a];
    while (cursor < order.size() && m.evaluated[order[cursor]] < t - tol) ++cursor;
    for (std::size_t j = cursor; j < order.size(); ++j) {
      const double c = m.evaluated[order[j]];
      if (c > t + tol) break;
      if (!used[j]) {
        used[j] = true;
        m.pairs.emplace_back(order[j], a);
        break;
      }
    }
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  m.hits = m.pairs.size();
  m.false_positives = m.evaluated.size() - m.hits;
  m.misses = annotations.times.size() - m.hits;
  return m;
}

EvalReport evaluate_corpus(std::span<const CandidateSet> candidates,
                           std::span<const AnnotationSet> annotations, double window_s,
                           std::string method) {
  std::map<std::string, const AnnotationSet*> by_id;
  for (const auto& a : annotations) by_id[a.track_id] = &a;

  EvalReport report;
  report.method = std::move(method);
  report.window_s = window_s;
  std::size_t evaluated = 0;
  std::size_t annotated = 0;
  for (const auto& c : candidates) {
    const auto it = by_id.find(c.track_id);
    if (it == by_id.end()) {
      report.skipped.push_back(c.track_id);
      continue;
    }
    const AnnotationSet& a = *it->second;
    const Matching m = match(c.times, a, window_s);
    TrackScore s;
    s.track_id = c.track_id;
    s.candidates = c.times.size();
    s.evaluated = m.evaluated.size();
    s.annotations = a.times.size();
    s.hits = m.hits;
    s.false_positives = m.false_positives;
    s.misses = m.misses;
    if (s.evaluated > 0) s.precision = static_cast<double>(s.hits) / s.evaluated;
    if (s.annotations > 0) s.recall = static_cast<double>(s.hits) / s.annotations;
    report.hits += s.hits;
    report.false_positives += s.false_positives;
    report.misses += s.misses;
    evaluated += s.evaluated;
    annotated += s.annotations;
    report.per_track.push_back(std::move(s));
  }
  if (report.per_track.empty()) {
    throw Error(ErrorCode::kNoOverlap, "no track id is shared by candidates and annotations");
  }
  if (evaluated > 0) report.precision = static_cast<double>(report.hits) / evaluated;
  if (annotated > 0) report.recall = static_cast<double>(report.hits) / annotated;

  const auto n = static_cast<double>(report.per_track.size());
  double sum = 0.0;
  report.candidate_count.min = report.per_track.front().candidates;
  report.candidate_count.max = report.per_track.front().candidates;
  for (const auto& s : report.per_track) {
    sum += static_cast<double>(s.candidates);
    report.candidate_count.min = std::min(report.candidate_count.min, s.candidates);
    report.candidate_count.max = std::max(report.candidate_count.max, s.candidates);
  }
  report.candidate_count.mean = sum / n;
  double var = 0.0;
  for (const auto& s : report.per_track) {
    const double d = static_cast<double>(s.candidates) - report.candidate_count.mean;
    var += d * d;
  }
  report.candidate_count.std = std::sqrt(var / n);
  return report;
}

}  // namespace cuepoint
