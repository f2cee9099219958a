#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cuepoint {

inline constexpr double kHitWindowS = 0.5;

/// Expert switch points for one track. Only [0, region_end] was annotated.
struct AnnotationSet {
  std::string track_id;
  std::vector<double> times;  // sorted
  double region_end = 0.0;

  /// Sorts nothing; throws kParseError unless times are sorted, unique
  /// within 1 ms, finite, and <= region_end.
  void validate() const;
};

struct Matching {
  std::vector<double> evaluated;  // candidates inside [0, region_end + window]
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (evaluated idx, annotation idx)
  std::size_t hits = 0;
  std::size_t false_positives = 0;
  std::size_t misses = 0;
};

/// One-to-one matching with |dt| <= window. Candidates are first clipped to
/// [0, region_end + window]. Annotations are visited in time order and each
/// takes the earliest unmatched candidate within its window; on a line with
/// a symmetric window this yields a maximum-cardinality matching.
Matching match(std::span<const double> candidates, const AnnotationSet& annotations,
               double window_s = kHitWindowS);

struct CandidateSet {
  std::string track_id;
  std::vector<double> times;
};

struct TrackScore {
  std::string track_id;
  std::size_t candidates = 0;  // before clipping
  std::size_t evaluated = 0;   // after clipping
  std::size_t annotations = 0;
  std::size_t hits = 0;
  std::size_t false_positives = 0;
  std::size_t misses = 0;
  std::optional<double> precision;  // empty when no candidate was evaluated
  std::optional<double> recall;     // empty when there are no annotations
};

struct CountStats {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t min = 0;
  std::size_t max = 0;
};

struct EvalReport {
  std::string method;
  double window_s = kHitWindowS;
  std::vector<TrackScore> per_track;
  std::size_t hits = 0;
  std::size_t false_positives = 0;
  std::size_t misses = 0;
  std::optional<double> precision;  // micro-averaged
  std::optional<double> recall;
  CountStats candidate_count;
  std::vector<std::string> skipped;  // candidate tracks without annotations
};

/// Scores every candidate track that has annotations. Throws kNoOverlap if
/// no track id is shared.
EvalReport evaluate_corpus(std::span<const CandidateSet> candidates,
                           std::span<const AnnotationSet> annotations,
                           double window_s = kHitWindowS, std::string method = {});

}  // namespace cuepoint
