#pragma once

#include <vector>

#include "cuepoint/features.h"
#include "cuepoint/matrix.h"

namespace cuepoint {

/// Pairwise standardized-Euclidean distances between feature rows.
struct SelfSimilarityMatrix {
  Matrix<double> dist;       // [n x n], symmetric, zero diagonal
  bool degenerate = false;   // every dimension had zero variance

  std::size_t n() const noexcept { return dist.rows(); }
};

/// dist[i][j] = sqrt(sum_d (x_i[d] - x_j[d])^2 / var[d]) with population
/// variance per dimension; zero-variance dimensions are ignored. If all are
/// ignored the matrix is all zero and flagged degenerate.
/// Throws kTrackTooShort for fewer than two rows.
SelfSimilarityMatrix ssm(const Matrix<double>& rows);
SelfSimilarityMatrix ssm(const FeatureSeries& series);

/// 1 - dist / max(dist); all ones when max(dist) == 0.
Matrix<double> similarity(const SelfSimilarityMatrix& m);

inline constexpr int kKernelHalfSize = 8;  // strong beats, i.e. four bars

/// (2 * half_size)^2 checkerboard: positive on the two same-segment
/// quadrants, negative across, Gaussian taper with sigma = half_size / 2
/// around the centre, and unit L1 norm.
Matrix<double> checkerboard_kernel(int half_size = kKernelHalfSize);

enum class Padding { kValid, kZero };

/// Zero padding for the two loudness features, valid for the rest.
Padding default_padding(Feature feature);

struct NoveltyCurve {
  Feature feature = Feature::kKick;
  std::vector<double> values;  // one per strong-beat interval, >= 0
  std::size_t valid_from = 0;  // first defined index
  std::size_t valid_to = 0;    // one past the last defined index
  bool degenerate = false;
};

/// values[t] = max(0, sum_{u,v} K[u][v] * S[t-h+u][t-h+v]) with S the
/// similarity matrix and h = kernel side / 2. Valid padding defines
/// t in [h, n-h]; zero padding treats out-of-range S as 0 and defines every t.
/// Degenerate matrices give an all-zero curve.
/// Throws kTrackTooShort when n < kernel side.
NoveltyCurve novelty_curve(const SelfSimilarityMatrix& m, const Matrix<double>& kernel,
                           Padding padding, Feature feature = Feature::kKick);

struct PeakSet {
  Feature feature = Feature::kKick;
  std::vector<std::size_t> indices;
};

inline constexpr double kPeakThreshold = 0.3;
inline constexpr std::size_t kPeakHalfWindow = 8;  // strong beats

/// Novelty is at most 0.5 (a clean step between two homogeneous blocks).
/// Peaks below this share of it come from frame-alignment jitter, not
/// structure, and are never picked.
inline constexpr double kMinNovelty = 0.05;

/// Indices t with values[t] >= threshold_ratio * max, values[t] >= kMinNovelty,
/// values[t] == max over [t - half_window, t + half_window] (clipped), and
/// strictly greater than every earlier value in that window.
PeakSet pick_peaks(const NoveltyCurve& curve, double threshold_ratio = kPeakThreshold,
                   std::size_t half_window = kPeakHalfWindow);

}  // namespace cuepoint
