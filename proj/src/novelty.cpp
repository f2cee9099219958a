#include "cuepoint/novelty.h"

#include <algorithm>
#include <cmath>

#include "cuepoint/error.h"

namespace cuepoint {

SelfSimilarityMatrix ssm(const Matrix<double>& rows) {
  const std::size_t n = rows.rows();
  const std::size_t dim = rows.cols();
  if (n < 2) {
    throw Error(ErrorCode::kTrackTooShort, "self-similarity needs at least two rows");
  }
  std::vector<double> inv_var;
  std::vector<std::size_t> kept;
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean += rows(i, d);
      mean_sq += rows(i, d) * rows(i, d);
    }
    mean /= static_cast<double>(n);
    mean_sq /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = rows(i, d) - mean;
      var += c * c;
    }
    var /= static_cast<double>(n);
    // Relative test so that rounding residue of a constant column counts as 0.
    if (var > 1e-12 * mean_sq && var > 0.0) {
      kept.push_back(d);
      inv_var.push_back(1.0 / var);
    }
  }

  SelfSimilarityMatrix out;
  out.dist = Matrix<double>(n, n, 0.0);
  if (kept.empty()) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = rows.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = rows.row(j);
      double acc = 0.0;
      for (std::size_t q = 0; q < kept.size(); ++q) {
        const double diff = xi[kept[q]] - xj[kept[q]];
        acc += diff * diff * inv_var[q];
      }
      const double d = std::sqrt(acc);
      out.dist(i, j) = d;
      out.dist(j, i) = d;
    }
  }
  return out;
}

SelfSimilarityMatrix ssm(const FeatureSeries& series) { return ssm(series.values); }

Matrix<double> similarity(const SelfSimilarityMatrix& m) {
  const auto& d = m.dist.data();
  const double peak = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  Matrix<double> s(m.n(), m.n(), 1.0);
  if (peak > 0.0) {
    auto& sd = s.data();
    for (std::size_t i = 0; i < d.size(); ++i) sd[i] = 1.0 - d[i] / peak;
  }
  return s;
}

Matrix<double> checkerboard_kernel(int half_size) {
  if (half_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kernel half size must be >= 1");
  }
  const int side = 2 * half_size;
  const double sigma = half_size / 2.0;
  const double centre = half_size - 0.5;
  Matrix<double> k(side, side);
  double l1 = 0.0;
  for (int u = 0; u < side; ++u) {
    for (int v = 0; v < side; ++v) {
      const double x = u - centre;
      const double y = v - centre;
      const double g = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      const bool same = (u < half_size) == (v < half_size);
      k(u, v) = same ? g : -g;
      l1 += g;
    }
  }
  for (auto& v : k.data()) v /= l1;
  return k;
}

Padding default_padding(Feature feature) {
  return feature == Feature::kHarmonicLoudness || feature == Feature::kPercussiveLoudness
             ? Padding::kZero
             : Padding::kValid;
}

NoveltyCurve novelty_curve(const SelfSimilarityMatrix& m, const Matrix<double>& kernel,
                           Padding padding, Feature feature) {
  const std::size_t n = m.n();
  const std::size_t side = kernel.rows();
  if (side == 0 || kernel.cols() != side || side % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel must be square with even side");
  }
  if (n < side) {
    throw Error(ErrorCode::kTrackTooShort,
                "track too short for novelty: " + std::to_string(n) +
                    " strong-beat intervals, need " + std::to_string(side));
  }
  const auto half = static_cast<long>(side / 2);
  NoveltyCurve curve;
  curve.feature = feature;
  curve.values.assign(n, 0.0);
  curve.degenerate = m.degenerate;
  if (padding == Padding::kValid) {
    curve.valid_from = static_cast<std::size_t>(half);
    curve.valid_to = n - static_cast<std::size_t>(half) + 1;
  } else {
    curve.valid_from = 0;
    curve.valid_to = n;
  }
  if (m.degenerate) return curve;

  const Matrix<double> s = similarity(m);
  const auto ln = static_cast<long>(n);
  for (std::size_t t = curve.valid_from; t < curve.valid_to; ++t) {
    const long base = static_cast<long>(t) - half;
    double acc = 0.0;
    for (long u = 0; u < static_cast<long>(side); ++u) {
      const long i = base + u;
      if (i < 0 || i >= ln) continue;
      for (long v = 0; v < static_cast<long>(side); ++v) {
        const long j = base + v;
        if (j < 0 || j >= ln) continue;
        acc += kernel(u, v) * s(i, j);
      }
    }
    curve.values[t] = std::max(0.0, acc);
  }
  return curve;
}

PeakSet pick_peaks(const NoveltyCurve& curve, double threshold_ratio,
                   std::size_t half_window) {
  PeakSet peaks;
  peaks.feature = curve.feature;
  const auto& v = curve.values;
  if (v.empty()) return peaks;
  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return peaks;
  const double threshold = threshold_ratio * peak;
  const std::size_t n = v.size();
  for (std::size_t t = 0; t < n; ++t) {
    if (!(v[t] >= kMinNovelty) || v[t] < threshold) continue;
    const std::size_t lo = t >= half_window ? t - half_window : 0;
    const std::size_t hi = std::min(n - 1, t + half_window);
    bool is_peak = true;
    for (std::size_t s = lo; s < t && is_peak; ++s) is_peak = v[s] < v[t];
    for (std::size_t s = t + 1; s <= hi && is_peak; ++s) is_peak = v[s] <= v[t];
    if (is_peak) peaks.indices.push_back(t);
  }
  return peaks;
}

}  // namespace cuepoint
