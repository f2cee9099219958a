#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "cuepoint/audio.h"
#include "cuepoint/matrix.h"
#include "cuepoint/novelty.h"
#include "cuepoint/synth.h"

namespace fixtures {

using cuepoint::AudioBuffer;
using cuepoint::Matrix;

inline std::vector<float> sine(double hz, double seconds, int rate = cuepoint::kAnalysisRate,
                               double amp = 0.5) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / rate));
  }
  return x;
}

inline std::vector<float> noise(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<float> x(n);
  for (auto& v : x) v = static_cast<float>(u(rng));
  return x;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cuepoint_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline AudioBuffer buffer(std::vector<float> x) {
  return AudioBuffer::from_mono(std::move(x), cuepoint::kAnalysisRate);
}

/// Short decaying noise bursts at the given times.
inline std::vector<float> clicks(const std::vector<double>& times, double seconds,
                                 std::uint64_t seed = 1, double amp = 0.9) {
  const int rate = cuepoint::kAnalysisRate;
  std::vector<float> x(static_cast<std::size_t>(std::llround(seconds * rate)), 0.0f);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int len = rate / 100;
  for (double t : times) {
    const auto start = static_cast<long>(std::llround(t * rate));
    for (int i = 0; i < len; ++i) {
      const long k = start + i;
      if (k < 0 || k >= static_cast<long>(x.size())) continue;
      x[k] += static_cast<float>(amp * u(rng) * std::exp(-i / (0.002 * rate)));
    }
  }
  return x;
}

/// Pitch-dropping sine kicks.
inline std::vector<float> kicks(const std::vector<double>& times, double seconds) {
  const int rate = cuepoint::kAnalysisRate;
  std::vector<float> x(static_cast<std::size_t>(std::llround(seconds * rate)), 0.0f);
  const int len = static_cast<int>(0.25 * rate);
  for (double t : times) {
    const auto start = static_cast<long>(std::llround(t * rate));
    double phase = 0.0;
    for (int i = 0; i < len; ++i) {
      const long k = start + i;
      if (k >= static_cast<long>(x.size())) break;
      const double tt = static_cast<double>(i) / rate;
      phase += 2.0 * std::numbers::pi * (50.0 + 100.0 * std::exp(-tt / 0.03)) / rate;
      x[k] += static_cast<float>(0.8 * std::sin(phase) * std::exp(-tt / 0.1));
    }
  }
  return x;
}

inline std::vector<double> grid_times(double bpm, double seconds, double offset = 0.0) {
  std::vector<double> t;
  for (double x = offset; x < seconds - 0.05; x += 60.0 / bpm) t.push_back(x);
  return t;
}

inline Matrix<double> random_rows(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  Matrix<double> m(n, dim);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

/// Standardized Euclidean distance, recomputed from the definition with the
/// two-pass population variance.
inline Matrix<double> brute_ssm(const Matrix<double>& x) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  std::vector<double> var(dim, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, d);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) var[d] += (x(i, d) - mean) * (x(i, d) - mean);
    var[d] /= static_cast<double>(n);
  }
  Matrix<double> out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        if (var[d] > 0.0) acc += (x(i, d) - x(j, d)) * (x(i, d) - x(j, d)) / var[d];
      }
      out(i, j) = std::sqrt(acc);
    }
  }
  return out;
}

/// Direct O(n k^2) checkerboard correlation on the similarity 1 - d / max(d).
/// Returns -1 where the value is undefined under valid padding.
inline std::vector<double> brute_novelty(const Matrix<double>& dist, const Matrix<double>& kernel,
                                         bool zero_padding) {
  const long n = static_cast<long>(dist.rows());
  const long side = static_cast<long>(kernel.rows());
  const long half = side / 2;
  double peak = 0.0;
  for (double v : dist.data()) peak = std::max(peak, v);
  std::vector<double> out(static_cast<std::size_t>(n), -1.0);
  for (long t = 0; t < n; ++t) {
    if (!zero_padding && (t - half < 0 || t - half + side > n)) continue;
    double acc = 0.0;
    for (long u = 0; u < side; ++u) {
      for (long v = 0; v < side; ++v) {
        const long i = t - half + u;
        const long j = t - half + v;
        if (i < 0 || j < 0 || i >= n || j >= n) continue;
        const double s = peak > 0.0 ? 1.0 - dist(i, j) / peak : 1.0;
        acc += kernel(u, v) * s;
      }
    }
    out[static_cast<std::size_t>(t)] = std::max(0.0, acc);
  }
  return out;
}

/// Maximum one-to-one matching with |c - a| <= w, by exhaustive search.
inline std::size_t optimal_matching(const std::vector<double>& c, const std::vector<double>& a,
                                    double w, std::size_t from = 0, unsigned used = 0) {
  if (from == a.size()) return 0;
  std::size_t best = optimal_matching(c, a, w, from + 1, used);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if ((used >> j) & 1u) continue;
    if (std::abs(c[j] - a[from]) <= w + 1e-9) {
      best = std::max(best, 1 + optimal_matching(c, a, w, from + 1, used | (1u << j)));
    }
  }
  return best;
}

/// Seven novelty curves of length n with impulses of random height in
/// [0.6, 1] at offset + 8k over a background below 0.2, so that after
/// per-curve max normalization impulses stay above 0.6 and background below
/// 1/3. Valid-padding features are zero outside their defined range.
inline std::vector<cuepoint::NoveltyCurve> periodic_novelty(std::size_t n, std::size_t offset,
                                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> high(0.6, 1.0);
  std::uniform_real_distribution<double> low(0.0, 0.2);
  std::vector<cuepoint::NoveltyCurve> curves;
  for (cuepoint::Feature f : cuepoint::kAllFeatures) {
    cuepoint::NoveltyCurve c;
    c.feature = f;
    c.values.assign(n, 0.0);
    const bool valid = cuepoint::default_padding(f) == cuepoint::Padding::kValid;
    c.valid_from = valid ? 8 : 0;
    c.valid_to = valid ? n - 7 : n;
    for (std::size_t t = c.valid_from; t < c.valid_to; ++t) {
      c.values[t] = t % 8 == offset ? high(rng) : low(rng);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

/// Rotates every curve right by r, keeping defined ranges in place.
inline std::vector<cuepoint::NoveltyCurve> rotate(std::vector<cuepoint::NoveltyCurve> curves,
                                                  std::size_t r) {
  for (auto& c : curves) {
    std::rotate(c.values.rbegin(), c.values.rbegin() + static_cast<long>(r), c.values.rend());
    c.valid_from = 0;
    c.valid_to = c.values.size();
  }
  return curves;
}

/// Random arrangement for the end-to-end benchmark: 2-5 sections of 8, 12 or
/// 16 bars, tempo 99-147 bpm, consecutive sections differing in layers, and
/// every section carrying bass or pad so that it passes salience.
inline cuepoint::TrackScript random_script(std::mt19937_64& rng) {
  using cuepoint::Layer;
  std::uniform_int_distribution<int> n_sections(2, 5);
  std::uniform_int_distribution<int> length(0, 2);
  std::uniform_int_distribution<int> tempo(99, 147);
  std::uniform_int_distribution<int> root(0, 11);
  std::bernoulli_distribution coin(0.5);

  cuepoint::TrackScript s;
  s.tempo_bpm = tempo(rng);
  s.seed = rng();
  const int count = n_sections(rng);
  int bar = 0;
  std::vector<Layer> previous;
  for (int i = 0; i < count; ++i) {
    cuepoint::Section section;
    section.start_bar = bar;
    section.root = root(rng);
    do {
      section.layers.clear();
      for (Layer l : {Layer::kKick4, Layer::kSnare24, Layer::kHihat8, Layer::kBassLoop,
                      Layer::kPadChord}) {
        if (coin(rng)) section.layers.push_back(l);
      }
      if (!section.has(Layer::kBassLoop) && !section.has(Layer::kPadChord)) {
        section.layers.push_back(coin(rng) ? Layer::kBassLoop : Layer::kPadChord);
        std::sort(section.layers.begin(), section.layers.end());
      }
    } while (section.layers == previous);
    previous = section.layers;
    s.sections.push_back(section);
    bar += 8 + 4 * length(rng);
  }
  s.bars = bar;
  return s;
}

}  // namespace fixtures
