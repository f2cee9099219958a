#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "cuepoint/dsp.h"
#include "cuepoint/error.h"

namespace cuepoint {
namespace {

constexpr int kDecimatorHalfTaps = 64;
// An octave is analysed at a decimated rate only if its top bin stays below
// this fraction of the current rate; the half-band filter passes up to
// roughly 0.41 of the decimated rate.
constexpr double kDecimateBelow = 0.18;

double filter_q(int bins_per_octave) {
  return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
}

const std::vector<double>& decimator_taps() {
  static const std::vector<double> taps = [] {
    const int len = 2 * kDecimatorHalfTaps + 1;
    std::vector<double> h(len);
    const double fc = 0.225;  // cycles per input sample
    double sum = 0.0;
    for (int j = 0; j < len; ++j) {
      const int m = j - kDecimatorHalfTaps;
      const double x = 2.0 * std::numbers::pi * fc * m;
      const double sinc = m == 0 ? 2.0 * fc : std::sin(x) / (std::numbers::pi * m);
      const double a = 2.0 * std::numbers::pi * j / (len - 1);
      const double blackman = 0.42 - 0.5 * std::cos(a) + 0.08 * std::cos(2.0 * a);
      h[j] = sinc * blackman;
      sum += h[j];
    }
    for (double& v : h) v /= sum;
    return h;
  }();
  return taps;
}

// Zero-phase lowpass and 2:1 decimation; y[m] is aligned with x[2m].
std::vector<double> decimate2(const std::vector<double>& x) {
  const auto& h = decimator_taps();
  const auto n = static_cast<long>(x.size());
  std::vector<double> y(static_cast<std::size_t>((n + 1) / 2));
  for (long m = 0; m < static_cast<long>(y.size()); ++m) {
    const long centre = 2 * m;
    const long lo = std::max(0L, centre - kDecimatorHalfTaps);
    const long hi = std::min(n - 1, centre + kDecimatorHalfTaps);
    double acc = 0.0;
    for (long k = lo; k <= hi; ++k) {
      acc += h[static_cast<std::size_t>(k - centre + kDecimatorHalfTaps)] * x[k];
    }
    y[m] = acc;
  }
  return y;
}

struct CqKernel {
  std::vector<double> re;
  std::vector<double> im;
  long half = 0;  // kernel spans [-half, half] around the frame centre
};

CqKernel make_kernel(double freq, double rate, double q) {
  long len = static_cast<long>(std::ceil(q * rate / freq));
  if (len % 2 == 0) ++len;
  CqKernel k;
  k.half = len / 2;
  k.re.resize(len);
  k.im.resize(len);
  double wsum = 0.0;
  std::vector<double> w(len);
  for (long n = 0; n < len; ++n) {
    w[n] = len == 1 ? 1.0 : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (len - 1));
    wsum += w[n];
  }
  for (long n = 0; n < len; ++n) {
    const double phase = 2.0 * std::numbers::pi * freq * (n - k.half) / rate;
    k.re[n] = w[n] / wsum * std::cos(phase);
    k.im[n] = -w[n] / wsum * std::sin(phase);
  }
  return k;
}

}  // namespace

std::size_t longest_cq_kernel(double fmin, int bins_per_octave) {
  long len = static_cast<long>(std::ceil(filter_q(bins_per_octave) * kAnalysisRate / fmin));
  if (len % 2 == 0) ++len;
  return static_cast<std::size_t>(len);
}

Spectrogram constant_q(const AudioBuffer& buffer, double fmin, int n_bins,
                       int bins_per_octave, int hop) {
  if (fmin <= 0.0 || n_bins <= 0 || bins_per_octave <= 0 || hop <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid constant-Q parameters");
  }
  const double fmax = fmin * std::pow(2.0, (n_bins - 1.0) / bins_per_octave);
  if (fmax >= 0.45 * kAnalysisRate) {
    throw Error(ErrorCode::kInvalidArgument, "constant-Q range exceeds Nyquist");
  }
  const std::size_t longest = longest_cq_kernel(fmin, bins_per_octave);
  if (buffer.size() < longest) {
    throw Error(ErrorCode::kBufferTooShort,
                "buffer shorter than the longest constant-Q kernel (" +
                    std::to_string(buffer.size()) + " < " +
                    std::to_string(longest) + " samples)");
  }

  const double q = filter_q(bins_per_octave);
  const std::size_t n_frames = 1 + buffer.size() / hop;

  Spectrogram spec;
  spec.kind = SpectrogramKind::kCqt;
  spec.hop = hop;
  spec.window = 0;
  spec.center_offset = 0.0;
  spec.sample_rate = buffer.sample_rate();
  spec.frames = Matrix<float>(n_frames, static_cast<std::size_t>(n_bins));
  spec.bin_frequencies.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    spec.bin_frequencies[b] = fmin * std::pow(2.0, static_cast<double>(b) / bins_per_octave);
  }

  std::vector<double> signal(buffer.samples().begin(), buffer.samples().end());
  double rate = buffer.sample_rate();
  long level_hop = hop;

  const int n_octaves = (n_bins + bins_per_octave - 1) / bins_per_octave;
  for (int octave = n_octaves - 1; octave >= 0; --octave) {
    const int first = octave * bins_per_octave;
    const int last = std::min(n_bins, first + bins_per_octave) - 1;
    const double top = spec.bin_frequencies[last];
    while (level_hop % 2 == 0 && top <= kDecimateBelow * rate) {
      signal = decimate2(signal);
      rate /= 2.0;
      level_hop /= 2;
    }
    const auto n = static_cast<long>(signal.size());
    for (int b = first; b <= last; ++b) {
      const CqKernel kernel = make_kernel(spec.bin_frequencies[b], rate, q);
      for (std::size_t t = 0; t < n_frames; ++t) {
        const long start = static_cast<long>(t) * level_hop - kernel.half;
        const long lo = std::max(0L, -start);
        const long hi = std::min(static_cast<long>(kernel.re.size()), n - start);
        double re = 0.0;
        double im = 0.0;
        for (long j = lo; j < hi; ++j) {
          const double x = signal[start + j];
          re += x * kernel.re[j];
          im += x * kernel.im[j];
        }
        spec.frames(t, b) = static_cast<float>(std::hypot(re, im));
      }
    }
  }
  return spec;
}

Spectrogram cqt(const AudioBuffer& buffer) {
  return constant_q(buffer, kCqtMinHz, kCqtBins);
}

std::string_view pitch_class_name(std::size_t chroma_bin) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
  return kNames[chroma_bin % 12];
}

Spectrogram pcp(const AudioBuffer& buffer) {
  const Spectrogram cq = constant_q(buffer, kChromaMinHz, 7 * kBinsPerOctave);
  // A0 is pitch class A (index 9 with C = 0).
  constexpr std::size_t kFirstClass = 9;

  Spectrogram chroma;
  chroma.kind = SpectrogramKind::kChroma;
  chroma.hop = cq.hop;
  chroma.window = 0;
  chroma.center_offset = cq.center_offset;
  chroma.sample_rate = cq.sample_rate;
  chroma.frames = Matrix<float>(cq.n_frames(), 12);
  chroma.bin_frequencies.resize(12);
  for (std::size_t c = 0; c < 12; ++c) {
    // Reference frequency of the class in the C4 octave.
    chroma.bin_frequencies[c] = 261.6255653005986 * std::pow(2.0, c / 12.0);
  }
  for (std::size_t t = 0; t < cq.n_frames(); ++t) {
    std::array<double, 12> acc{};
    for (std::size_t b = 0; b < cq.n_bins(); ++b) {
      acc[(kFirstClass + b) % 12] += cq.frames(t, b);
    }
    const double peak = *std::max_element(acc.begin(), acc.end());
    for (std::size_t c = 0; c < 12; ++c) {
      chroma.frames(t, c) = static_cast<float>(peak > 0.0 ? acc[c] / peak : 0.0);
    }
  }
  return chroma;
}

}  // namespace cuepoint
