#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cuepoint/audio.h"
#include "cuepoint/matrix.h"

namespace cuepoint {

inline constexpr int kStftWindow = 2048;
inline constexpr int kHop = 512;

inline constexpr int kCqtBins = 84;
inline constexpr int kBinsPerOctave = 12;
inline constexpr double kCqtMinHz = 32.703195662574829;   // C1
inline constexpr double kChromaMinHz = 27.5;              // A0

enum class SpectrogramKind { kStft, kCqt, kChroma };

/// Non-negative magnitudes, stored frame-major. Frame t is centred on sample
/// t * hop + center_offset.
struct Spectrogram {
  SpectrogramKind kind = SpectrogramKind::kStft;
  Matrix<float> frames;  // [n_frames x n_bins]
  std::vector<double> bin_frequencies;
  int hop = kHop;
  int window = 0;  // STFT window length; 0 for constant-Q kinds
  double center_offset = 0.0;
  int sample_rate = kAnalysisRate;

  std::size_t n_bins() const noexcept { return frames.cols(); }
  std::size_t n_frames() const noexcept { return frames.rows(); }
  float operator()(std::size_t bin, std::size_t frame) const {
    return frames(frame, bin);
  }
  double frame_time(std::size_t frame) const {
    return (static_cast<double>(frame) * hop + center_offset) / sample_rate;
  }
};

/// Hann-windowed magnitude STFT without centring: frame t covers
/// [t*hop, t*hop + window). Magnitudes are divided by the window sum, so a
/// full-scale sinusoid of amplitude A reads about A/2 at its bin.
Spectrogram stft(const AudioBuffer& buffer, int window = kStftWindow,
                 int hop = kHop);

/// Periodic Hann window of the given length.
std::vector<double> hann_window(int length);

/// 84-bin constant-Q magnitude from C1, 12 bins/octave, hop 512, centred
/// frames. Computed octave by octave on successively decimated signals.
Spectrogram cqt(const AudioBuffer& buffer);

/// General constant-Q with a configurable lowest frequency.
Spectrogram constant_q(const AudioBuffer& buffer, double fmin, int n_bins,
                       int bins_per_octave = kBinsPerOctave, int hop = kHop);

/// Length in samples of the longest constant-Q kernel starting at fmin.
std::size_t longest_cq_kernel(double fmin, int bins_per_octave = kBinsPerOctave);

/// 12-bin chroma, index 0 = C. Seven octaves of constant-Q from A0 folded to
/// pitch classes; each frame max-normalized when it carries energy.
Spectrogram pcp(const AudioBuffer& buffer);

/// Pitch-class label ("C", "C#", ... "B") for a chroma bin.
std::string_view pitch_class_name(std::size_t chroma_bin);

struct HpssPair {
  Spectrogram harmonic;
  Spectrogram percussive;
};

inline constexpr int kHpssKernel = 17;

/// Median-filter HPSS with soft masks (power 2). Harmonic emphasises the
/// time-direction median, percussive the frequency-direction median. Where
/// both medians vanish the magnitude is split evenly, so harmonic +
/// percussive always reconstructs the input.
HpssPair hpss(const Spectrogram& spec, int kernel = kHpssKernel, double power = 2.0);

/// 1-D running median with reflected edges (length odd).
std::vector<float> median_filter(const std::vector<float>& x, int length);

enum class DrumBand { kKick, kSnare, kHihat };

std::string_view to_string(DrumBand band);

struct BandRange {
  double low_hz;
  double high_hz;
};

/// kick 20-150 Hz, snare 150-2500 Hz, hihat 5-16 kHz.
BandRange band_range(DrumBand band);

struct OnsetCurve {
  DrumBand band = DrumBand::kKick;
  std::vector<double> values;        // per frame, >= 0
  std::vector<std::size_t> onsets;   // sorted frame indices
  std::vector<double> onset_times;   // seconds, frame centres
};

inline constexpr double kMinOnsetGapS = 0.030;

/// Flux below this (about -60 dB of a full-scale band) is never an onset, so
/// leakage into an otherwise silent band stays silent.
inline constexpr double kMinOnsetFlux = 1e-3;

/// An onset must be the largest flux within this distance either side, so
/// the tail of one hit cannot count as a second hit.
inline constexpr double kOnsetMaxWindowS = 0.050;

/// Half-wave-rectified spectral flux over the band's bins; onsets are maxima
/// within kOnsetMaxWindowS above (running mean + 0.1 * max) and
/// kMinOnsetFlux, at least 30 ms apart.
OnsetCurve band_onsets(const Spectrogram& spec, DrumBand band);

/// Rectified flux summed over bins in [low_hz, high_hz]; the frame before the
/// first counts as silence.
std::vector<double> band_flux(const Spectrogram& spec, BandRange range);

/// Peak picking used by band_onsets, exposed for reuse and testing.
std::vector<std::size_t> pick_onsets(const std::vector<double>& curve,
                                     double frames_per_second);

}  // namespace cuepoint
