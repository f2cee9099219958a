#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cuepoint/audio.h"
#include "cuepoint/dsp.h"

namespace cuepoint {

inline constexpr double kMinTempoBpm = 99.0;
inline constexpr double kMaxTempoBpm = 198.0;

enum class GridSource { kEstimated, kExternal };

std::string_view to_string(GridSource source);

struct BeatGrid {
  std::vector<double> beat_times;  // seconds, strictly increasing
  int beats_per_bar = 4;
  int downbeat_offset = 0;  // index in [0, 3] of the first beat 1
  double tempo_bpm = 0.0;
  GridSource source = GridSource::kEstimated;
  double confidence = 1.0;  // comb phase contrast for estimated grids
};

/// Beats 1 and 3 of every bar.
struct StrongBeatGrid {
  static constexpr int kPerBar = 2;
  std::vector<double> times;
  std::vector<std::size_t> beat_indices;
  std::vector<int> bar_index;  // -1 for a beat 3 preceding the first downbeat

  std::size_t size() const noexcept { return times.size(); }
};

/// Minimum phase contrast of the beat comb (best phase against the average
/// phase); below it the estimator reports NoPulse.
inline constexpr double kPulseConfidenceFloor = 0.3;

/// Constant-tempo grid estimator. A coarse tempo comes from the
/// autocorrelation of a log-spectral-flux envelope within [99, 198] bpm;
/// period and phase are then refined by a comb search over the whole track
/// and a least-squares fit to envelope peaks. The bar phase is taken from
/// kick-band strength against snare-band strength (mod 2) and kick strength
/// at beat 1 (mod 4).
/// Throws kBufferTooShort (< 10 s) or kNoPulse.
BeatGrid estimate_beats(const AudioBuffer& buffer);
BeatGrid estimate_beats(const AudioBuffer& buffer, const Spectrogram& stft_spec);

/// One beat per line, "time_s<whitespace>position" with position in 1..4.
/// Blank lines and lines starting with '#' are skipped. Beats outside
/// [0, duration) of the buffer are dropped.
BeatGrid load_beats(const std::filesystem::path& path, const AudioBuffer& buffer);
BeatGrid parse_beats(std::string_view text, double duration_s);

std::string format_beats_tsv(const BeatGrid& grid);

/// Throws kTooFewBeats for fewer than 8 beats.
StrongBeatGrid strong_beats(const BeatGrid& grid);

}  // namespace cuepoint
