#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuepoint/audio.h"
#include "cuepoint/beatgrid.h"

namespace cuepoint {

enum class Layer { kKick4, kSnare24, kHihat8, kBassLoop, kPadChord };

std::string_view to_string(Layer layer);
std::optional<Layer> layer_from_string(std::string_view name);

struct Section {
  int start_bar = 0;
  std::vector<Layer> layers;
  int root = 9;  // pitch class of bass and pad (C = 0), default A

  bool has(Layer layer) const;
};

/// A 4/4 loop arrangement. Sections start on multiples of four bars, the
/// first at bar 0, and run until the next section or the end.
struct TrackScript {
  double tempo_bpm = 128.0;
  int bars = 64;
  std::vector<Section> sections;
  std::uint64_t seed = 0;

  /// Throws kInvalidScript.
  void validate() const;
};

/// Parses "C", "C#", "Db", ... "B" into a pitch class.
std::optional<int> pitch_class_from_string(std::string_view name);

struct SynthTruth {
  double tempo_bpm = 0.0;
  double duration_s = 0.0;
  BeatGrid grid;                       // exact beats, downbeat at index 0
  std::vector<int> boundary_bars;      // starts of every section after the first
  std::vector<double> boundaries_s;
  std::vector<double> switch_points_s;  // starts of every non-empty section, incl. bar 0
};

struct RenderedTrack {
  AudioBuffer audio;
  SynthTruth truth;
};

double bar_start_s(double tempo_bpm, int bar);

/// Additive/subtractive synthesis at 44.1 kHz. Each drum is rendered once
/// (noise drawn from the seed) and repeated: pitch-dropping sine kick on
/// every beat, noise snare on beats 2 and 4, high-passed noise hi-hat on
/// eighths, band-limited sawtooth bass on the off-beats, band-limited pad
/// triad held through the section. Bit-identical for a fixed script.
RenderedTrack render(const TrackScript& script);

/// Truth depends only on tempo, bars and sections, never on the seed.
SynthTruth script_truth(const TrackScript& script);

}  // namespace cuepoint
