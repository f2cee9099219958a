#include "cuepoint/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "cuepoint/error.h"

namespace cuepoint {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRate = kAnalysisRate;

constexpr double kKickLevel = 0.8;
constexpr double kSnareLevel = 0.45;
constexpr double kHihatLevel = 0.25;
constexpr double kBassLevel = 0.35;
constexpr double kPadLevel = 0.2;  // per chord note
constexpr double kPadFadeS = 0.1;  // pad attack and release

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidScript, "invalid track script: " + what);
}

double midi_hz(int note) { return 440.0 * std::pow(2.0, (note - 69) / 12.0); }

// Uniform in [-1, 1) from the raw 64-bit engine output, which (unlike the
// standard distributions) is identical across library implementations.
class Noise {
 public:
  explicit Noise(std::uint64_t seed) : engine_(seed) {}
  double next() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

class OnePole {
 public:
  explicit OnePole(double cutoff_hz) : a_(std::exp(-kTwoPi * cutoff_hz / kRate)) {}
  double lowpass(double x) {
    y_ = (1.0 - a_) * x + a_ * y_;
    return y_;
  }
  double highpass(double x) { return x - lowpass(x); }

 private:
  double a_;
  double y_ = 0.0;
};

// Single-cycle band-limited sawtooth, harmonics kept below max_hz.
class Wavetable {
 public:
  static constexpr std::size_t kSize = 4096;

  Wavetable(double freq, double max_hz, int max_harmonics) : table_(kSize + 1, 0.0) {
    const int harmonics =
        std::max(1, std::min(max_harmonics, static_cast<int>(max_hz / freq)));
    for (std::size_t i = 0; i <= kSize; ++i) {
      const double phase = kTwoPi * static_cast<double>(i) / kSize;
      double acc = 0.0;
      for (int h = 1; h <= harmonics; ++h) acc += std::sin(h * phase) / h;
      table_[i] = acc * 2.0 / std::numbers::pi;
    }
  }

  double at(double cycles) const {
    const double pos = (cycles - std::floor(cycles)) * kSize;
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return table_[i] * (1.0 - f) + table_[i + 1] * f;
  }

 private:
  std::vector<double> table_;
};

std::vector<double> kick_hit() {
  std::vector<double> out(static_cast<std::size_t>(0.3 * kRate));
  double phase = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double freq = 48.0 + 110.0 * std::exp(-t / 0.025);
    phase += kTwoPi * freq / kRate;
    out[i] = kKickLevel * std::exp(-t / 0.12) * std::sin(phase);
  }
  return out;
}

std::vector<double> snare_hit(Noise& noise) {
  std::vector<double> out(static_cast<std::size_t>(0.2 * kRate));
  OnePole hp(300.0);
  OnePole lp(6000.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double body = lp.lowpass(hp.highpass(noise.next())) * std::exp(-t / 0.05);
    const double tone = 0.5 * std::sin(kTwoPi * 190.0 * t) * std::exp(-t / 0.04);
    out[i] = kSnareLevel * (body + tone);
  }
  return out;
}

std::vector<double> hihat_hit(Noise& noise) {
  std::vector<double> out(static_cast<std::size_t>(0.06 * kRate));
  OnePole hp1(7000.0);
  OnePole hp2(7000.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    out[i] = kHihatLevel * hp2.highpass(hp1.highpass(noise.next())) * std::exp(-t / 0.015);
  }
  return out;
}

void add_hit(std::vector<double>& out, long start, const std::vector<double>& hit) {
  const long n = std::min(static_cast<long>(hit.size()), static_cast<long>(out.size()) - start);
  for (long i = 0; i < n; ++i) out[start + i] += hit[i];
}

// Smoothstep fades at both ends, in samples.
double envelope(long i, long len, long attack, long release) {
  const auto smooth = [](double x) { return x * x * (3.0 - 2.0 * x); };
  if (i < attack) return smooth(static_cast<double>(i) / attack);
  if (i >= len - release) return smooth(std::max(0.0, static_cast<double>(len - i) / release));
  return 1.0;
}

const Wavetable& saw_table(double freq, double max_hz, int max_harmonics) {
  thread_local std::map<std::array<double, 3>, Wavetable> cache;
  const std::array<double, 3> key{freq, max_hz, static_cast<double>(max_harmonics)};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, Wavetable(freq, max_hz, max_harmonics)).first;
  return it->second;
}

// Held note with smooth power-complementary ramps: the attack rises over
// the first `ramp` samples and the release decays over `ramp` samples after
// `len`, so two notes crossfading at a boundary keep their summed power.
void add_pad_note(std::vector<double>& out, long start, long len, double freq, double level,
                  const Wavetable& table, long ramp) {
  const auto smooth = [](double x) { return x * x * (3.0 - 2.0 * x); };
  const long total = std::min(len + ramp, static_cast<long>(out.size()) - start);
  for (long i = 0; i < total; ++i) {
    double gain = 1.0;
    if (i < ramp) gain = std::sin(0.5 * std::numbers::pi * smooth(static_cast<double>(i) / ramp));
    if (i >= len) gain *= std::cos(0.5 * std::numbers::pi * smooth(static_cast<double>(i - len) / ramp));
    const long n = start + i;
    out[n] += level * gain * table.at(freq * static_cast<double>(n) / kRate);
  }
}

void add_note(std::vector<double>& out, long start, long len, double freq, double level,
              const Wavetable& table, long attack, long release) {
  for (long i = 0; i < len && start + i < static_cast<long>(out.size()); ++i) {
    const long n = start + i;
    // Phase from the absolute sample index keeps held notes continuous.
    const double cycles = freq * static_cast<double>(n) / kRate;
    out[n] += level * envelope(i, len, attack, release) * table.at(cycles);
  }
}

int bass_note(int root) { return 33 + (root - 9 + 12) % 12; }  // A1 .. G#2
int pad_note(int root) { return 57 + (root - 9 + 12) % 12; }   // A3 .. G#4

}  // namespace

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::kKick4: return "kick4";
    case Layer::kSnare24: return "snare24";
    case Layer::kHihat8: return "hihat8";
    case Layer::kBassLoop: return "bass_loop";
    case Layer::kPadChord: return "pad_chord";
  }
  return "?";
}

std::optional<Layer> layer_from_string(std::string_view name) {
  for (Layer l : {Layer::kKick4, Layer::kSnare24, Layer::kHihat8, Layer::kBassLoop,
                  Layer::kPadChord}) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

std::optional<int> pitch_class_from_string(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kSharps = {
      "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
  static constexpr std::array<std::string_view, 12> kFlats = {
      "C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B"};
  for (int i = 0; i < 12; ++i) {
    if (name == kSharps[i] || name == kFlats[i]) return i;
  }
  return std::nullopt;
}

bool Section::has(Layer layer) const {
  return std::find(layers.begin(), layers.end(), layer) != layers.end();
}

void TrackScript::validate() const {
  if (!(tempo_bpm >= kMinTempoBpm && tempo_bpm <= kMaxTempoBpm)) {
    invalid("tempo_bpm must be within [99, 198]");
  }
  if (bars < 1) invalid("bars must be positive");
  if (sections.empty()) invalid("at least one section is required");
  if (sections.front().start_bar != 0) invalid("the first section must start at bar 0");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const Section& s = sections[i];
    if (s.start_bar % 4 != 0) invalid("section starts must be multiples of 4 bars");
    if (s.start_bar >= bars) invalid("section starts beyond the last bar");
    if (i > 0 && s.start_bar <= sections[i - 1].start_bar) {
      invalid("section starts must be strictly increasing");
    }
    if (s.root < 0 || s.root > 11) invalid("root must be a pitch class 0-11");
    for (std::size_t a = 0; a < s.layers.size(); ++a) {
      for (std::size_t b = a + 1; b < s.layers.size(); ++b) {
        if (s.layers[a] == s.layers[b]) invalid("duplicate layer in a section");
      }
    }
  }
}

double bar_start_s(double tempo_bpm, int bar) { return bar * 4.0 * 60.0 / tempo_bpm; }

SynthTruth script_truth(const TrackScript& script) {
  script.validate();
  SynthTruth truth;
  truth.tempo_bpm = script.tempo_bpm;
  const double spb = 60.0 / script.tempo_bpm;
  const long n_samples = std::lround(script.bars * 4.0 * spb * kRate);
  truth.duration_s = static_cast<double>(n_samples) / kRate;
  truth.grid.source = GridSource::kExternal;
  truth.grid.tempo_bpm = script.tempo_bpm;
  truth.grid.downbeat_offset = 0;
  for (int k = 0; k < 4 * script.bars; ++k) truth.grid.beat_times.push_back(k * spb);
  for (std::size_t i = 0; i < script.sections.size(); ++i) {
    const Section& s = script.sections[i];
    const double t = bar_start_s(script.tempo_bpm, s.start_bar);
    if (i > 0) {
      truth.boundary_bars.push_back(s.start_bar);
      truth.boundaries_s.push_back(t);
    }
    if (!s.layers.empty()) truth.switch_points_s.push_back(t);
  }
  return truth;
}

RenderedTrack render(const TrackScript& script) {
  SynthTruth truth = script_truth(script);
  const double spb = 60.0 / script.tempo_bpm;
  const auto n_samples = static_cast<std::size_t>(std::lround(truth.duration_s * kRate));
  std::vector<double> mix(n_samples, 0.0);
  // One sample per drum, reused for every hit, as a drum machine would.
  Noise noise(script.seed);
  const std::vector<double> kick = kick_hit();
  const std::vector<double> snare = snare_hit(noise);
  const std::vector<double> hihat = hihat_hit(noise);

  auto sample_at = [&](double seconds) { return std::lround(seconds * kRate); };
  const long fade = static_cast<long>(0.005 * kRate);

  for (std::size_t si = 0; si < script.sections.size(); ++si) {
    const Section& sec = script.sections[si];
    const int end_bar = si + 1 < script.sections.size() ? script.sections[si + 1].start_bar
                                                        : script.bars;
    const int first_beat = sec.start_bar * 4;
    const int last_beat = end_bar * 4;  // exclusive
    const long sec_end = std::min(static_cast<long>(n_samples), sample_at(last_beat * spb));

    for (int beat = first_beat; beat < last_beat; ++beat) {
      const int in_bar = beat % 4;
      const long at = sample_at(beat * spb);
      if (sec.has(Layer::kKick4)) add_hit(mix, at, kick);
      if (sec.has(Layer::kSnare24) && (in_bar == 1 || in_bar == 3)) add_hit(mix, at, snare);
      if (sec.has(Layer::kHihat8)) {
        add_hit(mix, at, hihat);
        add_hit(mix, sample_at((beat + 0.5) * spb), hihat);
      }
      if (sec.has(Layer::kBassLoop)) {
        // Off-beat notes, root then octave, repeating every two beats.
        const int note = bass_note(sec.root) + (beat % 2 == 0 ? 0 : 12);
        const double freq = midi_hz(note);
        const long start = sample_at((beat + 0.5) * spb);
        const long stop = std::min(sec_end, sample_at((beat + 1.35) * spb));
        add_note(mix, start, stop - start, freq, kBassLevel, saw_table(freq, 4000.0, 20),
                 4 * fade, 4 * fade);
      }
    }
  }

  // Pad chords run across consecutive sections with the same root and
  // crossfade where the root changes.
  const long xfade = static_cast<long>(kPadFadeS * kRate);
  for (std::size_t si = 0; si < script.sections.size();) {
    const Section& sec = script.sections[si];
    std::size_t next = si + 1;
    if (!sec.has(Layer::kPadChord)) {
      si = next;
      continue;
    }
    while (next < script.sections.size() && script.sections[next].has(Layer::kPadChord) &&
           script.sections[next].root == sec.root) {
      ++next;
    }
    const int end_bar = next < script.sections.size() ? script.sections[next].start_bar
                                                      : script.bars;
    const long run_start = sample_at(sec.start_bar * 4 * spb);
    const long run_end = std::min(static_cast<long>(n_samples), sample_at(end_bar * 4 * spb));
    const int root = pad_note(sec.root);
    // Open major triad of pure tones (root, fifth an octave up, third two
    // octaves up). Harmonics of one root never beat, and the tones sit far
    // enough apart that the energy and its harmonic share do not depend on
    // the root.
    for (double ratio : {1.0, 3.0, 5.0}) {
      const double freq = midi_hz(root) * ratio;
      add_pad_note(mix, run_start, run_end - run_start, freq, kPadLevel,
                   saw_table(freq, 6000.0, 1), xfade);
    }
    si = next;
  }

  double peak = 0.0;
  for (double v : mix) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.95 ? 0.95 / peak : 1.0;
  std::vector<float> samples(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) samples[i] = static_cast<float>(mix[i] * gain);

  RenderedTrack track{AudioBuffer::from_mono(std::move(samples), kAnalysisRate, "synth"),
                      std::move(truth)};
  return track;
}

}  // namespace cuepoint
