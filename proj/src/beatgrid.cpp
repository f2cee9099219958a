#include "cuepoint/beatgrid.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cuepoint/error.h"
#include "cuepoint/fileio.h"

namespace cuepoint {
namespace {

constexpr double kMinDurationS = 10.0;
constexpr double kLogGain = 1000.0;
constexpr double kPhaseStep = 0.25;    // frames
constexpr double kPeriodStep = 0.005;  // frames
constexpr double kPeriodSpan = 1.0;    // frames either side of the ACF lag
constexpr double kRefineTolerance = 0.1;  // fraction of a period
constexpr int kRefinePasses = 3;

std::vector<double> log_flux_envelope(const Spectrogram& spec) {
  std::vector<double> env(spec.n_frames(), 0.0);
  std::vector<double> prev(spec.n_bins());
  std::vector<double> cur(spec.n_bins());
  for (std::size_t k = 0; k < spec.n_bins(); ++k) {
    prev[k] = std::log1p(kLogGain * spec.frames(0, k));
  }
  for (std::size_t t = 1; t < spec.n_frames(); ++t) {
    const auto row = spec.frames.row(t);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      cur[k] = std::log1p(kLogGain * row[k]);
      acc += std::max(0.0, cur[k] - prev[k]);
    }
    env[t] = acc;
    std::swap(cur, prev);
  }
  return env;
}

double interp(const std::vector<double>& x, double pos) {
  if (pos < 0.0 || pos > static_cast<double>(x.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  if (i + 1 >= x.size()) return x[i];
  return x[i] * (1.0 - f) + x[i + 1] * f;
}

double comb_sum(const std::vector<double>& x, double phase, double period) {
  double acc = 0.0;
  for (double pos = phase; pos < static_cast<double>(x.size()); pos += period) {
    acc += interp(x, pos);
  }
  return acc;
}

// Normalized autocorrelation of a zero-mean signal for lags [0, max_lag].
std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
  std::vector<double> acf(max_lag + 1, 0.0);
  const std::size_t n = x.size();
  for (std::size_t lag = 0; lag <= max_lag && lag < n; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += x[t] * x[t + lag];
    acf[lag] = acc;
  }
  const double zero = acf[0];
  if (zero > 0.0) {
    for (double& v : acf) v /= zero;
  }
  return acf;
}

struct Peak {
  double pos;    // sub-frame position
  double value;
};

std::vector<Peak> envelope_peaks(const std::vector<double>& env) {
  std::vector<Peak> peaks;
  if (env.size() < 3) return peaks;
  const double mean = std::accumulate(env.begin(), env.end(), 0.0) / env.size();
  for (std::size_t t = 1; t + 1 < env.size(); ++t) {
    if (env[t] > env[t - 1] && env[t] >= env[t + 1] && env[t] > mean) {
      const double a = env[t - 1];
      const double b = env[t];
      const double c = env[t + 1];
      const double denom = a - 2.0 * b + c;
      const double offset = denom != 0.0 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
      peaks.push_back({static_cast<double>(t) + offset, b});
    }
  }
  return peaks;
}

// Weighted least-squares refinement of (phase, period) against nearby
// envelope peaks. Returns false if too few beats could be matched.
bool refine_grid(const std::vector<Peak>& peaks, double n_frames, double& phase,
                 double& period, double tolerance) {
  double sw = 0, sk = 0, st = 0, skk = 0, skt = 0;
  int matched = 0;
  auto it = peaks.begin();
  const long k_max = static_cast<long>((n_frames - phase) / period);
  for (long k = 0; k <= k_max; ++k) {
    const double predicted = phase + k * period;
    const double lo = predicted - tolerance * period;
    const double hi = predicted + tolerance * period;
    while (it != peaks.end() && it->pos < lo) ++it;
    const Peak* best = nullptr;
    for (auto j = it; j != peaks.end() && j->pos <= hi; ++j) {
      if (best == nullptr || j->value > best->value) best = &*j;
    }
    if (best == nullptr) continue;
    const double w = best->value;
    const auto kd = static_cast<double>(k);
    sw += w;
    sk += w * kd;
    st += w * best->pos;
    skk += w * kd * kd;
    skt += w * kd * best->pos;
    ++matched;
  }
  if (matched < 8) return false;
  const double denom = sw * skk - sk * sk;
  if (denom <= 0.0) return false;
  const double new_period = (sw * skt - sk * st) / denom;
  const double new_phase = (st - new_period * sk) / sw;
  if (!(new_period > 0.0)) return false;
  period = new_period;
  phase = new_phase;
  return true;
}

}  // namespace

std::string_view to_string(GridSource source) {
  return source == GridSource::kEstimated ? "estimated" : "external";
}

BeatGrid estimate_beats(const AudioBuffer& buffer) {
  if (buffer.duration_s() < kMinDurationS) {
    throw Error(ErrorCode::kBufferTooShort,
                "beat estimation needs at least 10 s of audio");
  }
  return estimate_beats(buffer, stft(buffer));
}

BeatGrid estimate_beats(const AudioBuffer& buffer, const Spectrogram& spec) {
  if (buffer.duration_s() < kMinDurationS) {
    throw Error(ErrorCode::kBufferTooShort,
                "beat estimation needs at least 10 s of audio");
  }
  const double fps = static_cast<double>(spec.sample_rate) / spec.hop;
  std::vector<double> env = log_flux_envelope(spec);
  const double mean = std::accumulate(env.begin(), env.end(), 0.0) / env.size();
  std::vector<double> centred(env.size());
  std::transform(env.begin(), env.end(), centred.begin(),
                 [mean](double v) { return v - mean; });

  const double lag_lo = 60.0 * fps / kMaxTempoBpm;
  const double lag_hi = 60.0 * fps / kMinTempoBpm;
  const auto first_lag = static_cast<std::size_t>(std::floor(lag_lo));
  const auto last_lag = static_cast<std::size_t>(std::ceil(lag_hi));
  const auto acf = autocorrelation(centred, 2 * last_lag + 2);

  // Score each lag with its second multiple so that a half-beat lag (hi-hat
  // eighths) loses against the beat lag.
  auto score = [&](std::size_t lag) { return acf[lag] + 0.5 * acf[2 * lag]; };
  std::size_t best = first_lag;
  for (std::size_t lag = first_lag; lag <= last_lag; ++lag) {
    if (score(lag) > score(best)) best = lag;
  }
  double period = static_cast<double>(best);
  if (best > first_lag && best < last_lag) {
    const double a = score(best - 1);
    const double b = score(best);
    const double c = score(best + 1);
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) period += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  period = std::clamp(period, lag_lo, lag_hi);

  // Fine search: the period and phase whose comb collects the most envelope
  // mass over the whole track. A small period error accumulates over
  // hundreds of beats and smears the comb, so this pins the tempo down far
  // better than the autocorrelation peak.
  double phase = 0.0;
  double best_comb = -1.0;
  double best_mean = 0.0;
  const double p0 = period;
  for (double pe = std::max(lag_lo, p0 - kPeriodSpan); pe <= std::min(lag_hi, p0 + kPeriodSpan);
       pe += kPeriodStep) {
    double sum = 0.0;
    int count = 0;
    double top = -1.0;
    double top_phase = 0.0;
    for (double ph = 0.0; ph < pe; ph += kPhaseStep) {
      const double acc = comb_sum(env, ph, pe);
      sum += acc;
      ++count;
      if (acc > top) {
        top = acc;
        top_phase = ph;
      }
    }
    if (top > best_comb) {
      best_comb = top;
      best_mean = sum / count;
      phase = top_phase;
      period = pe;
    }
  }

  // Pulse confidence: how much more mass the best phase collects than an
  // average phase. Near 0 for noise, near 1 for a steady beat.
  const double confidence = best_comb > 0.0 ? 1.0 - best_mean / best_comb : 0.0;
  if (!(confidence >= kPulseConfidenceFloor)) {
    throw Error(ErrorCode::kNoPulse, "no periodic pulse found in the 99-198 bpm range");
  }

  // The comb cannot tell beats from off-beats (bass and hi-hat often sit on
  // the latter); the kick band can.
  const auto kick = band_flux(spec, band_range(DrumBand::kKick));
  const double half = phase + 0.5 * period;
  if (comb_sum(kick, half, period) > comb_sum(kick, phase, period)) phase = half;

  const auto peaks = envelope_peaks(env);
  const double n_frames = static_cast<double>(env.size());
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    double ph = phase;
    double pe = period;
    if (!refine_grid(peaks, n_frames, ph, pe, kRefineTolerance)) break;
    if (std::abs(pe - period) > kPeriodStep) break;
    phase = ph;
    period = pe;
  }
  while (phase >= period) phase -= period;
  while (phase < 0.0) phase += period;

  BeatGrid grid;
  grid.source = GridSource::kEstimated;
  grid.confidence = confidence;
  grid.tempo_bpm = 60.0 * fps / period;
  const double duration = buffer.duration_s();
  for (long k = -1;; ++k) {
    const double frame = phase + static_cast<double>(k) * period;
    const double t = spec.frame_time(0) + frame / fps;
    if (t >= duration) break;
    // A beat a fraction of a frame before zero is the track's first beat.
    if (t >= -1.0 / fps) grid.beat_times.push_back(std::max(0.0, t));
  }
  if (grid.beat_times.size() < 2) {
    throw Error(ErrorCode::kNoPulse, "estimated grid has fewer than two beats");
  }

  // Bar phase. Parity: kick-heavy, snare-light beats are beats 1 and 3.
  const auto snare = band_flux(spec, band_range(DrumBand::kSnare));
  const std::size_t nb = grid.beat_times.size();
  std::vector<double> k_at(nb);
  std::vector<double> s_at(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double frame = (grid.beat_times[b] - spec.frame_time(0)) * fps;
    const long centre = std::lround(frame);
    double km = 0.0;
    double sm = 0.0;
    for (long f = centre - 2; f <= centre + 2; ++f) {
      if (f < 0 || f >= static_cast<long>(kick.size())) continue;
      km = std::max(km, kick[f]);
      sm = std::max(sm, snare[f]);
    }
    k_at[b] = km;
    s_at[b] = sm;
  }
  const double k_mean = std::accumulate(k_at.begin(), k_at.end(), 0.0) / nb;
  const double s_mean = std::accumulate(s_at.begin(), s_at.end(), 0.0) / nb;
  double parity_score[2] = {0.0, 0.0};
  for (std::size_t b = 0; b < nb; ++b) {
    const double kn = k_mean > 0.0 ? k_at[b] / k_mean : 0.0;
    const double sn = s_mean > 0.0 ? s_at[b] / s_mean : 0.0;
    parity_score[b % 2] += kn - sn;
  }
  const int parity = parity_score[1] > parity_score[0] ? 1 : 0;
  double beat_one[2] = {0.0, 0.0};
  for (std::size_t b = 0; b < nb; ++b) {
    if (static_cast<int>(b % 4) == parity) beat_one[0] += k_at[b];
    if (static_cast<int>(b % 4) == parity + 2) beat_one[1] += k_at[b];
  }
  grid.downbeat_offset = beat_one[1] > beat_one[0] ? parity + 2 : parity;
  return grid;
}

BeatGrid parse_beats(std::string_view text, double duration_s) {
  struct Line {
    double time;
    int position;
  };
  std::vector<Line> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::istringstream in(line);
    std::string time_tok;
    std::string pos_tok;
    std::string extra;
    in >> time_tok >> pos_tok;
    const bool has_extra = static_cast<bool>(in >> extra);
    double time = 0.0;
    int position = 0;
    const auto* tb = time_tok.data();
    const auto* te = tb + time_tok.size();
    const auto tr = std::from_chars(tb, te, time);
    const auto* pb = pos_tok.data();
    const auto* pe = pb + pos_tok.size();
    const auto pr = std::from_chars(pb, pe, position);
    if (time_tok.empty() || pos_tok.empty() || has_extra || tr.ec != std::errc() ||
        tr.ptr != te || pr.ec != std::errc() || pr.ptr != pe || !std::isfinite(time) ||
        position < 1 || position > 4) {
      throw Error(ErrorCode::kParseError,
                  "beat file line " + std::to_string(line_no) +
                      ": expected \"time_s<TAB>position(1-4)\", got \"" + line + "\"");
    }
    if (!lines.empty() && time <= lines.back().time) {
      throw Error(ErrorCode::kNonMonotonic,
                  "beat file line " + std::to_string(line_no) +
                      ": time " + time_tok + " does not increase");
    }
    lines.push_back({time, position});
    if (end == text.size()) break;
  }

  BeatGrid grid;
  grid.source = GridSource::kExternal;
  std::vector<int> positions;
  for (const auto& l : lines) {
    if (l.time < 0.0 || l.time >= duration_s) continue;
    grid.beat_times.push_back(l.time);
    positions.push_back(l.position);
  }
  if (!positions.empty()) {
    const auto it = std::find(positions.begin(), positions.end(), 1);
    const long first_one = it != positions.end()
                               ? static_cast<long>(it - positions.begin())
                               : (5 - positions.front()) % 4;
    grid.downbeat_offset = static_cast<int>(first_one % 4);
  }
  if (grid.beat_times.size() >= 2) {
    std::vector<double> ibi(grid.beat_times.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.beat_times.size(); ++i) {
      ibi[i] = grid.beat_times[i + 1] - grid.beat_times[i];
    }
    std::nth_element(ibi.begin(), ibi.begin() + ibi.size() / 2, ibi.end());
    grid.tempo_bpm = 60.0 / ibi[ibi.size() / 2];
  }
  return grid;
}

BeatGrid load_beats(const std::filesystem::path& path, const AudioBuffer& buffer) {
  return parse_beats(read_text_file(path), buffer.duration_s());
}

std::string format_beats_tsv(const BeatGrid& grid) {
  std::string out;
  char line[64];
  for (std::size_t i = 0; i < grid.beat_times.size(); ++i) {
    const long rel = static_cast<long>(i) - grid.downbeat_offset;
    const int position = static_cast<int>(((rel % 4) + 4) % 4) + 1;
    std::snprintf(line, sizeof line, "%.6f\t%d\n", grid.beat_times[i], position);
    out += line;
  }
  return out;
}

StrongBeatGrid strong_beats(const BeatGrid& grid) {
  if (grid.beat_times.size() < 8) {
    throw Error(ErrorCode::kTooFewBeats,
                "need at least 8 beats, got " + std::to_string(grid.beat_times.size()));
  }
  StrongBeatGrid strong;
  for (std::size_t i = 0; i < grid.beat_times.size(); ++i) {
    const long rel = static_cast<long>(i) - grid.downbeat_offset;
    const long in_bar = ((rel % 4) + 4) % 4;
    if (in_bar == 0 || in_bar == 2) {
      strong.times.push_back(grid.beat_times[i]);
      strong.beat_indices.push_back(i);
      const long bar = rel >= 0 ? rel / 4 : -((-rel + 3) / 4);
      strong.bar_index.push_back(static_cast<int>(bar));
    }
  }
  return strong;
}

}  // namespace cuepoint
