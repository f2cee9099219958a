#include "cuepoint/serialize.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>

#include "cuepoint/error.h"
#include "cuepoint/fileio.h"
#include "json.hpp"

namespace cuepoint {
namespace {

using Json = nlohmann::ordered_json;

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Json parse_text(std::string_view text, ErrorCode code, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(code, std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

// Reading helpers. Every failure is reported as Error(code, "<ctx>: ...").
class Reader {
 public:
  Reader(ErrorCode code, std::string context) : code_(code), context_(std::move(context)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(code_, context_ + ": " + msg);
  }

  void object(const Json& j, std::string_view where) const {
    if (!j.is_object()) fail(std::string(where) + " must be an object");
  }

  void keys(const Json& j, std::initializer_list<std::string_view> allowed,
            std::string_view where) const {
    object(j, where);
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail("unknown field '" + key + "' in " + std::string(where));
      }
    }
  }

  const Json& at(const Json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(std::string("'") + key + "' must be finite");
    return d;
  }

  long long integer(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) {
      return static_cast<std::uint64_t>(v.get<long long>());
    }
    fail(std::string("'") + key + "' must be a non-negative integer");
  }

  std::string string(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (!v.is_boolean()) fail(std::string("'") + key + "' must be a boolean");
    return v.get<bool>();
  }

  const Json& array(const Json& j, const char* key) const {
    const Json& v = at(j, key);
    if (!v.is_array()) fail(std::string("'") + key + "' must be an array");
    return v;
  }

  std::vector<double> numbers(const Json& j, const char* key) const {
    std::vector<double> out;
    for (const Json& v : array(j, key)) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        fail(std::string("'") + key + "' must hold finite numbers");
      }
      out.push_back(v.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> indices(const Json& j, const char* key) const {
    std::vector<std::size_t> out;
    for (const Json& v : array(j, key)) {
      if (!v.is_number_unsigned()) fail(std::string("'") + key + "' must hold indices");
      out.push_back(v.get<std::size_t>());
    }
    return out;
  }

  std::vector<std::string> strings(const Json& j, const char* key) const {
    std::vector<std::string> out;
    for (const Json& v : array(j, key)) {
      if (!v.is_string()) fail(std::string("'") + key + "' must hold strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  Feature feature(const std::string& name) const {
    const auto f = feature_from_string(name);
    if (!f) fail("unknown feature '" + name + "'");
    return *f;
  }

 private:
  ErrorCode code_;
  std::string context_;
};

Json rounded_times(std::span<const double> times) {
  Json out = Json::array();
  for (double t : times) out.push_back(round_ms(t));
  return out;
}

Json config_json(const PipelineConfig& c) {
  return Json{{"peak_threshold", c.peak_threshold},
              {"salience_threshold", c.salience_threshold},
              {"kernel_bars", c.kernel_bars},
              {"peak_window_bars", c.peak_window_bars},
              {"period_strong_beats", c.period_strong_beats},
              {"hit_window_s", c.hit_window_s},
              {"rules", format_rules(c.enabled_rules)}};
}

PipelineConfig read_config(const Json& j, const PipelineConfig& base, const Reader& r) {
  r.keys(j,
         {"peak_threshold", "salience_threshold", "kernel_bars", "peak_window_bars",
          "period_strong_beats", "hit_window_s", "rules"},
         "config");
  PipelineConfig c = base;
  auto int_field = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    const long long v = r.integer(j, key);
    if (v < -1000000 || v > 1000000) r.fail(std::string("'") + key + "' out of range");
    out = static_cast<int>(v);
  };
  if (j.contains("peak_threshold")) c.peak_threshold = r.number(j, "peak_threshold");
  if (j.contains("salience_threshold")) c.salience_threshold = r.number(j, "salience_threshold");
  int_field("kernel_bars", c.kernel_bars);
  int_field("peak_window_bars", c.peak_window_bars);
  int_field("period_strong_beats", c.period_strong_beats);
  if (j.contains("hit_window_s")) c.hit_window_s = r.number(j, "hit_window_s");
  if (j.contains("rules")) {
    try {
      c.enabled_rules = parse_rules(r.string(j, "rules"));
    } catch (const Error& e) {
      r.fail(e.what());
    }
  }
  return c;
}

template <typename E, std::size_t N>
E enum_from(const std::string& name, const std::array<E, N>& values, const Reader& r,
            std::string_view what) {
  for (E v : values) {
    if (to_string(v) == name) return v;
  }
  r.fail("unknown " + std::string(what) + " '" + name + "'");
}

constexpr std::array<Stage, 3> kStages = {Stage::kNovelty, Stage::kPeriod, Stage::kSalience};
constexpr std::array<GridSource, 2> kSources = {GridSource::kEstimated, GridSource::kExternal};

Json result_json(const AnalysisResult& res) {
  Json points = Json::array();
  for (const SwitchPoint& p : res.switch_points.points) {
    Json features = Json::array();
    for (Feature f : p.features) features.push_back(to_string(f));
    points.push_back(Json{{"index", p.index},
                          {"time_s", round_ms(p.time_s)},
                          {"stage", to_string(p.stage)},
                          {"features", std::move(features)}});
  }
  Json scores = Json::array();
  for (double s : res.period.scores) scores.push_back(round_to(s, 1e6));
  Json peaks = Json::object();
  for (const PeakSet& p : res.per_feature_peaks) peaks[std::string(to_string(p.feature))] = p.indices;

  return Json{
      {"switch_points", std::move(points)},
      {"counts",
       Json{{"novelty", res.novelty_candidates},
            {"period", res.period_candidates},
            {"final", res.switch_points.size()}}},
      {"period",
       Json{{"period", res.period.period},
            {"offset", res.period.offset},
            {"scores", std::move(scores)},
            {"all_zero", res.period.all_zero}}},
      {"grid",
       Json{{"tempo_bpm", round_ms(res.grid.tempo_bpm)},
            {"source", to_string(res.grid.source)},
            {"downbeat_offset", res.grid.downbeat_offset},
            {"n_beats", res.grid.n_beats},
            {"n_strong_beats", res.grid.n_strong_beats},
            {"first_beat_s", round_ms(res.grid.first_beat_s)},
            {"confidence", round_ms(res.grid.confidence)}}},
      {"per_feature_peaks", std::move(peaks)},
      {"strong_beat_times_s", rounded_times(res.strong_beat_times)},
      {"warnings", res.warnings},
      {"config", config_json(res.config)}};
}

AnalysisResult read_result(const Json& j, const Reader& r) {
  r.keys(j,
         {"switch_points", "counts", "period", "grid", "per_feature_peaks",
          "strong_beat_times_s", "warnings", "config"},
         "result");
  AnalysisResult res;
  for (const Json& p : r.array(j, "switch_points")) {
    r.keys(p, {"index", "time_s", "stage", "features"}, "switch point");
    SwitchPoint sp;
    sp.index = static_cast<std::size_t>(r.unsigned_integer(p, "index"));
    sp.time_s = r.number(p, "time_s");
    sp.stage = enum_from(r.string(p, "stage"), kStages, r, "stage");
    for (const std::string& name : r.strings(p, "features")) sp.features.push_back(r.feature(name));
    res.switch_points.points.push_back(std::move(sp));
  }
  const Json& counts = r.at(j, "counts");
  r.keys(counts, {"novelty", "period", "final"}, "counts");
  res.novelty_candidates = static_cast<std::size_t>(r.unsigned_integer(counts, "novelty"));
  res.period_candidates = static_cast<std::size_t>(r.unsigned_integer(counts, "period"));
  if (r.unsigned_integer(counts, "final") != res.switch_points.size()) {
    r.fail("counts.final disagrees with switch_points");
  }

  const Json& period = r.at(j, "period");
  r.keys(period, {"period", "offset", "scores", "all_zero"}, "period");
  res.period.period = static_cast<std::size_t>(r.unsigned_integer(period, "period"));
  res.period.offset = static_cast<std::size_t>(r.unsigned_integer(period, "offset"));
  res.period.scores = r.numbers(period, "scores");
  res.period.all_zero = r.boolean(period, "all_zero");

  const Json& grid = r.at(j, "grid");
  r.keys(grid,
         {"tempo_bpm", "source", "downbeat_offset", "n_beats", "n_strong_beats",
          "first_beat_s", "confidence"},
         "grid");
  res.grid.tempo_bpm = r.number(grid, "tempo_bpm");
  res.grid.source = enum_from(r.string(grid, "source"), kSources, r, "grid source");
  res.grid.downbeat_offset = static_cast<int>(r.integer(grid, "downbeat_offset"));
  res.grid.n_beats = static_cast<std::size_t>(r.unsigned_integer(grid, "n_beats"));
  res.grid.n_strong_beats = static_cast<std::size_t>(r.unsigned_integer(grid, "n_strong_beats"));
  res.grid.first_beat_s = r.number(grid, "first_beat_s");
  res.grid.confidence = r.number(grid, "confidence");

  const Json& peaks = r.at(j, "per_feature_peaks");
  r.object(peaks, "per_feature_peaks");
  for (const auto& [name, value] : peaks.items()) {
    PeakSet ps;
    ps.feature = r.feature(name);
    ps.indices = r.indices(peaks, name.c_str());
    res.per_feature_peaks.push_back(std::move(ps));
  }
  res.strong_beat_times = r.numbers(j, "strong_beat_times_s");
  res.warnings = r.strings(j, "warnings");
  const Json& config = r.at(j, "config");
  res.config = read_config(config, {}, r);
  return res;
}

AnnotationSet read_annotation(const Json& j, const Reader& r) {
  r.keys(j, {"track_id", "annotations_s", "region_end_s"}, "annotation set");
  AnnotationSet a;
  a.track_id = r.string(j, "track_id");
  a.times = r.numbers(j, "annotations_s");
  a.region_end = r.number(j, "region_end_s");
  a.validate();
  return a;
}

std::vector<std::filesystem::path> json_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

template <typename T, typename Fn>
std::vector<T> load_path(const std::filesystem::path& path, Fn parse) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such file or directory: " + path.string());
  }
  std::vector<T> out;
  if (std::filesystem::is_directory(path, ec)) {
    for (const auto& file : json_files(path)) {
      for (auto& item : parse(read_text_file(file), file.string())) out.push_back(std::move(item));
    }
  } else {
    out = parse(read_text_file(path), path.string());
  }
  return out;
}

std::string opt_str(const std::optional<double>& v, const char* spec) {
  return v ? fmt(spec, *v) : "undefined";
}

Json opt_json(const std::optional<double>& v) {
  return v ? Json(round_to(*v, 1e6)) : Json(nullptr);
}

}  // namespace

double round_ms(double seconds) { return round_to(seconds, 1e3); }

std::string to_json(const OutputDocument& doc) {
  Json j{{"schema_version", doc.schema_version},
         {"track",
          Json{{"track_id", doc.track.track_id},
               {"source", doc.track.source},
               {"duration_s", round_ms(doc.track.duration_s)},
               {"sample_rate", doc.track.sample_rate}}},
         {"result", result_json(doc.result)}};
  if (doc.with_timings) {
    Json timings = Json::object();
    for (const auto& [stage, ms] : doc.result.timings_ms) timings[stage] = round_to(ms, 1e3);
    j["timings_ms"] = std::move(timings);
  }
  return dump(j);
}

OutputDocument output_document_from_json(std::string_view text) {
  const Json j = parse_text(text, ErrorCode::kParseError, "analysis output");
  const Reader r(ErrorCode::kParseError, "analysis output");
  r.keys(j, {"schema_version", "track", "result", "timings_ms"}, "document");
  OutputDocument doc;
  doc.schema_version = r.string(j, "schema_version");
  if (doc.schema_version != kSchemaVersion) {
    r.fail("unsupported schema_version '" + doc.schema_version + "'");
  }
  const Json& track = r.at(j, "track");
  r.keys(track, {"track_id", "source", "duration_s", "sample_rate"}, "track");
  doc.track.track_id = r.string(track, "track_id");
  doc.track.source = r.string(track, "source");
  doc.track.duration_s = r.number(track, "duration_s");
  doc.track.sample_rate = static_cast<int>(r.integer(track, "sample_rate"));
  doc.result = read_result(r.at(j, "result"), r);
  doc.result.track_id = doc.track.track_id;
  if (j.contains("timings_ms")) {
    doc.with_timings = true;
    const Json& t = j["timings_ms"];
    r.object(t, "timings_ms");
    for (const auto& [stage, value] : t.items()) {
      doc.result.timings_ms[stage] = r.number(t, stage.c_str());
    }
  }
  return doc;
}

std::string to_csv(const OutputDocument& doc) {
  std::string out = "index,time_s,stage,features\n";
  for (const SwitchPoint& p : doc.result.switch_points.points) {
    std::string features;
    for (Feature f : p.features) {
      if (!features.empty()) features += ';';
      features += to_string(f);
    }
    out += std::to_string(p.index) + "," + fmt("%.3f", p.time_s) + "," +
           std::string(to_string(p.stage)) + "," + features + "\n";
  }
  return out;
}

std::string to_json(const PipelineConfig& config) { return dump(config_json(config)); }

PipelineConfig config_from_json(std::string_view text, const PipelineConfig& base) {
  const Json j = parse_text(text, ErrorCode::kInvalidConfig, "config");
  PipelineConfig c = read_config(j, base, Reader(ErrorCode::kInvalidConfig, "config"));
  c.validate();
  return c;
}

std::string to_json(const AnnotationSet& a) {
  return dump(Json{{"track_id", a.track_id},
                   {"annotations_s", rounded_times(a.times)},
                   {"region_end_s", round_ms(a.region_end)}});
}

std::vector<AnnotationSet> annotations_from_json(std::string_view text) {
  const Json j = parse_text(text, ErrorCode::kParseError, "annotations");
  const Reader r(ErrorCode::kParseError, "annotations");
  std::vector<AnnotationSet> out;
  if (j.is_array()) {
    for (const Json& item : j) out.push_back(read_annotation(item, r));
  } else {
    out.push_back(read_annotation(j, r));
  }
  return out;
}

std::vector<AnnotationSet> load_annotations(const std::filesystem::path& path) {
  return load_path<AnnotationSet>(path, [](const std::string& text, const std::string& file) {
    try {
      return annotations_from_json(text);
    } catch (const Error& e) {
      throw Error(e.code(), file + ": " + e.what());
    }
  });
}

std::vector<CandidateSet> candidates_from_json(std::string_view text) {
  const Json j = parse_text(text, ErrorCode::kParseError, "candidates");
  const Reader r(ErrorCode::kParseError, "candidates");
  auto one = [&](const Json& item) {
    r.object(item, "candidate set");
    CandidateSet c;
    if (item.contains("schema_version")) {
      const OutputDocument doc = output_document_from_json(item.dump());
      c.track_id = doc.track.track_id;
      c.times = doc.result.switch_points.times();
    } else {
      const AnnotationSet a = read_annotation(item, r);
      c.track_id = a.track_id;
      c.times = a.times;
    }
    return c;
  };
  std::vector<CandidateSet> out;
  if (j.is_array()) {
    for (const Json& item : j) out.push_back(one(item));
  } else {
    out.push_back(one(j));
  }
  return out;
}

std::vector<CandidateSet> load_candidates(const std::filesystem::path& path) {
  return load_path<CandidateSet>(path, [](const std::string& text, const std::string& file) {
    try {
      return candidates_from_json(text);
    } catch (const Error& e) {
      throw Error(e.code(), file + ": " + e.what());
    }
  });
}

std::string to_json(const TrackScript& script) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};
  Json sections = Json::array();
  for (const Section& s : script.sections) {
    Json layers = Json::array();
    for (Layer l : s.layers) layers.push_back(to_string(l));
    sections.push_back(Json{{"start_bar", s.start_bar},
                            {"layers", std::move(layers)},
                            {"root", kNames[static_cast<std::size_t>(s.root % 12)]}});
  }
  return dump(Json{{"tempo_bpm", script.tempo_bpm},
                   {"bars", script.bars},
                   {"seed", script.seed},
                   {"sections", std::move(sections)}});
}

TrackScript script_from_json(std::string_view text) {
  const Json j = parse_text(text, ErrorCode::kInvalidScript, "track script");
  const Reader r(ErrorCode::kInvalidScript, "track script");
  r.keys(j, {"tempo_bpm", "bars", "seed", "sections"}, "script");
  TrackScript s;
  s.tempo_bpm = r.number(j, "tempo_bpm");
  const long long bars = r.integer(j, "bars");
  if (bars < 1 || bars > 100000) r.fail("'bars' out of range");
  s.bars = static_cast<int>(bars);
  if (j.contains("seed")) s.seed = r.unsigned_integer(j, "seed");
  for (const Json& item : r.array(j, "sections")) {
    r.keys(item, {"start_bar", "layers", "root"}, "section");
    Section sec;
    const long long start = r.integer(item, "start_bar");
    if (start < 0 || start > 100000) r.fail("'start_bar' out of range");
    sec.start_bar = static_cast<int>(start);
    for (const std::string& name : r.strings(item, "layers")) {
      const auto layer = layer_from_string(name);
      if (!layer) r.fail("unknown layer '" + name + "'");
      sec.layers.push_back(*layer);
    }
    if (item.contains("root")) {
      const std::string root = r.string(item, "root");
      const auto pc = pitch_class_from_string(root);
      if (!pc) r.fail("unknown root '" + root + "'");
      sec.root = *pc;
    }
    s.sections.push_back(std::move(sec));
  }
  s.validate();
  return s;
}

std::string to_json(const SynthTruth& truth) {
  Json beats = Json::array();
  for (double t : truth.grid.beat_times) beats.push_back(round_to(t, 1e6));
  return dump(Json{{"tempo_bpm", truth.tempo_bpm},
                   {"duration_s", round_to(truth.duration_s, 1e6)},
                   {"downbeat_offset", truth.grid.downbeat_offset},
                   {"beats_s", std::move(beats)},
                   {"boundary_bars", truth.boundary_bars},
                   {"boundaries_s", rounded_times(truth.boundaries_s)},
                   {"switch_points_s", rounded_times(truth.switch_points_s)}});
}

std::string report_json(std::span<const EvalReport> reports) {
  Json methods = Json::array();
  for (const EvalReport& rep : reports) {
    Json tracks = Json::array();
    for (const TrackScore& s : rep.per_track) {
      tracks.push_back(Json{{"track_id", s.track_id},
                            {"candidates", s.candidates},
                            {"evaluated", s.evaluated},
                            {"annotations", s.annotations},
                            {"hits", s.hits},
                            {"false_positives", s.false_positives},
                            {"misses", s.misses},
                            {"precision", opt_json(s.precision)},
                            {"recall", opt_json(s.recall)}});
    }
    methods.push_back(Json{
        {"method", rep.method},
        {"window_s", rep.window_s},
        {"aggregate",
         Json{{"tracks", rep.per_track.size()},
              {"hits", rep.hits},
              {"false_positives", rep.false_positives},
              {"misses", rep.misses},
              {"precision", opt_json(rep.precision)},
              {"recall", opt_json(rep.recall)},
              {"candidate_count",
               Json{{"mean", round_to(rep.candidate_count.mean, 1e6)},
                    {"std", round_to(rep.candidate_count.std, 1e6)},
                    {"min", rep.candidate_count.min},
                    {"max", rep.candidate_count.max}}}}},
        {"per_track", std::move(tracks)},
        {"skipped", rep.skipped}});
  }
  return dump(Json{{"methods", std::move(methods)}});
}

std::string report_table(std::span<const EvalReport> reports) {
  std::string out;
  char line[256];
  for (const EvalReport& rep : reports) {
    out += "method: " + (rep.method.empty() ? std::string("candidates") : rep.method) +
           "  window: " + fmt("%.3f", rep.window_s) + " s\n";
    std::snprintf(line, sizeof line, "%-32s %6s %5s %5s %5s %5s %9s %9s\n", "track", "cand",
                  "ann", "hits", "fp", "miss", "precision", "recall");
    out += line;
    for (const TrackScore& s : rep.per_track) {
      std::snprintf(line, sizeof line, "%-32s %6zu %5zu %5zu %5zu %5zu %9s %9s\n",
                    s.track_id.c_str(), s.candidates, s.annotations, s.hits, s.false_positives,
                    s.misses, opt_str(s.precision, "%.3f").c_str(),
                    opt_str(s.recall, "%.3f").c_str());
      out += line;
    }
    std::snprintf(line, sizeof line, "%-32s %6s %5s %5zu %5zu %5zu %9s %9s\n", "TOTAL", "", "",
                  rep.hits, rep.false_positives, rep.misses,
                  opt_str(rep.precision, "%.3f").c_str(), opt_str(rep.recall, "%.3f").c_str());
    out += line;
    std::snprintf(line, sizeof line,
                  "candidates per track: mean %.2f, std %.2f, min %zu, max %zu\n",
                  rep.candidate_count.mean, rep.candidate_count.std, rep.candidate_count.min,
                  rep.candidate_count.max);
    out += line;
    for (const std::string& id : rep.skipped) out += "skipped (no annotations): " + id + "\n";
    out += "\n";
  }
  return out;
}

std::string report_csv(std::span<const EvalReport> reports) {
  std::string out =
      "method,track_id,candidates,evaluated,annotations,hits,false_positives,misses,precision,"
      "recall\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt("%.6f", *v) : "undefined"; };
  for (const EvalReport& rep : reports) {
    std::size_t cand = 0, eval = 0, ann = 0;
    for (const TrackScore& s : rep.per_track) {
      out += rep.method + "," + s.track_id + "," + std::to_string(s.candidates) + "," +
             std::to_string(s.evaluated) + "," + std::to_string(s.annotations) + "," +
             std::to_string(s.hits) + "," + std::to_string(s.false_positives) + "," +
             std::to_string(s.misses) + "," + cell(s.precision) + "," + cell(s.recall) + "\n";
      cand += s.candidates;
      eval += s.evaluated;
      ann += s.annotations;
    }
    out += rep.method + ",ALL," + std::to_string(cand) + "," + std::to_string(eval) + "," +
           std::to_string(ann) + "," + std::to_string(rep.hits) + "," +
           std::to_string(rep.false_positives) + "," + std::to_string(rep.misses) + "," +
           cell(rep.precision) + "," + cell(rep.recall) + "\n";
  }
  return out;
}

}  // namespace cuepoint
