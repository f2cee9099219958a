#include "cuepoint/cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cuepoint/error.h"
#include "cuepoint/fileio.h"
#include "cuepoint/serialize.h"

namespace cuepoint::cli {
namespace {

namespace fs = std::filesystem;

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  std::string beats;
  std::string config;
  std::string rules;
  std::string dump_dir;
  std::string out = "-";
  std::string format = "json";
  int jobs = 1;
  bool timings = false;
};

struct EvaluateOptions {
  std::vector<std::string> candidates;
  std::string annotations;
  double window = kHitWindowS;
  std::string report = "table";
  std::string out = "-";
  std::string csv;
};

struct SynthOptions {
  std::string script;
  std::string out;
  std::string truth;
  std::string beats_out;
  std::string annotations_out;
  std::string wav_format = "float32";
};

// Outcome of one unit of work; messages are printed by the caller so that
// parallel runs report in input order.
struct Outcome {
  int code = kExitOk;
  std::vector<std::string> messages;
  std::string stdout_text;
};

int exit_code_for(const Error& e) { return is_input_error(e.code()) ? kExitInput : kExitAnalysis; }

template <typename Fn>
Outcome guarded(Fn&& fn) {
  Outcome o;
  try {
    fn(o);
  } catch (const Error& e) {
    o.code = exit_code_for(e);
    o.messages.push_back(std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    o.code = kExitAnalysis;
    o.messages.push_back(std::string("error: ") + e.what());
  }
  return o;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "cannot create directory " + dir.string());
  }
}

void dump_trace(const fs::path& dir, const AnalysisResult& result, const PipelineTrace& trace) {
  ensure_dir(dir);
  for (const FeatureSeries& s : trace.features) {
    std::string csv = "row,time_s";
    for (std::size_t d = 0; d < s.dim(); ++d) csv += ",v" + std::to_string(d);
    csv += "\n";
    for (std::size_t r = 0; r < s.rows(); ++r) {
      csv += std::to_string(r) + "," + num(s.times[r]);
      for (std::size_t d = 0; d < s.dim(); ++d) csv += "," + num(s.values(r, d));
      csv += "\n";
    }
    write_file_atomic(dir / (std::string(to_string(s.name)) + ".csv"), csv);
  }

  const std::set<std::size_t> chosen = [&] {
    const auto idx = result.switch_points.indices();
    return std::set<std::size_t>(idx.begin(), idx.end());
  }();
  std::string csv = "index,time_s";
  for (const NoveltyCurve& c : trace.novelty) csv += "," + std::string(to_string(c.feature));
  csv += ",switch_point\n";
  const std::size_t n = trace.novelty.empty() ? 0 : trace.novelty.front().values.size();
  for (std::size_t t = 0; t < n; ++t) {
    csv += std::to_string(t) + "," +
           num(t < result.strong_beat_times.size() ? result.strong_beat_times[t] : 0.0);
    for (const NoveltyCurve& c : trace.novelty) {
      // Undefined (outside the valid range) cells are left empty.
      csv += ",";
      if (t >= c.valid_from && t < c.valid_to) csv += num(c.values[t]);
    }
    csv += chosen.count(t) != 0 ? ",1\n" : ",0\n";
  }
  write_file_atomic(dir / "novelty.csv", csv);
}

fs::path beats_for(const AnalyzeOptions& opts, const fs::path& input) {
  const fs::path beats(opts.beats);
  if (!fs::is_directory(beats)) return beats;
  for (const char* ext : {".tsv", ".txt", ".beats"}) {
    const fs::path candidate = beats / (input.stem().string() + ext);
    if (fs::exists(candidate)) return candidate;
  }
  throw Error(ErrorCode::kFileNotFound,
              "no beat file for " + input.string() + " in " + beats.string());
}

Outcome analyze_one(const AnalyzeOptions& opts, const PipelineConfig& config,
                    const std::string& input, const fs::path& out_path) {
  return guarded([&](Outcome& o) {
    const fs::path path(input);
    std::map<std::string, double> timings;
    auto t0 = std::chrono::steady_clock::now();
    const AudioBuffer buffer = load_audio(path);
    timings["decode"] = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    FrameFeatures frames = extract_frame_features(buffer);
    timings["features"] = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    const BeatGrid grid =
        opts.beats.empty() ? estimate_beats(buffer, frames.stft) : load_beats(beats_for(opts, path), buffer);
    timings["beats"] = elapsed_ms(t0);

    PipelineTrace trace;
    const bool dump = !opts.dump_dir.empty();
    AnalysisResult result = get_switch_points(frames, grid, config, dump ? &trace : nullptr);
    result.track_id = path.stem().string();
    for (const auto& [k, v] : timings) result.timings_ms[k] += v;

    OutputDocument doc;
    doc.track = TrackInfo{result.track_id, input, buffer.duration_s(), buffer.sample_rate()};
    doc.result = std::move(result);
    doc.with_timings = opts.timings;
    const std::string text = opts.format == "csv" ? to_csv(doc) : to_json(doc);

    if (dump) dump_trace(fs::path(opts.dump_dir) / doc.track.track_id, doc.result, trace);
    for (const std::string& w : doc.result.warnings) {
      o.messages.push_back("warning: " + doc.track.track_id + ": " + w);
    }
    if (out_path.empty()) {
      o.stdout_text = text;
    } else {
      write_file_atomic(out_path, text);
    }
  });
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  const Outcome setup = guarded([&](Outcome&) {
    if (opts.jobs < 1) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
  });
  if (setup.code != kExitOk) {
    err << setup.messages.front() << "\n";
    return setup.code;
  }

  PipelineConfig config;
  std::vector<fs::path> outputs(opts.inputs.size());
  const Outcome prep = guarded([&](Outcome&) {
    if (!opts.config.empty()) config = config_from_json(read_text_file(opts.config));
    if (!opts.rules.empty()) config.enabled_rules = parse_rules(opts.rules);
    config.validate();
    if (!opts.beats.empty() && opts.inputs.size() > 1 && !fs::is_directory(opts.beats)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--beats must be a directory when analyzing several inputs");
    }
    const std::string ext = opts.format == "csv" ? ".csv" : ".json";
    const bool to_dir = opts.inputs.size() > 1 || (opts.out != "-" && fs::is_directory(opts.out));
    if (to_dir) {
      if (opts.out == "-") {
        throw Error(ErrorCode::kInvalidArgument, "several inputs need --out <directory>");
      }
      ensure_dir(opts.out);
      std::set<std::string> stems;
      for (std::size_t i = 0; i < opts.inputs.size(); ++i) {
        const std::string stem = fs::path(opts.inputs[i]).stem().string();
        if (!stems.insert(stem).second) {
          throw Error(ErrorCode::kInvalidArgument, "duplicate track id '" + stem + "'");
        }
        outputs[i] = fs::path(opts.out) / (stem + ext);
      }
    } else if (opts.out != "-") {
      outputs[0] = opts.out;
    }
  });
  if (prep.code != kExitOk) {
    err << prep.messages.front() << "\n";
    return prep.code;
  }

  std::vector<Outcome> outcomes(opts.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < opts.inputs.size(); i = next++) {
      outcomes[i] = analyze_one(opts, config, opts.inputs[i], outputs[i]);
    }
  };
  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), opts.inputs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int code = kExitOk;
  for (const Outcome& o : outcomes) {
    out << o.stdout_text;
    for (const std::string& m : o.messages) err << m << "\n";
    code = std::max(code, o.code);
  }
  return code;
}

std::pair<std::string, std::string> method_and_path(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0 && arg.find('/') > eq && !fs::exists(arg)) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  fs::path p(arg);
  while (p.has_parent_path() && p.filename().empty()) p = p.parent_path();
  return {p.stem().string(), arg};
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  const Outcome o = guarded([&](Outcome& self) {
    if (!(opts.window >= 0.0) || !std::isfinite(opts.window)) {
      throw Error(ErrorCode::kInvalidArgument, "--window must be >= 0");
    }
    const std::vector<AnnotationSet> annotations = load_annotations(opts.annotations);
    std::vector<EvalReport> reports;
    std::set<std::string> names;
    for (const std::string& arg : opts.candidates) {
      auto [method, path] = method_and_path(arg);
      if (!names.insert(method).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate method name '" + method + "'");
      }
      const std::vector<CandidateSet> candidates = load_candidates(path);
      reports.push_back(evaluate_corpus(candidates, annotations, opts.window, method));
      for (const std::string& id : reports.back().skipped) {
        self.messages.push_back("warning: " + method + ": no annotations for track '" + id +
                                "', skipped");
      }
    }
    std::string text;
    if (opts.report == "json") {
      text = report_json(reports);
    } else if (opts.report == "csv") {
      text = report_csv(reports);
    } else {
      text = report_table(reports);
    }
    if (opts.out == "-") {
      self.stdout_text = text;
    } else {
      write_file_atomic(opts.out, text);
    }
    if (!opts.csv.empty()) write_file_atomic(opts.csv, report_csv(reports));
  });
  out << o.stdout_text;
  for (const std::string& m : o.messages) err << m << "\n";
  return o.code;
}

int cmd_synth(const SynthOptions& opts, std::ostream& err) {
  const Outcome o = guarded([&](Outcome&) {
    const TrackScript script = script_from_json(read_text_file(opts.script));
    const RenderedTrack track = render(script);
    const auto format =
        opts.wav_format == "pcm16" ? WavSampleFormat::kPcm16 : WavSampleFormat::kFloat32;
    write_wav(opts.out, track.audio.samples(), track.audio.sample_rate(), format);
    write_file_atomic(opts.truth, to_json(track.truth));
    if (!opts.beats_out.empty()) {
      write_file_atomic(opts.beats_out, format_beats_tsv(track.truth.grid));
    }
    if (!opts.annotations_out.empty()) {
      AnnotationSet a;
      a.track_id = fs::path(opts.out).stem().string();
      a.times = track.truth.switch_points_s;
      a.region_end = track.truth.duration_s;
      write_file_atomic(opts.annotations_out, to_json(a));
    }
  });
  for (const std::string& m : o.messages) err << m << "\n";
  return o.code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Switch-point (cue-point) detection for electronic dance music"};
  app.name("cuepoint");
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  CLI::App* a = app.add_subcommand("analyze", "Detect switch points in audio tracks");
  a->add_option("inputs", analyze.inputs, "WAV file(s)")->required();
  a->add_option("--beats", analyze.beats,
                "Beat grid TSV (time, position 1-4), or a directory of <track>.tsv");
  a->add_option("--config", analyze.config, "JSON file overriding pipeline defaults");
  a->add_option("--rules", analyze.rules, "Enabled rules: novelty[,period[,salience]]");
  a->add_option("--dump-features", analyze.dump_dir,
                "Write per-feature and novelty CSV files under this directory");
  a->add_option("--out", analyze.out, "Output file or directory ('-' for stdout)");
  a->add_option("--format", analyze.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  a->add_option("--jobs,-j", analyze.jobs, "Tracks analyzed in parallel");
  a->add_flag("--timings", analyze.timings, "Include per-stage wall time in the output");

  EvaluateOptions evaluate;
  CLI::App* e = app.add_subcommand("evaluate", "Score candidates against annotations");
  e->add_option("--candidates", evaluate.candidates,
                "Candidate file or directory, optionally NAME=PATH; repeat per method")
      ->required();
  e->add_option("--annotations", evaluate.annotations, "Annotation file or directory")
      ->required();
  e->add_option("--window", evaluate.window, "Hit window in seconds (each side)");
  e->add_option("--report", evaluate.report, "Report format")
      ->check(CLI::IsMember({"json", "table", "csv"}));
  e->add_option("--out", evaluate.out, "Report file ('-' for stdout)");
  e->add_option("--csv", evaluate.csv, "Also write the CSV report to this file");

  SynthOptions synth;
  CLI::App* s = app.add_subcommand("synth", "Render a synthetic track from a script");
  s->add_option("--script", synth.script, "Track script JSON")->required();
  s->add_option("--out", synth.out, "Output WAV")->required();
  s->add_option("--truth", synth.truth, "Ground-truth JSON")->required();
  s->add_option("--beats-out", synth.beats_out, "Also write the beat grid as TSV");
  s->add_option("--annotations-out", synth.annotations_out,
                "Also write the switch points as an annotation file");
  s->add_option("--wav-format", synth.wav_format, "Sample format")
      ->check(CLI::IsMember({"float32", "pcm16"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    std::ostringstream msg;
    const int code = app.exit(ex, out, msg);
    if (code == 0) return kExitOk;
    std::string line = msg.str();
    while (!line.empty() && line.back() == '\n') line.pop_back();
    err << "error: " << line << "\n";
    return kExitInput;
  }

  if (a->parsed()) return cmd_analyze(analyze, out, err);
  if (e->parsed()) return cmd_evaluate(evaluate, out, err);
  return cmd_synth(synth, err);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cuepoint::cli
