#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "cuepoint/audio.h"
#include "cuepoint/cli.h"
#include "cuepoint/fileio.h"
#include "cuepoint/serialize.h"
#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"

using namespace cuepoint;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const char* kScript = R"({
  "tempo_bpm": 126,
  "bars": 32,
  "seed": 4,
  "sections": [
    {"start_bar": 0, "layers": ["kick4", "hihat8", "pad_chord"], "root": "A"},
    {"start_bar": 16, "layers": ["kick4", "snare24", "hihat8", "bass_loop", "pad_chord"], "root": "D"}
  ]
})";

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

// kScript rendered through the CLI into a scratch directory.
struct Corpus {
  fixtures::TempDir dir{"cli"};
  std::filesystem::path script = dir / "script.json";
  std::filesystem::path wav = dir / "track.wav";
  std::filesystem::path truth = dir / "truth.json";
  std::filesystem::path beats = dir / "track.tsv";
  std::filesystem::path ann = dir / "ann.json";

  Corpus() {
    write(script, kScript);
    const Run r = cli_run({"synth", "--script", script.string(), "--out", wav.string(),
                           "--truth", truth.string(), "--beats-out", beats.string(),
                           "--annotations-out", ann.string()});
    REQUIRE(r.code == cli::kExitOk);
  }
};

}  // namespace

TEST_CASE("synth writes audio, truth, beats and annotations") {
  Corpus c;
  const AudioBuffer audio = load_audio(c.wav);
  const double expected = 32 * 4 * 60.0 / 126.0 * kAnalysisRate;
  CHECK(std::abs(static_cast<double>(audio.samples().size()) - expected) <= 1.0);

  const Json truth = Json::parse(read_text_file(c.truth));
  CHECK(truth["boundary_bars"] == Json::array({16}));
  const auto ann = load_annotations(c.ann);
  REQUIRE(ann.size() == 1);
  CHECK(ann[0].track_id == "track");
  CHECK(ann[0].times.size() == 2);
  CHECK(read_text_file(c.beats).find('\t') != std::string::npos);

  // The seed only drives the noise in drum hits; the truth does not depend on it.
  std::string other = kScript;
  other.replace(other.find("\"seed\": 4"), 9, "\"seed\": 5");
  write(c.dir / "other.json", other);
  REQUIRE(cli_run({"synth", "--script", (c.dir / "other.json").string(), "--out",
                   (c.dir / "other.wav").string(), "--truth", (c.dir / "other_truth.json").string()})
              .code == 0);
  CHECK(read_text_file(c.dir / "other_truth.json") == read_text_file(c.truth));
  CHECK(read_binary_file(c.dir / "other.wav") != read_binary_file(c.wav));

  REQUIRE(cli_run({"synth", "--script", c.script.string(), "--out", (c.dir / "pcm.wav").string(),
                   "--truth", (c.dir / "t2.json").string(), "--wav-format", "pcm16"})
              .code == 0);
  CHECK(load_audio(c.dir / "pcm.wav").samples().size() == audio.samples().size());
}

TEST_CASE("every subcommand is byte-deterministic") {
  Corpus c;
  const Run again = cli_run({"synth", "--script", c.script.string(), "--out",
                             (c.dir / "again.wav").string(), "--truth",
                             (c.dir / "again.json").string()});
  REQUIRE(again.code == 0);
  CHECK(read_binary_file(c.dir / "again.wav") == read_binary_file(c.wav));
  CHECK(read_text_file(c.dir / "again.json") == read_text_file(c.truth));

  for (const std::vector<std::string>& extra :
       {std::vector<std::string>{}, {"--beats", c.beats.string()}, {"--format", "csv"}}) {
    std::vector<std::string> args = {"analyze", c.wav.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const Run a = cli_run(args);
    const Run b = cli_run(args);
    REQUIRE(a.code == 0);
    CHECK_FALSE(a.out.empty());
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }

  const Run a = cli_run({"analyze", c.wav.string(), "--beats", c.beats.string(), "--out",
                         (c.dir / "cand.json").string()});
  REQUIRE(a.code == 0);
  for (const char* report : {"table", "json", "csv"}) {
    std::vector<std::string> args = {"evaluate", "--candidates", (c.dir / "cand.json").string(),
                                     "--annotations", c.ann.string(), "--report", report};
    const Run x = cli_run(args);
    const Run y = cli_run(args);
    REQUIRE(x.code == 0);
    CHECK(x.out == y.out);
  }
}

TEST_CASE("synth, analyze and evaluate chain together") {
  Corpus c;
  const Run a = cli_run({"analyze", c.wav.string(), "--beats", c.beats.string()});
  REQUIRE(a.code == 0);
  const OutputDocument doc = output_document_from_json(a.out);
  CHECK(doc.track.track_id == "track");
  CHECK(doc.result.grid.source == GridSource::kExternal);
  CHECK(doc.result.switch_points.size() >= 1);
  write(c.dir / "track.json", a.out);

  const Run e = cli_run({"evaluate", "--candidates", "full=" + (c.dir / "track.json").string(),
                         "--annotations", c.ann.string(), "--report", "json"});
  REQUIRE(e.code == 0);
  const Json rep = Json::parse(e.out);
  CHECK(rep["methods"][0]["method"] == "full");
  CHECK(rep["methods"][0]["aggregate"]["recall"] == 1.0);

  // Annotations scored against themselves.
  const Run self = cli_run({"evaluate", "--candidates", c.ann.string(), "--annotations",
                            c.ann.string(), "--report", "json"});
  REQUIRE(self.code == 0);
  const Json s = Json::parse(self.out)["methods"][0]["aggregate"];
  CHECK(s["precision"] == 1.0);
  CHECK(s["recall"] == 1.0);

  // A zero window still matches exact times.
  const Run zero = cli_run({"evaluate", "--candidates", c.ann.string(), "--annotations",
                            c.ann.string(), "--window", "0", "--report", "json"});
  REQUIRE(zero.code == 0);
  CHECK(Json::parse(zero.out)["methods"][0]["aggregate"]["recall"] == 1.0);

  // Fewer rules can only add candidates.
  const Run nov = cli_run({"analyze", c.wav.string(), "--beats", c.beats.string(), "--rules",
                           "novelty"});
  REQUIRE(nov.code == 0);
  const auto loose = output_document_from_json(nov.out).result.switch_points.indices();
  const std::set<std::size_t> loose_set(loose.begin(), loose.end());
  for (std::size_t i : doc.result.switch_points.indices()) CHECK(loose_set.count(i) == 1);

  // Timings are opt-in.
  CHECK(a.out.find("timings_ms") == std::string::npos);
  const Run timed = cli_run({"analyze", c.wav.string(), "--beats", c.beats.string(), "--timings"});
  REQUIRE(timed.code == 0);
  CHECK(timed.out.find("timings_ms") != std::string::npos);

  // Several inputs go to a directory, one file per track.
  std::filesystem::copy_file(c.wav, c.dir / "second.wav");
  std::filesystem::create_directories(c.dir / "beats");
  std::filesystem::copy_file(c.beats, c.dir / "beats" / "track.tsv");
  std::filesystem::copy_file(c.beats, c.dir / "beats" / "second.tsv");
  const Run many = cli_run({"analyze", c.wav.string(), (c.dir / "second.wav").string(), "--beats",
                            (c.dir / "beats").string(), "--out", (c.dir / "outs").string(),
                            "--jobs", "2"});
  REQUIRE(many.code == 0);
  const auto first = output_document_from_json(read_text_file(c.dir / "outs" / "track.json"));
  const auto second = output_document_from_json(read_text_file(c.dir / "outs" / "second.json"));
  CHECK(second.track.track_id == "second");
  CHECK(first.result.switch_points.points == second.result.switch_points.points);
  CHECK(first.result.switch_points.points == doc.result.switch_points.points);
}

TEST_CASE("input errors exit with code 2 and name the problem") {
  Corpus c;
  const std::string missing = (c.dir / "nope.wav").string();
  const Run m = cli_run({"analyze", missing});
  CHECK(m.code == cli::kExitInput);
  CHECK(m.err.find("nope.wav") != std::string::npos);

  write(c.dir / "bad_script.json", R"({"tempo_bpm": 128, "bars": 8, "sections": [)");
  const Run bad_script = cli_run({"synth", "--script", (c.dir / "bad_script.json").string(),
                                  "--out", (c.dir / "x.wav").string(), "--truth",
                                  (c.dir / "x.json").string()});
  CHECK(bad_script.code == cli::kExitInput);
  CHECK(bad_script.err.rfind("error: ", 0) == 0);

  write(c.dir / "other_ann.json", to_json(AnnotationSet{"someone_else", {1.0}, 10.0}));
  const Run overlap = cli_run({"evaluate", "--candidates", c.ann.string(), "--annotations",
                               (c.dir / "other_ann.json").string()});
  CHECK(overlap.code == cli::kExitInput);

  CHECK(cli_run({"analyze", c.wav.string(), "--rules", "period"}).code == cli::kExitInput);
  CHECK(cli_run({"analyze", c.wav.string(), "--format", "xml"}).code == cli::kExitInput);
  CHECK(cli_run({"evaluate", "--candidates", c.ann.string(), "--annotations", c.ann.string(),
                 "--window", "-1"})
            .code == cli::kExitInput);
  CHECK(cli_run({"frobnicate"}).code == cli::kExitInput);
  CHECK(cli_run({}).code == cli::kExitInput);

  write(c.dir / "bad_config.json", R"({"kernel_bars": 3})");
  CHECK(cli_run({"analyze", c.wav.string(), "--config", (c.dir / "bad_config.json").string()})
            .code == cli::kExitInput);

  write(c.dir / "garbage.wav", "RIFF not really");
  CHECK(cli_run({"analyze", (c.dir / "garbage.wav").string()}).code == cli::kExitInput);

  const Run help = cli_run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("analyze") != std::string::npos);
}

TEST_CASE("analysis errors exit with code 3") {
  fixtures::TempDir dir("cli_short");
  // Two seconds of clicks: decodes fine but is far too short to analyze.
  const auto x = fixtures::clicks({0.0, 0.5, 1.0, 1.5}, 2.0);
  write_wav(dir / "short.wav", x, kAnalysisRate);
  const Run r = cli_run({"analyze", (dir / "short.wav").string()});
  CHECK(r.code == cli::kExitAnalysis);
  CHECK_FALSE(r.err.empty());
}
