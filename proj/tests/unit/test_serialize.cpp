#include <fstream>
#include <optional>
#include <string>

#include "cuepoint/error.h"
#include "cuepoint/serialize.h"
#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"

using namespace cuepoint;
using Json = nlohmann::ordered_json;

namespace {

OutputDocument sample_document() {
  OutputDocument doc;
  doc.track = TrackInfo{"track_a", "in/track_a.wav", 123.4567, 22050};
  AnalysisResult& r = doc.result;
  for (int i = 0; i < 40; ++i) r.strong_beat_times.push_back(0.1234567 + 0.9375 * i);
  r.switch_points.points = {
      SwitchPoint{8, r.strong_beat_times[8], {Feature::kKick, Feature::kCqt}, Stage::kSalience},
      SwitchPoint{24, r.strong_beat_times[24], {Feature::kPcp}, Stage::kSalience}};
  r.novelty_candidates = 5;
  r.period_candidates = 3;
  r.period.offset = 0;
  r.period.scores = {0.5, 0.1234564321, 0, 0, 0, 0, 0, 0.25};
  r.grid = GridSummary{128.0004, GridSource::kEstimated, 1, 160, 40, 0.1234567, 0.8765};
  for (Feature f : kAllFeatures) r.per_feature_peaks.push_back(PeakSet{f, {}});
  r.per_feature_peaks[0].indices = {8, 30};
  r.per_feature_peaks[6].indices = {24};
  r.warnings = {"low beat confidence"};
  r.config.peak_threshold = 0.25;
  r.timings_ms = {{"features", 12.3456}, {"novelty", 1.5}};
  return doc;
}

template <typename Fn>
std::optional<ErrorCode> code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("round_ms") {
  CHECK(round_ms(1.23449) == 1.234);
  CHECK(round_ms(1.2345001) == 1.235);
  CHECK(round_ms(0.0) == 0.0);
}

TEST_CASE("output document round trip") {
  const OutputDocument doc = sample_document();
  const std::string text = to_json(doc);
  const OutputDocument back = output_document_from_json(text);
  CHECK(back.schema_version == kSchemaVersion);
  CHECK(back.track.track_id == "track_a");
  CHECK(back.track.source == "in/track_a.wav");
  CHECK(back.track.duration_s == 123.457);
  CHECK(back.track.sample_rate == 22050);
  CHECK(back.result.track_id == "track_a");
  REQUIRE(back.result.switch_points.size() == 2);
  CHECK(back.result.switch_points.points[0].index == 8);
  CHECK(back.result.switch_points.points[0].time_s == round_ms(doc.result.strong_beat_times[8]));
  CHECK(back.result.switch_points.points[0].features ==
        std::vector<Feature>{Feature::kKick, Feature::kCqt});
  CHECK(back.result.switch_points.points[1].stage == Stage::kSalience);
  CHECK(back.result.novelty_candidates == 5);
  CHECK(back.result.period_candidates == 3);
  CHECK(back.result.period.scores[1] == 0.123456);
  CHECK(back.result.grid.source == GridSource::kEstimated);
  CHECK(back.result.grid.downbeat_offset == 1);
  CHECK(back.result.grid.n_strong_beats == 40);
  CHECK(back.result.grid.first_beat_s == 0.123);
  REQUIRE(back.result.per_feature_peaks.size() == 7);
  CHECK(back.result.per_feature_peaks[0].indices == std::vector<std::size_t>{8, 30});
  CHECK(back.result.per_feature_peaks[6].feature == Feature::kPcp);
  CHECK(back.result.strong_beat_times.size() == 40);
  CHECK(back.result.strong_beat_times[0] == 0.123);
  CHECK(back.result.warnings == doc.result.warnings);
  CHECK(back.result.config == doc.result.config);
  CHECK_FALSE(back.with_timings);
  CHECK(back.result.timings_ms.empty());
  CHECK(text.find("timings_ms") == std::string::npos);

  // Rounded output is a fixed point.
  CHECK(to_json(back) == text);
}

TEST_CASE("timings are written only on request") {
  OutputDocument doc = sample_document();
  doc.with_timings = true;
  const OutputDocument back = output_document_from_json(to_json(doc));
  CHECK(back.with_timings);
  CHECK(back.result.timings_ms.at("features") == 12.346);
  CHECK(back.result.timings_ms.at("novelty") == 1.5);
}

TEST_CASE("output readers reject unknown fields and other schemas") {
  Json j = Json::parse(to_json(sample_document()));
  {
    Json bad = j;
    bad["extra"] = 1;
    CHECK(code_of([&] { output_document_from_json(bad.dump()); }) == ErrorCode::kParseError);
  }
  {
    Json bad = j;
    bad["result"]["grid"]["phase"] = 0;
    CHECK(code_of([&] { output_document_from_json(bad.dump()); }) == ErrorCode::kParseError);
  }
  {
    Json bad = j;
    bad["result"]["switch_points"][0]["features"][0] = "tempo";
    CHECK(code_of([&] { output_document_from_json(bad.dump()); }) == ErrorCode::kParseError);
  }
  {
    Json bad = j;
    bad["result"]["counts"]["final"] = 7;
    CHECK(code_of([&] { output_document_from_json(bad.dump()); }) == ErrorCode::kParseError);
  }
  {
    Json bad = j;
    bad["schema_version"] = "2.0";
    CHECK(code_of([&] { output_document_from_json(bad.dump()); }) == ErrorCode::kParseError);
  }
  CHECK(code_of([] { output_document_from_json("{not json"); }) == ErrorCode::kParseError);
}

TEST_CASE("csv output") {
  const OutputDocument doc = sample_document();
  const std::string expected =
      "index,time_s,stage,features\n"
      "8,7.623,salience,kick;cqt\n"
      "24,22.623,salience,pcp\n";
  CHECK(to_csv(doc) == expected);
  OutputDocument empty = doc;
  empty.result.switch_points.points.clear();
  CHECK(to_csv(empty) == "index,time_s,stage,features\n");
}

TEST_CASE("config overrides") {
  PipelineConfig base;
  base.kernel_bars = 16;
  const PipelineConfig c =
      config_from_json(R"({"peak_threshold": 0.5, "rules": "novelty,salience"})", base);
  CHECK(c.peak_threshold == 0.5);
  CHECK(c.kernel_bars == 16);
  CHECK(c.enabled_rules == RuleSet{true, false, true});
  CHECK(config_from_json(to_json(c)) == c);

  for (const char* bad : {R"({"peak_thresh": 0.5})", R"({"kernel_bars": 7})",
                          R"({"kernel_bars": 8.5})", R"({"rules": "period"})",
                          R"({"hit_window_s": "wide"})", "[1, 2]", "{"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { config_from_json(bad); }) == ErrorCode::kInvalidConfig);
  }
}

TEST_CASE("annotations as an object, an array, or a directory") {
  const AnnotationSet a{"a", {0.0, 30.0, 60.0}, 90.0};
  const AnnotationSet b{"b", {15.5}, 20.0};
  const auto one = annotations_from_json(to_json(a));
  REQUIRE(one.size() == 1);
  CHECK(one[0].track_id == "a");
  CHECK(one[0].times == a.times);
  CHECK(one[0].region_end == 90.0);

  const auto both = annotations_from_json(
      R"([{"track_id": "a", "annotations_s": [1, 2], "region_end_s": 3},
          {"track_id": "b", "annotations_s": [], "region_end_s": 0}])");
  REQUIRE(both.size() == 2);
  CHECK(both[1].track_id == "b");
  CHECK(both[1].times.empty());

  CHECK(code_of([] {
          annotations_from_json(R"({"track_id": "a", "annotations_s": [2, 1], "region_end_s": 3})");
        }) == ErrorCode::kParseError);
  CHECK(code_of([] {
          annotations_from_json(R"({"track_id": "a", "annotations_s": [5], "region_end_s": 3})");
        }) == ErrorCode::kParseError);
  CHECK(code_of([] {
          annotations_from_json(
              R"({"track_id": "a", "annotations_s": [], "region_end_s": 3, "bpm": 1})");
        }) == ErrorCode::kParseError);

  fixtures::TempDir dir("ann");
  write(dir / "2.json", to_json(a));
  write(dir / "1.json", to_json(b));
  write(dir / "notes.txt", "ignored");
  const auto loaded = load_annotations(dir.path());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].track_id == "b");
  CHECK(loaded[1].track_id == "a");
  CHECK(load_annotations(dir / "2.json").size() == 1);

  try {
    load_annotations(dir / "missing.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFileNotFound);
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  write(dir / "3.json", "{broken");
  try {
    load_annotations(dir.path());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("3.json") != std::string::npos);
  }
}

TEST_CASE("candidates from analysis output or annotation-shaped objects") {
  const OutputDocument doc = sample_document();
  const auto from_doc = candidates_from_json(to_json(doc));
  REQUIRE(from_doc.size() == 1);
  CHECK(from_doc[0].track_id == "track_a");
  CHECK(from_doc[0].times == std::vector<double>{7.623, 22.623});

  const auto from_ann = candidates_from_json(to_json(AnnotationSet{"x", {1.0, 2.0}, 5.0}));
  REQUIRE(from_ann.size() == 1);
  CHECK(from_ann[0].track_id == "x");
  CHECK(from_ann[0].times == std::vector<double>{1.0, 2.0});

  const std::string mixed =
      "[" + to_json(doc) + "," + to_json(AnnotationSet{"y", {3.0}, 5.0}) + "]";
  const auto both = candidates_from_json(mixed);
  REQUIRE(both.size() == 2);
  CHECK(both[1].track_id == "y");

  fixtures::TempDir dir("cand");
  write(dir / "b.json", to_json(doc));
  write(dir / "a.json", to_json(AnnotationSet{"x", {1.0}, 5.0}));
  const auto loaded = load_candidates(dir.path());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].track_id == "x");
  CHECK(loaded[1].track_id == "track_a");
  CHECK(code_of([] { candidates_from_json("42"); }) == ErrorCode::kParseError);
}

TEST_CASE("track scripts") {
  TrackScript s;
  s.tempo_bpm = 124.0;
  s.bars = 32;
  s.seed = 99;
  s.sections = {Section{0, {Layer::kKick4, Layer::kPadChord}, 9},
                Section{16, {Layer::kBassLoop}, 1}};
  const std::string text = to_json(s);
  CHECK(text.find("\"A\"") != std::string::npos);
  CHECK(text.find("\"C#\"") != std::string::npos);
  const TrackScript back = script_from_json(text);
  CHECK(back.tempo_bpm == 124.0);
  CHECK(back.bars == 32);
  CHECK(back.seed == 99);
  REQUIRE(back.sections.size() == 2);
  CHECK(back.sections[0].layers == s.sections[0].layers);
  CHECK(back.sections[1].root == 1);
  CHECK(to_json(back) == text);

  const TrackScript defaults =
      script_from_json(R"({"tempo_bpm": 128, "bars": 8, "sections": [{"start_bar": 0, "layers": []}]})");
  CHECK(defaults.seed == 0);
  CHECK(defaults.sections[0].root == 9);

  for (const char* bad :
       {R"({"tempo_bpm": 128, "bars": 8, "sections": [{"start_bar": 0, "layers": ["cowbell"]}]})",
        R"({"tempo_bpm": 128, "bars": 8, "sections": [{"start_bar": 0, "layers": [], "root": "H"}]})",
        R"({"tempo_bpm": 128, "bars": 8, "sections": [{"start_bar": 2, "layers": []}]})",
        R"({"tempo_bpm": 128, "bars": 8, "sections": [], "key": "A"})",
        R"({"tempo_bpm": 128, "bars": 0, "sections": [{"start_bar": 0, "layers": []}]})",
        R"({"tempo_bpm": 128, "bars": 8)"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { script_from_json(bad); }) == ErrorCode::kInvalidScript);
  }
}

TEST_CASE("synth truth json") {
  const RenderedTrack r = [] {
    TrackScript s;
    s.bars = 8;
    s.sections = {Section{0, {Layer::kKick4}, 9}, Section{4, {Layer::kHihat8}, 9}};
    return render(s);
  }();
  const Json j = Json::parse(to_json(r.truth));
  CHECK(j["tempo_bpm"] == 128.0);
  CHECK(j["boundary_bars"] == Json::array({4}));
  CHECK(j["switch_points_s"].size() == 2);
  CHECK(j["beats_s"].size() == r.truth.grid.beat_times.size());
  CHECK(j["boundaries_s"][0].get<double>() == round_ms(4 * 4 * 60.0 / 128.0));
}

TEST_CASE("reports") {
  EvalReport rep;
  rep.method = "full";
  TrackScore s1{"a", 3, 3, 2, 2, 1, 0, 2.0 / 3.0, 1.0};
  TrackScore s2{"b", 0, 0, 1, 0, 0, 1, std::nullopt, 0.0};
  rep.per_track = {s1, s2};
  rep.hits = 2;
  rep.false_positives = 1;
  rep.misses = 1;
  rep.precision = 2.0 / 3.0;
  rep.recall = 2.0 / 3.0;
  rep.candidate_count = CountStats{1.5, 1.5, 0, 3};
  rep.skipped = {"c"};
  const std::vector<EvalReport> reps = {rep};

  const Json j = Json::parse(report_json(reps));
  const Json& m = j["methods"][0];
  CHECK(m["method"] == "full");
  CHECK(m["aggregate"]["precision"].get<double>() == 0.666667);
  CHECK(m["aggregate"]["tracks"] == 2);
  CHECK(m["per_track"][1]["precision"].is_null());
  CHECK(m["skipped"] == Json::array({"c"}));

  const std::string table = report_table(reps);
  CHECK(table.find("method: full") != std::string::npos);
  CHECK(table.find("undefined") != std::string::npos);
  CHECK(table.find("0.667") != std::string::npos);
  CHECK(table.find("skipped (no annotations): c") != std::string::npos);

  const std::string csv = report_csv(reps);
  CHECK(csv ==
        "method,track_id,candidates,evaluated,annotations,hits,false_positives,misses,"
        "precision,recall\n"
        "full,a,3,3,2,2,1,0,0.666667,1.000000\n"
        "full,b,0,0,1,0,0,1,undefined,0.000000\n"
        "full,ALL,3,3,3,2,1,1,0.666667,0.666667\n");
}
