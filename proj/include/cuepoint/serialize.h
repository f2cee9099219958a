#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuepoint/evaluation.h"
#include "cuepoint/pipeline.h"
#include "cuepoint/synth.h"

namespace cuepoint {

inline constexpr std::string_view kSchemaVersion = "1.0";

struct TrackInfo {
  std::string track_id;
  std::string source;  // input path as given
  double duration_s = 0.0;
  int sample_rate = 0;

  bool operator==(const TrackInfo&) const = default;
};

struct OutputDocument {
  std::string schema_version{kSchemaVersion};
  TrackInfo track;
  AnalysisResult result;
  bool with_timings = false;  // timings vary run to run, so they are opt-in
};

/// Times are written at millisecond precision. Readers reject unknown
/// fields and throw kParseError.
std::string to_json(const OutputDocument& doc);
OutputDocument output_document_from_json(std::string_view text);

/// One row per switch point: index,time_s,stage,features (';'-joined).
std::string to_csv(const OutputDocument& doc);

std::string to_json(const PipelineConfig& config);
/// Fields present in the text override base. Throws kInvalidConfig.
PipelineConfig config_from_json(std::string_view text, const PipelineConfig& base = {});

std::string to_json(const AnnotationSet& annotations);
/// Accepts one object or an array of objects.
std::vector<AnnotationSet> annotations_from_json(std::string_view text);
/// A file, or a directory whose *.json files are read in name order.
std::vector<AnnotationSet> load_annotations(const std::filesystem::path& path);

/// Candidate files are analysis outputs, or annotation-shaped objects (whose
/// annotations_s become the candidates). Directories are read in name order.
std::vector<CandidateSet> candidates_from_json(std::string_view text);
std::vector<CandidateSet> load_candidates(const std::filesystem::path& path);

std::string to_json(const TrackScript& script);
/// Throws kInvalidScript for malformed JSON or an invalid script.
TrackScript script_from_json(std::string_view text);

std::string to_json(const SynthTruth& truth);

/// Reports for several methods on the same corpus.
std::string report_json(std::span<const EvalReport> reports);
std::string report_table(std::span<const EvalReport> reports);
std::string report_csv(std::span<const EvalReport> reports);

double round_ms(double seconds);

}  // namespace cuepoint
