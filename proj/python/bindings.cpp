#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cuepoint/error.h"
#include "cuepoint/serialize.h"

namespace py = pybind11;
using namespace cuepoint;

namespace {

AudioBuffer buffer_from(py::array_t<float, py::array::c_style | py::array::forcecast> samples,
                        int sample_rate) {
  if (samples.ndim() != 1) throw py::value_error("samples must be one-dimensional");
  std::vector<float> data(samples.data(), samples.data() + samples.size());
  return AudioBuffer::from_mono(std::move(data), sample_rate);
}

BeatGrid grid_from(const AudioBuffer& buffer, const std::optional<std::vector<double>>& beats,
                   int downbeat_offset) {
  if (!beats) return estimate_beats(buffer);
  BeatGrid grid;
  grid.beat_times = *beats;
  grid.downbeat_offset = downbeat_offset;
  grid.source = GridSource::kExternal;
  if (grid.beat_times.size() > 1) {
    grid.tempo_bpm = 60.0 * static_cast<double>(grid.beat_times.size() - 1) /
                     (grid.beat_times.back() - grid.beat_times.front());
  }
  return grid;
}

PipelineConfig config_from(const std::string& rules, const std::optional<std::string>& config) {
  PipelineConfig c = config ? config_from_json(*config) : PipelineConfig{};
  c.enabled_rules = parse_rules(rules);
  return c;
}

std::string document(const AudioBuffer& buffer, const AnalysisResult& result,
                     const std::string& track_id) {
  OutputDocument doc;
  doc.track = TrackInfo{track_id, buffer.source_path(), buffer.duration_s(), buffer.sample_rate()};
  doc.result = result;
  doc.result.track_id = track_id;
  return to_json(doc);
}

Matrix<double> matrix_from(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw py::value_error("expected a two-dimensional array");
  Matrix<double> m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

py::array_t<double> to_numpy(const Matrix<double>& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Switch-point detection core";

  static py::exception<Error> error(m, "CuepointError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.attr("SCHEMA_VERSION") = std::string(kSchemaVersion);
  m.attr("SAMPLE_RATE") = kAnalysisRate;

  m.def(
      "analyze_file",
      [](const std::string& path, const std::optional<std::string>& beats,
         const std::string& rules, const std::optional<std::string>& config) {
        py::gil_scoped_release release;
        const AudioBuffer buffer = load_audio(path);
        const BeatGrid grid = beats ? load_beats(*beats, buffer) : estimate_beats(buffer);
        const AnalysisResult r = get_switch_points(buffer, grid, config_from(rules, config));
        return document(buffer, r, std::filesystem::path(path).stem().string());
      },
      py::arg("path"), py::arg("beats") = py::none(),
      py::arg("rules") = "novelty,period,salience", py::arg("config") = py::none(),
      "Analyze a WAV file; returns the output document as JSON text.");

  m.def(
      "analyze_samples",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> samples, int sample_rate,
         const std::optional<std::vector<double>>& beats, int downbeat_offset,
         const std::string& rules, const std::optional<std::string>& config,
         const std::string& track_id) {
        const AudioBuffer buffer = buffer_from(samples, sample_rate);
        py::gil_scoped_release release;
        const BeatGrid grid = grid_from(buffer, beats, downbeat_offset);
        const AnalysisResult r = get_switch_points(buffer, grid, config_from(rules, config));
        return document(buffer, r, track_id);
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("beats") = py::none(),
      py::arg("downbeat_offset") = 0, py::arg("rules") = "novelty,period,salience",
      py::arg("config") = py::none(), py::arg("track_id") = "track",
      "Analyze mono samples; returns the output document as JSON text.");

  m.def(
      "estimate_beats",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> samples, int sample_rate) {
        const AudioBuffer buffer = buffer_from(samples, sample_rate);
        py::gil_scoped_release release;
        const BeatGrid g = estimate_beats(buffer);
        return std::make_tuple(g.beat_times, g.downbeat_offset, g.tempo_bpm);
      },
      py::arg("samples"), py::arg("sample_rate"),
      "Returns (beat_times, downbeat_offset, tempo_bpm).");

  m.def(
      "ssm", [](py::array_t<double, py::array::c_style | py::array::forcecast> rows) {
        return to_numpy(ssm(matrix_from(rows)).dist);
      },
      py::arg("rows"), "Standardized-Euclidean distance matrix of the rows.");

  m.def(
      "novelty",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> rows, int half_size,
         bool zero_padding) {
        const NoveltyCurve c =
            novelty_curve(ssm(matrix_from(rows)), checkerboard_kernel(half_size),
                          zero_padding ? Padding::kZero : Padding::kValid);
        return std::make_tuple(c.values, c.valid_from, c.valid_to);
      },
      py::arg("rows"), py::arg("half_size") = kKernelHalfSize, py::arg("zero_padding") = false,
      "Checkerboard novelty; returns (values, valid_from, valid_to).");

  m.def(
      "match",
      [](const std::vector<double>& candidates, const std::vector<double>& annotations,
         double region_end, double window) {
        AnnotationSet a{"track", annotations, region_end};
        a.validate();
        const Matching mm = match(candidates, a, window);
        return std::make_tuple(mm.hits, mm.false_positives, mm.misses);
      },
      py::arg("candidates"), py::arg("annotations"), py::arg("region_end"),
      py::arg("window") = kHitWindowS, "Returns (hits, false_positives, misses).");

  m.def(
      "evaluate",
      [](const std::string& candidates_json, const std::string& annotations_json, double window,
         const std::string& method) {
        const auto c = candidates_from_json(candidates_json);
        const auto a = annotations_from_json(annotations_json);
        const EvalReport r = evaluate_corpus(c, a, window, method);
        return report_json(std::span<const EvalReport>(&r, 1));
      },
      py::arg("candidates_json"), py::arg("annotations_json"), py::arg("window") = kHitWindowS,
      py::arg("method") = "candidates", "Scores candidates; returns the JSON report.");

  m.def(
      "synth",
      [](const std::string& script_json) {
        const TrackScript script = script_from_json(script_json);
        RenderedTrack t = [&] {
          py::gil_scoped_release release;
          return render(script);
        }();
        const auto samples = t.audio.samples();
        py::array_t<float> audio(static_cast<py::ssize_t>(samples.size()));
        std::copy(samples.begin(), samples.end(), audio.mutable_data());
        return py::make_tuple(audio, to_json(t.truth));
      },
      py::arg("script_json"), "Renders a track script; returns (samples, truth JSON).");
}
