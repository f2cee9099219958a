#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cuepoint {

inline constexpr int kAnalysisRate = 44100;

/// Mono PCM at the analysis rate. Immutable once built; samples are finite
/// and within [-1, 1].
class AudioBuffer {
 public:
  AudioBuffer() = default;

  /// Takes mono samples at an arbitrary rate, resamples to kAnalysisRate and
  /// peak-normalizes if anything exceeds full scale.
  static AudioBuffer from_mono(std::vector<float> samples, int sample_rate,
                               std::string source_path = {});

  /// Averages channels to mono, then proceeds as from_mono().
  static AudioBuffer from_channels(const std::vector<std::vector<float>>& channels,
                                   int sample_rate, std::string source_path = {});

  std::span<const float> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  int sample_rate() const noexcept { return kAnalysisRate; }
  const std::string& source_path() const noexcept { return source_path_; }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / kAnalysisRate;
  }

 private:
  std::vector<float> samples_;
  std::string source_path_;
};

/// Decoded, not yet mixed or resampled.
struct DecodedAudio {
  std::vector<std::vector<float>> channels;
  int sample_rate = 0;
};

/// Codec plug-in point. The WAV decoder is always registered; others (MP3,
/// FLAC, ...) can be added with register_decoder().
class AudioDecoder {
 public:
  virtual ~AudioDecoder() = default;
  virtual std::string name() const = 0;
  virtual bool accepts(std::span<const std::uint8_t> header) const = 0;
  virtual DecodedAudio decode(std::span<const std::uint8_t> bytes) const = 0;
};

void register_decoder(std::shared_ptr<const AudioDecoder> decoder);

/// RIFF/WAVE: PCM 8/16/24/32-bit integer, IEEE float 32/64, extensible.
DecodedAudio decode_wav(std::span<const std::uint8_t> bytes);

/// Throws Error{kFileNotFound | kUnsupportedCodec | kCorruptStream}.
AudioBuffer load_audio(const std::filesystem::path& path);

/// Band-limited polyphase windowed-sinc resampler (Kaiser window).
std::vector<float> resample(std::span<const float> input, int from_rate,
                            int to_rate);

enum class WavSampleFormat { kPcm16, kFloat32 };

std::vector<std::uint8_t> encode_wav(std::span<const float> samples,
                                     int sample_rate, int channels = 1,
                                     WavSampleFormat format = WavSampleFormat::kFloat32);

/// Writes via a temporary file and rename.
void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate, WavSampleFormat format = WavSampleFormat::kFloat32);

}  // namespace cuepoint
