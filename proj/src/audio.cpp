#include "cuepoint/audio.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <numeric>

#include "cuepoint/error.h"
#include "cuepoint/fileio.h"

namespace cuepoint {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptStream, "corrupt WAV stream: " + what);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

float decode_sample(const std::uint8_t* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float v;
      std::memcpy(&v, p, 4);
      return v;
    }
    double v;
    std::memcpy(&v, p, 8);
    return static_cast<float>(v);
  }
  switch (bits) {
    case 8:
      return (static_cast<float>(p[0]) - 128.0f) / 128.0f;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return static_cast<float>(v) / 32768.0f;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(v / 8388608.0);
    }
    default: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<float>(v / 2147483648.0);
    }
  }
}

class WavDecoder final : public AudioDecoder {
 public:
  std::string name() const override { return "wav"; }
  bool accepts(std::span<const std::uint8_t> header) const override {
    return header.size() >= 12 && tag_is(header, 0, "RIFF") &&
           tag_is(header, 8, "WAVE");
  }
  DecodedAudio decode(std::span<const std::uint8_t> bytes) const override {
    return decode_wav(bytes);
  }
};

struct DecoderRegistry {
  std::mutex mutex;
  std::vector<std::shared_ptr<const AudioDecoder>> decoders{
      std::make_shared<WavDecoder>()};
};

DecoderRegistry& registry() {
  static DecoderRegistry r;
  return r;
}

double kaiser(double x, double beta) {
  // x in [-1, 1]
  const double arg = beta * std::sqrt(std::max(0.0, 1.0 - x * x));
  return std::cyl_bessel_i(0.0, arg) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

DecodedAudio decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::kUnsupportedCodec, "not a RIFF/WAVE stream");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::span<const std::uint8_t> payload;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) corrupt("short fmt chunk");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      block_align = read_u16(bytes, body + 12);
      bits = read_u16(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) corrupt("short extensible fmt chunk");
        format = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (body + size > bytes.size()) corrupt("truncated data chunk");
      payload = bytes.subspan(body, size);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) corrupt("missing fmt chunk");
  if (!have_data) corrupt("missing data chunk");

  const bool pcm_ok = format == kFormatPcm &&
                      (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    throw Error(ErrorCode::kUnsupportedCodec,
                "unsupported WAV encoding (format " + std::to_string(format) +
                    ", " + std::to_string(bits) + " bits)");
  }
  if (channels == 0 || rate == 0) corrupt("zero channels or sample rate");
  const std::size_t sample_bytes = bits / 8;
  if (block_align != channels * sample_bytes) corrupt("inconsistent block align");
  if (payload.size() % block_align != 0) corrupt("partial sample frame");

  const std::size_t frames = payload.size() / block_align;
  DecodedAudio out;
  out.sample_rate = static_cast<int>(rate);
  out.channels.assign(channels, std::vector<float>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    const std::uint8_t* frame = payload.data() + f * block_align;
    for (std::size_t c = 0; c < channels; ++c) {
      const float v = decode_sample(frame + c * sample_bytes, format, bits);
      if (!std::isfinite(v)) corrupt("non-finite sample");
      out.channels[c][f] = v;
    }
  }
  return out;
}

void register_decoder(std::shared_ptr<const AudioDecoder> decoder) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.decoders.push_back(std::move(decoder));
}

AudioBuffer load_audio(const std::filesystem::path& path) {
  const auto bytes = read_binary_file(path);
  std::shared_ptr<const AudioDecoder> decoder;
  {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    for (const auto& d : r.decoders) {
      if (d->accepts(std::span(bytes).first(std::min<std::size_t>(bytes.size(), 64)))) {
        decoder = d;
        break;
      }
    }
  }
  if (!decoder) {
    throw Error(ErrorCode::kUnsupportedCodec,
                "no decoder accepts " + path.string());
  }
  DecodedAudio decoded = decoder->decode(bytes);
  return AudioBuffer::from_channels(decoded.channels, decoded.sample_rate,
                                    path.string());
}

std::vector<float> resample(std::span<const float> input, int from_rate,
                            int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rates must be positive");
  }
  if (from_rate == to_rate) return {input.begin(), input.end()};

  const long g = std::gcd(from_rate, to_rate);
  const long step = from_rate / g;   // input advance per output, in 1/phases
  const long phases = to_rate / g;
  const auto n_in = static_cast<long>(input.size());
  const long n_out = (n_in * to_rate + from_rate / 2) / from_rate;

  // Cutoff relative to the input Nyquist, pulled in slightly so the
  // transition band sits below the lower of the two Nyquist limits.
  const double cutoff = 0.97 * std::min(1.0, static_cast<double>(to_rate) / from_rate);
  constexpr int kZeroCrossings = 24;
  constexpr double kBeta = 8.6;
  const int half = static_cast<int>(std::ceil(kZeroCrossings / cutoff));
  const int taps = 2 * half;

  // table[p][j] weights input sample (base - half + 1 + j) for phase p.
  std::vector<double> table(static_cast<std::size_t>(phases) * taps);
  for (long p = 0; p < phases; ++p) {
    const double frac = static_cast<double>(p) / phases;
    double sum = 0.0;
    for (int j = 0; j < taps; ++j) {
      const double tau = frac - (j - half + 1);
      double h = cutoff;
      const double x = std::numbers::pi * cutoff * tau;
      if (std::abs(x) > 1e-12) h = cutoff * std::sin(x) / x;
      h *= kaiser(tau / (half + 1), kBeta);
      table[p * taps + j] = h;
      sum += h;
    }
    for (int j = 0; j < taps; ++j) table[p * taps + j] /= sum;
  }

  std::vector<float> out(static_cast<std::size_t>(n_out));
  for (long m = 0; m < n_out; ++m) {
    const long num = m * step;
    const long base = num / phases;
    const long p = num % phases;
    const double* w = &table[p * taps];
    double acc = 0.0;
    const long first = base - half + 1;
    for (int j = 0; j < taps; ++j) {
      const long k = first + j;
      if (k >= 0 && k < n_in) acc += w[j] * input[k];
    }
    out[m] = static_cast<float>(acc);
  }
  return out;
}

AudioBuffer AudioBuffer::from_mono(std::vector<float> samples, int sample_rate,
                                   std::string source_path) {
  for (float v : samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kCorruptStream, "non-finite sample in input");
    }
  }
  AudioBuffer buf;
  buf.source_path_ = std::move(source_path);
  buf.samples_ = sample_rate == kAnalysisRate
                     ? std::move(samples)
                     : resample(samples, sample_rate, kAnalysisRate);
  float peak = 0.0f;
  for (float v : buf.samples_) peak = std::max(peak, std::abs(v));
  if (peak > 1.0f) {
    const double scale = 1.0 / peak;
    for (float& v : buf.samples_) {
      v = std::clamp(static_cast<float>(v * scale), -1.0f, 1.0f);
    }
  }
  return buf;
}

AudioBuffer AudioBuffer::from_channels(const std::vector<std::vector<float>>& channels,
                                       int sample_rate, std::string source_path) {
  if (channels.empty()) {
    throw Error(ErrorCode::kCorruptStream, "audio has no channels");
  }
  const std::size_t n = channels.front().size();
  for (const auto& c : channels) {
    if (c.size() != n) {
      throw Error(ErrorCode::kCorruptStream, "channel lengths differ");
    }
  }
  if (channels.size() == 1) {
    return from_mono(channels.front(), sample_rate, std::move(source_path));
  }
  std::vector<float> mono(n);
  const double inv = 1.0 / static_cast<double>(channels.size());
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const auto& c : channels) acc += c[i];
    mono[i] = static_cast<float>(acc * inv);
  }
  return from_mono(std::move(mono), sample_rate, std::move(source_path));
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples,
                                     int sample_rate, int channels,
                                     WavSampleFormat format) {
  const std::uint16_t bits = format == WavSampleFormat::kPcm16 ? 16 : 32;
  const std::uint16_t tag = format == WavSampleFormat::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto put = [&out](const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  };
  auto u32 = [&](std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                               static_cast<std::uint8_t>(v >> 16),
                               static_cast<std::uint8_t>(v >> 24)};
    put(b, 4);
  };
  auto u16 = [&](std::uint16_t v) {
    const std::uint8_t b[2] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
    put(b, 2);
  };
  put("RIFF", 4);
  u32(36 + data_size);
  put("WAVE", 4);
  put("fmt ", 4);
  u32(16);
  u16(tag);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(sample_rate));
  u32(static_cast<std::uint32_t>(sample_rate) * block);
  u16(block);
  u16(bits);
  put("data", 4);
  u32(data_size);
  for (float v : samples) {
    if (format == WavSampleFormat::kPcm16) {
      const long q = std::lround(std::clamp(v, -1.0f, 1.0f) * 32767.0f);
      u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      std::uint32_t bitsv;
      std::memcpy(&bitsv, &v, 4);
      u32(bitsv);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate, WavSampleFormat format) {
  write_file_atomic(path, encode_wav(samples, sample_rate, 1, format));
}

}  // namespace cuepoint
