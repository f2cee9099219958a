#include <cmath>
#include <cstring>
#include <fstream>

#include "cuepoint/audio.h"
#include "cuepoint/dsp.h"
#include "cuepoint/error.h"
#include "cuepoint/fileio.h"
#include "doctest.h"
#include "fixtures.h"

using namespace cuepoint;

namespace {

// Minimal RIFF writer, independent of encode_wav.
std::vector<std::uint8_t> raw_wav(std::uint16_t tag, std::uint16_t channels, std::uint32_t rate,
                                  std::uint16_t bits, const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out;
  auto put = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff); };
  auto u16 = [&](std::uint16_t v) { for (int i = 0; i < 2; ++i) out.push_back((v >> (8 * i)) & 0xff); };
  put("RIFF", 4);
  u32(static_cast<std::uint32_t>(36 + payload.size()));
  put("WAVE", 4);
  put("fmt ", 4);
  u32(16);
  u16(tag);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  put("data", 4);
  u32(static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::size_t argmax_bin(const Spectrogram& s, std::size_t frame) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.n_bins(); ++k) {
    if (s.frames(frame, k) > s.frames(frame, best)) best = k;
  }
  return best;
}

double rms(std::span<const float> x, std::size_t from, std::size_t to) {
  double acc = 0.0;
  for (std::size_t i = from; i < to; ++i) acc += static_cast<double>(x[i]) * x[i];
  return std::sqrt(acc / static_cast<double>(to - from));
}

}  // namespace

TEST_CASE("opposite stereo channels cancel to silence") {
  const std::vector<std::vector<float>> ch = {std::vector<float>(4410, 0.5f),
                                              std::vector<float>(4410, -0.5f)};
  const AudioBuffer b = AudioBuffer::from_channels(ch, 44100);
  CHECK(b.size() == 4410);
  for (float v : b.samples()) CHECK(v == 0.0f);
}

TEST_CASE("one second at 22050 Hz becomes 44100 samples") {
  const AudioBuffer b = AudioBuffer::from_mono(fixtures::sine(300.0, 1.0, 22050), 22050);
  CHECK(b.size() == 44100);
  CHECK(b.duration_s() == doctest::Approx(1.0));
  CHECK(b.sample_rate() == 44100);
}

TEST_CASE("440 Hz at 48 kHz keeps its STFT bin and RMS after resampling") {
  const auto x = fixtures::sine(440.0, 2.0, 48000);
  const AudioBuffer b = AudioBuffer::from_mono(x, 48000);
  const Spectrogram s = stft(b);
  const double expected = 440.0 * kStftWindow / 44100.0;
  for (std::size_t f = 2; f + 2 < s.n_frames(); f += 17) {
    CHECK(std::abs(static_cast<double>(argmax_bin(s, f)) - expected) <= 1.0);
  }
  const double in_rms = rms(x, 4800, x.size() - 4800);
  const double out_rms = rms(b.samples(), 4410, b.size() - 4410);
  CHECK(std::abs(out_rms / in_rms - 1.0) < 0.05);
}

TEST_CASE("peak normalization only above full scale") {
  const AudioBuffer quiet = AudioBuffer::from_mono({0.1f, -0.5f, 0.9f}, 44100);
  CHECK(quiet.samples()[2] == 0.9f);
  const AudioBuffer loud = AudioBuffer::from_mono({0.5f, -2.0f, 1.0f}, 44100);
  CHECK(loud.samples()[1] == doctest::Approx(-1.0));
  CHECK(loud.samples()[0] == doctest::Approx(0.25));
  for (float v : loud.samples()) CHECK(std::abs(v) <= 1.0f);
}

TEST_CASE("non-finite samples are rejected") {
  CHECK_THROWS_AS(AudioBuffer::from_mono({0.0f, NAN}, 44100), Error);
}

TEST_CASE("decode 16-bit, 24-bit and float PCM") {
  SUBCASE("16-bit stereo") {
    std::vector<std::uint8_t> p;
    for (std::int16_t v : {std::int16_t{16384}, std::int16_t{-16384}, std::int16_t{-32768},
                           std::int16_t{0}}) {
      p.push_back(static_cast<std::uint8_t>(v & 0xff));
      p.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    }
    const DecodedAudio d = decode_wav(raw_wav(1, 2, 44100, 16, p));
    REQUIRE(d.channels.size() == 2);
    CHECK(d.channels[0] == std::vector<float>{0.5f, -1.0f});
    CHECK(d.channels[1] == std::vector<float>{-0.5f, 0.0f});
  }
  SUBCASE("24-bit mono") {
    const std::vector<std::uint8_t> p = {0x00, 0x00, 0x40, 0x00, 0x00, 0xc0};
    const DecodedAudio d = decode_wav(raw_wav(1, 1, 8000, 24, p));
    CHECK(d.sample_rate == 8000);
    CHECK(d.channels[0] == std::vector<float>{0.5f, -0.5f});
  }
  SUBCASE("float32 mono") {
    const float v[2] = {0.25f, -0.75f};
    std::vector<std::uint8_t> p(sizeof v);
    std::memcpy(p.data(), v, sizeof v);
    const DecodedAudio d = decode_wav(raw_wav(3, 1, 44100, 32, p));
    CHECK(d.channels[0] == std::vector<float>{0.25f, -0.75f});
  }
}

TEST_CASE("encode then decode round-trips") {
  const auto x = fixtures::noise(1000, 3);
  const DecodedAudio f = decode_wav(encode_wav(x, 44100));
  CHECK(f.channels[0] == x);
  const DecodedAudio p = decode_wav(encode_wav(x, 44100, 1, WavSampleFormat::kPcm16));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(p.channels[0][i] - x[i]) < 1.0 / 32767);
}

TEST_CASE("load errors") {
  fixtures::TempDir dir("audio");
  SUBCASE("missing file") {
    try {
      load_audio(dir / "absent.wav");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFileNotFound);
      CHECK(std::string(e.what()).find("absent.wav") != std::string::npos);
    }
  }
  SUBCASE("not a WAV") {
    write_file_atomic(dir / "text.wav", std::string_view("ID3 this is not audio at all......"));
    try {
      load_audio(dir / "text.wav");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupportedCodec);
    }
  }
  SUBCASE("truncated payload") {
    auto bytes = encode_wav(fixtures::noise(100, 1), 44100);
    bytes.resize(30);
    write_file_atomic(dir / "short.wav", std::span<const std::uint8_t>(bytes));
    try {
      load_audio(dir / "short.wav");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kCorruptStream);
    }
  }
}

TEST_CASE("loading twice is bit-identical") {
  fixtures::TempDir dir("audio");
  write_wav(dir / "a.wav", fixtures::sine(220.0, 0.5, 32000), 32000);
  const AudioBuffer a = load_audio(dir / "a.wav");
  const AudioBuffer b = load_audio(dir / "a.wav");
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.samples().data(), b.samples().data(), a.size() * sizeof(float)) == 0);
  CHECK(a.size() == 22050);
}
