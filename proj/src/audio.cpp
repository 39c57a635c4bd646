#include "rss/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "rss/error.hpp"

namespace rss {

MultichannelAudio::MultichannelAudio(std::size_t num_channels,
                                     std::size_t num_frames,
                                     double sample_rate)
    : channels_(num_channels, Signal(num_frames, 0.0)),
      sample_rate_(sample_rate) {
  Require(sample_rate > 0, "sample rate must be positive");
}

MultichannelAudio::MultichannelAudio(std::vector<Signal> channels,
                                     double sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  Require(sample_rate > 0, "sample rate must be positive");
  for (const auto &c : channels_)
    Require(c.size() == channels_.front().size(),
            "all channels must have the same length");
}

MultichannelAudio &MultichannelAudio::operator+=(const MultichannelAudio &o) {
  Require(o.num_channels() == num_channels() && o.num_frames() == num_frames(),
          "audio shape mismatch in sum");
  for (std::size_t c = 0; c < channels_.size(); ++c)
    for (std::size_t n = 0; n < channels_[c].size(); ++n)
      channels_[c][n] += o.channels_[c][n];
  return *this;
}

MultichannelAudio &MultichannelAudio::operator*=(double gain) {
  for (auto &c : channels_)
    for (auto &v : c) v *= gain;
  return *this;
}

double MultichannelAudio::Energy() const {
  double e = 0;
  for (const auto &c : channels_) e += rss::Energy(c);
  return e;
}

bool MultichannelAudio::AllFinite() const {
  for (const auto &c : channels_)
    for (double v : c)
      if (!std::isfinite(v)) return false;
  return true;
}

double Energy(std::span<const double> x) {
  double e = 0;
  for (double v : x) e += v * v;
  return e;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), "length mismatch in dot product");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLe(const unsigned char *p) {
  T v;
  std::memcpy(&v, p, sizeof(T));  // host is little-endian
  return v;
}

template <typename T>
void PutLe(std::string &out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

MultichannelAudio ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "cannot open " + path.string(), ErrorCode::kIo);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  auto bad = [&](const std::string &why) {
    Fail(ErrorCode::kData, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    bad("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const auto size = ReadLe<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) bad("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) bad("short fmt chunk");
      format = ReadLe<std::uint16_t>(chunk + 8);
      channels = ReadLe<std::uint16_t>(chunk + 10);
      rate = ReadLe<std::uint32_t>(chunk + 12);
      bits = ReadLe<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible && size >= 40)
        format = ReadLe<std::uint16_t>(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!data || channels == 0) bad("missing fmt or data chunk");
  if (rate != static_cast<std::uint32_t>(kSampleRate))
    bad("sample rate " + std::to_string(rate) + " Hz, expected 16000");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) bad("only PCM16 and float32 are supported");
  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);

  MultichannelAudio audio(channels, frames, rate);
  for (std::size_t n = 0; n < frames; ++n)
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char *p = data + (n * channels + c) * width;
      audio.channel(c)[n] =
          pcm16 ? ReadLe<std::int16_t>(p) / 32768.0
                : static_cast<double>(ReadLe<float>(p));
    }
  return audio;
}

void WriteWav(const std::filesystem::path &path, const MultichannelAudio &audio,
              WavFormat format) {
  Require(audio.sample_rate() == kSampleRate,
          "WAV output is 16 kHz only", ErrorCode::kData);
  Require(audio.num_channels() > 0, "cannot write empty audio",
          ErrorCode::kData);
  const std::uint16_t channels = static_cast<std::uint16_t>(audio.num_channels());
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(audio.num_frames() * channels * (bits / 8));

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutLe<std::uint32_t>(out, 36 + data_size);
  out += "WAVEfmt ";
  PutLe<std::uint32_t>(out, 16);
  PutLe<std::uint16_t>(out, format == WavFormat::kPcm16 ? kFormatPcm
                                                        : kFormatFloat);
  PutLe<std::uint16_t>(out, channels);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(kSampleRate));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(kSampleRate) *
                                channels * (bits / 8));
  PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(channels * bits / 8));
  PutLe<std::uint16_t>(out, bits);
  out += "data";
  PutLe<std::uint32_t>(out, data_size);
  for (std::size_t n = 0; n < audio.num_frames(); ++n)
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = audio.channel(c)[n];
      if (format == WavFormat::kPcm16) {
        const double s = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        PutLe<std::int16_t>(out, static_cast<std::int16_t>(s));
      } else {
        PutLe<float>(out, static_cast<float>(v));
      }
    }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  Require(f.good(), "cannot write " + path.string(), ErrorCode::kIo);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  Require(f.good(), "short write to " + path.string(), ErrorCode::kIo);
}

}  // namespace rss
