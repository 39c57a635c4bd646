#include "rss/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rss {

std::size_t FrameConfig::NumFrames(std::size_t num_samples) const {
  if (num_samples < frame_len) return 0;
  return 1 + (num_samples - frame_len) / hop;
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

namespace {

void CheckConfig(const FrameConfig &cfg) {
  Require(cfg.hop > 0 && cfg.frame_len >= cfg.hop &&
              cfg.fft_size >= cfg.frame_len,
          "invalid framing parameters");
}

}  // namespace

ComplexPlane Stft(std::span<const double> signal, const FrameConfig &cfg) {
  CheckConfig(cfg);
  Require(signal.size() >= cfg.frame_len,
          "audio shorter than one frame (" + std::to_string(signal.size()) +
              " < " + std::to_string(cfg.frame_len) + " samples)",
          ErrorCode::kData);
  const std::size_t frames = cfg.NumFrames(signal.size());
  const RealFft &fft = RealFft::Get(cfg.fft_size);
  const std::vector<double> window = HannWindow(cfg.frame_len);
  ComplexPlane out(frames, cfg.num_bins());
  std::vector<double> buf(cfg.fft_size, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * cfg.hop;
    for (std::size_t n = 0; n < cfg.frame_len; ++n)
      buf[n] = signal[start + n] * window[n];
    fft.Forward(buf, out.row(t));
  }
  return out;
}

SpectrogramStack Stft(const MultichannelAudio &audio, const FrameConfig &cfg) {
  SpectrogramStack s;
  s.config = cfg;
  s.channels.reserve(audio.num_channels());
  for (std::size_t c = 0; c < audio.num_channels(); ++c)
    s.channels.push_back(Stft(audio.channel(c), cfg));
  return s;
}

double WolaNormFloor(const FrameConfig &cfg) {
  CheckConfig(cfg);
  const std::vector<double> window = HannWindow(cfg.frame_len);
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < cfg.hop; ++n) {
    double z = 0;
    for (std::size_t k = n; k < cfg.frame_len; k += cfg.hop)
      z += window[k] * window[k];
    floor = std::min(floor, z);
  }
  return floor;
}

Signal Istft(const ComplexPlane &spec, std::size_t out_len,
             const FrameConfig &cfg) {
  CheckConfig(cfg);
  Require(spec.bins() == cfg.num_bins(),
          "spectrogram has " + std::to_string(spec.bins()) +
              " bins, framing expects " + std::to_string(cfg.num_bins()),
          ErrorCode::kData);
  const RealFft &fft = RealFft::Get(cfg.fft_size);
  const std::vector<double> window = HannWindow(cfg.frame_len);
  const std::size_t span_len =
      spec.frames() == 0 ? 0 : (spec.frames() - 1) * cfg.hop + cfg.frame_len;
  std::vector<double> acc(std::max(span_len, out_len), 0.0);
  std::vector<double> norm(acc.size(), 0.0);
  std::vector<double> buf(cfg.fft_size);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    fft.Inverse(spec.row(t), buf);
    const std::size_t start = t * cfg.hop;
    for (std::size_t n = 0; n < cfg.frame_len; ++n) {
      acc[start + n] += buf[n] * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }
  const double floor = WolaNormFloor(cfg);
  Signal out(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n)
    out[n] = acc[n] / std::max(norm[n], floor);
  return out;
}

MultichannelAudio Istft(const SpectrogramStack &spec, std::size_t out_len,
                        double sample_rate) {
  std::vector<Signal> channels;
  channels.reserve(spec.num_channels());
  for (const auto &plane : spec.channels) {
    Require(plane.frames() == spec.num_frames(),
            "inconsistent frame counts across channels", ErrorCode::kData);
    channels.push_back(Istft(plane, out_len, spec.config));
  }
  return MultichannelAudio(std::move(channels), sample_rate);
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(std::size_t num_filters, const FrameConfig &cfg,
                             double sample_rate)
    : weights_(num_filters, cfg.num_bins()) {
  Require(num_filters > 0, "need at least one mel filter");
  const double mel_hi = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(num_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_hi * static_cast<double>(i) /
               static_cast<double>(num_filters + 1);
  first_.assign(num_filters, cfg.num_bins());
  last_.assign(num_filters, 0);
  for (std::size_t m = 0; m < num_filters; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < cfg.num_bins(); ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate /
                                 static_cast<double>(cfg.fft_size));
      double w = 0;
      if (mel > left && mel < center)
        w = (mel - left) / (center - left);
      else if (mel >= center && mel < right)
        w = (right - mel) / (right - center);
      if (w > 0) {
        weights_.at(m, k) = w;
        first_[m] = std::min(first_[m], k);
        last_[m] = std::max(last_[m], k);
      }
    }
  }
}

std::vector<double> MelFilterbank::RowSums() const {
  std::vector<double> sums(num_filters(), 0.0);
  for (std::size_t m = 0; m < num_filters(); ++m)
    for (double w : weights_.row(m)) sums[m] += w;
  return sums;
}

void MelFilterbank::Apply(std::span<const double> power,
                          std::span<double> out) const {
  Require(power.size() == weights_.bins() && out.size() == num_filters(),
          "mel filterbank size mismatch");
  for (std::size_t m = 0; m < num_filters(); ++m) {
    double s = 0;
    for (std::size_t k = first_[m]; k <= last_[m] && k < power.size(); ++k)
      s += weights_.at(m, k) * power[k];
    out[m] = s;
  }
}

RealPlane Fbank(const ComplexPlane &spec) {
  const FrameConfig cfg;
  Require(spec.bins() == cfg.num_bins(), "fbank expects 513-bin spectra",
          ErrorCode::kData);
  static const MelFilterbank bank;
  RealPlane out(spec.frames(), kNumMelBins);
  std::vector<double> power(spec.bins());
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    auto row = spec.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) power[k] = std::norm(row[k]);
    auto dst = out.row(t);
    bank.Apply(power, dst);
    for (double &v : dst) v = std::log(std::max(v, kLogFloor));
  }
  return out;
}

FbankMatrix Fbank(const SpectrogramStack &spec) {
  FbankMatrix out;
  out.reserve(spec.num_channels());
  for (const auto &plane : spec.channels) out.push_back(Fbank(plane));
  return out;
}

}  // namespace rss
