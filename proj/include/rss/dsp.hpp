#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rss/audio.hpp"
#include "rss/error.hpp"
#include "rss/fft.hpp"

namespace rss {

// 40 ms frames, 20 ms hop at 16 kHz, zero-padded to a 1024-point FFT.
struct FrameConfig {
  std::size_t frame_len = 640;
  std::size_t hop = 320;
  std::size_t fft_size = 1024;

  std::size_t num_bins() const { return fft_size / 2 + 1; }
  // 1 + floor((T - frame_len) / hop); 0 when T < frame_len.
  std::size_t NumFrames(std::size_t num_samples) const;
};

inline constexpr std::size_t kNumMelBins = 80;
inline constexpr double kLogFloor = 1e-10;

// Dense row-major [frames][bins] plane.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t frames, std::size_t bins, T fill = T{})
      : frames_(frames), bins_(bins), data_(frames * bins, fill) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t size() const { return data_.size(); }

  T &at(std::size_t t, std::size_t f) { return data_[t * bins_ + f]; }
  const T &at(std::size_t t, std::size_t f) const {
    return data_[t * bins_ + f];
  }
  std::span<T> row(std::size_t t) { return {data_.data() + t * bins_, bins_}; }
  std::span<const T> row(std::size_t t) const {
    return {data_.data() + t * bins_, bins_};
  }
  std::vector<T> &data() { return data_; }
  const std::vector<T> &data() const { return data_; }

 private:
  std::size_t frames_ = 0, bins_ = 0;
  std::vector<T> data_;
};

using ComplexPlane = Plane<Complex>;
using RealPlane = Plane<double>;

template <typename A, typename B>
void RequireSameShape(const Plane<A> &a, const Plane<B> &b) {
  Require(a.frames() == b.frames() && a.bins() == b.bins(),
          "time-frequency plane shape mismatch");
}

// Complex STFT of every channel: [channels][frames][bins].
struct SpectrogramStack {
  std::vector<ComplexPlane> channels;
  FrameConfig config;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_frames() const {
    return channels.empty() ? 0 : channels.front().frames();
  }
};

// Periodic Hann window of length n.
std::vector<double> HannWindow(std::size_t n);

// First frame starts at sample 0, no padding.
ComplexPlane Stft(std::span<const double> signal, const FrameConfig &cfg = {});
SpectrogramStack Stft(const MultichannelAudio &audio,
                      const FrameConfig &cfg = {});

// Smallest sum of squared windows over a fully overlapped sample (0.5 for
// Hann at 50% overlap). Istft divides by at least this much, so the first
// and last half-frames fade instead of amplifying masked leakage.
double WolaNormFloor(const FrameConfig &cfg = {});

// Weighted overlap-add with squared-window normalization.
Signal Istft(const ComplexPlane &spec, std::size_t out_len,
             const FrameConfig &cfg = {});
MultichannelAudio Istft(const SpectrogramStack &spec, std::size_t out_len,
                        double sample_rate = kSampleRate);

// HTK-style triangular mel filters over 0 Hz .. sample_rate / 2, applied to
// power spectra. Rows are filters, columns FFT bins.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t num_filters = kNumMelBins,
                const FrameConfig &cfg = {}, double sample_rate = kSampleRate);

  std::size_t num_filters() const { return weights_.frames(); }
  const RealPlane &weights() const { return weights_; }
  // Per-filter sum of weights.
  std::vector<double> RowSums() const;

  void Apply(std::span<const double> power, std::span<double> out) const;

 private:
  RealPlane weights_;
  std::vector<std::size_t> first_, last_;  // nonzero bin span per filter
};

double HzToMel(double hz);
double MelToHz(double mel);

// [channels][frames][80] natural-log mel energies, floored at 1e-10.
using FbankMatrix = std::vector<RealPlane>;

RealPlane Fbank(const ComplexPlane &spec);
FbankMatrix Fbank(const SpectrogramStack &spec);

}  // namespace rss
