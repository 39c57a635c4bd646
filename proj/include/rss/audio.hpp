#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rss/geometry.hpp"

namespace rss {

using Signal = std::vector<double>;

// Sample-rate-tagged block of equal-length channels, stored channel-major.
class MultichannelAudio {
 public:
  MultichannelAudio() = default;
  MultichannelAudio(std::size_t num_channels, std::size_t num_frames,
                    double sample_rate = kSampleRate);
  MultichannelAudio(std::vector<Signal> channels,
                    double sample_rate = kSampleRate);

  std::size_t num_channels() const { return channels_.size(); }
  std::size_t num_frames() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double sample_rate() const { return sample_rate_; }

  std::span<double> channel(std::size_t c) { return channels_.at(c); }
  std::span<const double> channel(std::size_t c) const {
    return channels_.at(c);
  }
  const std::vector<Signal> &channels() const { return channels_; }

  MultichannelAudio &operator+=(const MultichannelAudio &o);
  MultichannelAudio &operator*=(double gain);

  // Sum of squares over all channels.
  double Energy() const;
  bool AllFinite() const;

 private:
  std::vector<Signal> channels_;
  double sample_rate_ = kSampleRate;
};

double Energy(std::span<const double> x);
double Dot(std::span<const double> a, std::span<const double> b);

enum class WavFormat { kPcm16, kFloat32 };

// 16 kHz only; other rates are rejected on read and write.
MultichannelAudio ReadWav(const std::filesystem::path &path);
void WriteWav(const std::filesystem::path &path, const MultichannelAudio &audio,
              WavFormat format = WavFormat::kFloat32);

}  // namespace rss
