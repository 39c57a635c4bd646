#include "rss/stream.hpp"

#include <algorithm>
#include <memory>

#include "rss/error.hpp"

namespace rss {

StreamSeparator::StreamSeparator(const ArrayGeometry &geom, double angle_deg,
                                 MaskProvider provider)
    : num_channels_(geom.num_mics()), provider_(std::move(provider)) {
  const SteeringDelays d = ComputeDelays(geom, angle_deg);
  shifts_ = d.shifts;
  lookahead_ = static_cast<std::size_t>(std::max(0, -d.MinShift()));
  window_ = HannWindow(cfg_.frame_len);
  norm_floor_ = WolaNormFloor(cfg_);
  history_.resize(num_channels_);
  steered_.assign(cfg_.frame_len, 0.0);
  tail_acc_.assign(cfg_.frame_len - cfg_.hop, 0.0);
  tail_norm_.assign(cfg_.frame_len - cfg_.hop, 0.0);
}

double StreamSeparator::Input(std::size_t channel, long index) const {
  if (index < history_start_) return 0.0;
  const auto &h = history_[channel];
  const auto off = static_cast<std::size_t>(index - history_start_);
  return off < h.size() ? h[off] : 0.0;
}

bool StreamSeparator::Push(std::span<const double> interleaved,
                           std::span<double> out) {
  const std::size_t hop = cfg_.hop;
  Require(interleaved.size() == hop * num_channels_,
          "stream expects " + std::to_string(hop) + " x " +
              std::to_string(num_channels_) + " samples per hop, got " +
              std::to_string(interleaved.size()),
          ErrorCode::kData);
  Require(out.size() >= hop, "output buffer shorter than one hop");

  for (std::size_t n = 0; n < hop; ++n)
    for (std::size_t c = 0; c < num_channels_; ++c)
      history_[c].push_back(interleaved[n * num_channels_ + c]);

  // Steered samples for this hop on the delayed timeline:
  //   y_s[m] = mean_i x_i[m - lookahead - shift_i]
  const long first = static_cast<long>(hops_in_ * hop);
  const double inv = 1.0 / static_cast<double>(num_channels_);
  std::rotate(steered_.begin(), steered_.begin() + static_cast<long>(hop),
              steered_.end());
  for (std::size_t n = 0; n < hop; ++n) {
    const long m = first + static_cast<long>(n);
    double acc = 0.0;
    for (std::size_t c = 0; c < num_channels_; ++c)
      acc += Input(c, m - static_cast<long>(lookahead_) - shifts_[c]);
    steered_[cfg_.frame_len - hop + n] = acc * inv;
  }
  ++hops_in_;

  // Drop input no later hop can reach.
  const int max_shift = *std::max_element(shifts_.begin(), shifts_.end());
  const long keep_from = static_cast<long>(hops_in_ * hop) -
                         static_cast<long>(lookahead_) - max_shift -
                         static_cast<long>(hop);
  while (history_start_ < keep_from && !history_[0].empty()) {
    for (auto &h : history_) h.pop_front();
    ++history_start_;
  }

  const std::size_t frames_per_window = cfg_.frame_len / hop;
  if (hops_in_ < frames_per_window) return false;
  const std::size_t frame = hops_in_ - frames_per_window;

  const RealFft &fft = RealFft::Get(cfg_.fft_size);
  std::vector<double> buf(cfg_.fft_size, 0.0);
  for (std::size_t n = 0; n < cfg_.frame_len; ++n)
    buf[n] = steered_[n] * window_[n];
  std::vector<Complex> spec(cfg_.num_bins());
  fft.Forward(buf, spec);
  if (provider_) {
    std::vector<double> mask(cfg_.num_bins(), 1.0);
    provider_(frame, spec, mask);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      Require(mask[k] >= 0.0 && mask[k] <= 1.0,
              "mask provider returned a value outside [0, 1]",
              ErrorCode::kData);
      spec[k] *= mask[k];
    }
  }
  fft.Inverse(spec, buf);

  // Same accumulation order as the offline overlap-add.
  for (std::size_t n = 0; n < hop; ++n) {
    const double a = (have_tail_ ? tail_acc_[n] : 0.0) + buf[n] * window_[n];
    const double z =
        (have_tail_ ? tail_norm_[n] : 0.0) + window_[n] * window_[n];
    out[n] = a / std::max(z, norm_floor_);
  }
  for (std::size_t n = 0; n < cfg_.frame_len - hop; ++n) {
    tail_acc_[n] = 0.0 + buf[hop + n] * window_[hop + n];
    tail_norm_[n] = 0.0 + window_[hop + n] * window_[hop + n];
  }
  have_tail_ = true;
  ++hops_out_;
  return true;
}

bool StreamSeparator::Flush(std::span<double> out) {
  if (!have_tail_) return false;
  Require(out.size() >= tail_acc_.size(), "output buffer shorter than one hop");
  for (std::size_t n = 0; n < tail_acc_.size(); ++n)
    out[n] = tail_acc_[n] / std::max(tail_norm_[n], norm_floor_);
  have_tail_ = false;
  ++hops_out_;
  return true;
}

StreamSeparator::MaskProvider TensorMaskProvider(TFMask mask) {
  auto shared = std::make_shared<const TFMask>(std::move(mask));
  return [shared](std::size_t frame, std::span<const Complex>,
                  std::span<double> out) {
    if (frame >= shared->frames()) {
      std::fill(out.begin(), out.end(), 1.0);
      return;
    }
    Require(out.size() == shared->bins(), "mask bin count mismatch",
            ErrorCode::kData);
    auto row = shared->values().row(frame);
    std::copy(row.begin(), row.end(), out.begin());
  };
}

}  // namespace rss
