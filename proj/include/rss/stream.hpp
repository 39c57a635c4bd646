#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "rss/dsp.hpp"
#include "rss/geometry.hpp"
#include "rss/separation.hpp"

namespace rss {

// Frame-synchronous separation: one hop of M-channel input in, one hop of
// steered, masked output out.
//
// Timing: the hop pushed as call h completes analysis frame h-1, which
// completes output hop h-1. The first call therefore returns nothing and
// every later call returns exactly one hop. Output sample n corresponds to
// input sample n - shift_delay(), where shift_delay() is the lookahead that
// negative alignment shifts need; it is zero when all shifts are >= 0.
class StreamSeparator {
 public:
  // Called once per analysis frame with the steered spectrum; writes one
  // mask value in [0, 1] per bin.
  using MaskProvider = std::function<void(
      std::size_t frame, std::span<const Complex> spectrum,
      std::span<double> mask)>;

  StreamSeparator(const ArrayGeometry &geom, double angle_deg,
                  MaskProvider provider = {});

  std::size_t num_channels() const { return num_channels_; }
  std::size_t hop() const { return cfg_.hop; }
  std::size_t shift_delay() const { return lookahead_; }
  std::size_t hops_consumed() const { return hops_in_; }
  std::size_t hops_emitted() const { return hops_out_; }

  // `interleaved` holds hop() * num_channels() samples, sample-major
  // (x[n * M + c]). Returns true when `out` (hop() samples) was written.
  bool Push(std::span<const double> interleaved, std::span<double> out);
  // Emits the trailing half frame once input has ended.
  bool Flush(std::span<double> out);

 private:
  double Input(std::size_t channel, long index) const;

  FrameConfig cfg_;
  std::size_t num_channels_;
  std::vector<int> shifts_;
  std::size_t lookahead_;
  MaskProvider provider_;
  std::vector<double> window_;
  double norm_floor_ = 0;

  std::vector<std::deque<double>> history_;  // raw input per channel
  long history_start_ = 0;                   // absolute index of front()
  std::vector<double> steered_;              // last frame_len steered samples
  std::vector<double> tail_acc_, tail_norm_; // overlap-add carry
  bool have_tail_ = false;
  std::size_t hops_in_ = 0, hops_out_ = 0;
};

// Serves rows of a precomputed mask by frame index; frames past the end
// pass through unchanged.
StreamSeparator::MaskProvider TensorMaskProvider(TFMask mask);

}  // namespace rss
