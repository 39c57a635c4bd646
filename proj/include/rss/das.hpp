#pragma once

#include <cstddef>
#include <vector>

#include "rss/audio.hpp"
#include "rss/dsp.hpp"
#include "rss/geometry.hpp"

namespace rss {

// Channel i delayed by delays.shifts[i] samples: positive shifts prepend
// zeros and drop the tail, negative shifts drop leading samples and append
// zeros. Length is preserved.
struct AlignedSignals {
  MultichannelAudio signals;
  SteeringDelays delays;
};

AlignedSignals ShiftAlign(const MultichannelAudio &audio,
                          const SteeringDelays &delays);
Signal Shift(std::span<const double> x, int shift);

// Mean over channels.
Signal DasSum(const MultichannelAudio &aligned);
inline Signal DasSum(const AlignedSignals &a) { return DasSum(a.signals); }

// (y_i + y_j) / 2 per pair.
std::vector<Signal> PairwiseAvg(const AlignedSignals &aligned,
                                const PairList &pairs);
// y_i - y_j per pair, no 1/2 factor.
std::vector<Signal> PairwiseDiff(const AlignedSignals &aligned,
                                 const PairList &pairs);

// Channel order: aligned mics, full sum, pair averages, pair differences.
struct DasSignalSet {
  std::vector<Signal> aligned;
  Signal full_sum;
  std::vector<Signal> pair_avgs;
  std::vector<Signal> pair_diffs;
  PairList pair_list;

  std::size_t num_channels() const {
    return aligned.size() + 1 + pair_avgs.size() + pair_diffs.size();
  }
  MultichannelAudio Stacked(double sample_rate = kSampleRate) const;
};

DasSignalSet BuildDasSignalSet(const AlignedSignals &aligned,
                               const PairList &pairs);

struct DasFeatures {
  FbankMatrix fbank;  // [channels][frames][80]
  PairList pair_list;
  SteeringDelays delays;

  std::size_t num_channels() const { return fbank.size(); }
};

// All M(M-1)/2 pairs, giving M^2 + 1 channels.
DasFeatures AssembleDasFeatures(const MultichannelAudio &audio,
                                const ArrayGeometry &geom, double angle_deg);
DasFeatures AssembleDasFeatures(const MultichannelAudio &audio,
                                const ArrayGeometry &geom, double angle_deg,
                                const PairList &pairs);

// Steered single-channel signal y^s for `audio`.
Signal SteeredSum(const MultichannelAudio &audio, const ArrayGeometry &geom,
                  double angle_deg);

}  // namespace rss
