#include "rss/das.hpp"

#include <cstdlib>

#include "rss/error.hpp"

namespace rss {

Signal Shift(std::span<const double> x, int shift) {
  const std::size_t n = x.size();
  Require(static_cast<std::size_t>(std::abs(shift)) < n || n == 0,
          "shift magnitude " + std::to_string(std::abs(shift)) +
              " must be below the signal length " + std::to_string(n));
  Signal y(n, 0.0);
  if (shift >= 0) {
    const std::size_t s = static_cast<std::size_t>(shift);
    for (std::size_t i = s; i < n; ++i) y[i] = x[i - s];
  } else {
    const std::size_t s = static_cast<std::size_t>(-shift);
    for (std::size_t i = 0; i + s < n; ++i) y[i] = x[i + s];
  }
  return y;
}

AlignedSignals ShiftAlign(const MultichannelAudio &audio,
                          const SteeringDelays &delays) {
  Require(delays.shifts.size() == audio.num_channels(),
          "delay count does not match channel count");
  std::vector<Signal> out;
  out.reserve(audio.num_channels());
  for (std::size_t c = 0; c < audio.num_channels(); ++c)
    out.push_back(Shift(audio.channel(c), delays.shifts[c]));
  return {MultichannelAudio(std::move(out), audio.sample_rate()), delays};
}

Signal DasSum(const MultichannelAudio &aligned) {
  Require(aligned.num_channels() >= 1, "delay-and-sum needs a channel");
  Signal y(aligned.num_frames(), 0.0);
  for (std::size_t c = 0; c < aligned.num_channels(); ++c) {
    auto ch = aligned.channel(c);
    for (std::size_t n = 0; n < y.size(); ++n) y[n] += ch[n];
  }
  const double inv = 1.0 / static_cast<double>(aligned.num_channels());
  for (double &v : y) v *= inv;
  return y;
}

namespace {

template <typename Op>
std::vector<Signal> PairwiseCombine(const AlignedSignals &aligned,
                                    const PairList &pairs, Op op) {
  const auto &a = aligned.signals;
  ValidatePairs(pairs, a.num_channels());
  std::vector<Signal> out;
  out.reserve(pairs.size());
  for (const auto &[i, j] : pairs) {
    auto yi = a.channel(i), yj = a.channel(j);
    Signal y(a.num_frames());
    for (std::size_t n = 0; n < y.size(); ++n) y[n] = op(yi[n], yj[n]);
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace

std::vector<Signal> PairwiseAvg(const AlignedSignals &aligned,
                                const PairList &pairs) {
  return PairwiseCombine(aligned, pairs,
                         [](double a, double b) { return 0.5 * (a + b); });
}

std::vector<Signal> PairwiseDiff(const AlignedSignals &aligned,
                                 const PairList &pairs) {
  return PairwiseCombine(aligned, pairs,
                         [](double a, double b) { return a - b; });
}

MultichannelAudio DasSignalSet::Stacked(double sample_rate) const {
  std::vector<Signal> all;
  all.reserve(num_channels());
  all.insert(all.end(), aligned.begin(), aligned.end());
  all.push_back(full_sum);
  all.insert(all.end(), pair_avgs.begin(), pair_avgs.end());
  all.insert(all.end(), pair_diffs.begin(), pair_diffs.end());
  return MultichannelAudio(std::move(all), sample_rate);
}

DasSignalSet BuildDasSignalSet(const AlignedSignals &aligned,
                               const PairList &pairs) {
  DasSignalSet set;
  set.aligned = aligned.signals.channels();
  set.full_sum = DasSum(aligned);
  set.pair_avgs = PairwiseAvg(aligned, pairs);
  set.pair_diffs = PairwiseDiff(aligned, pairs);
  set.pair_list = pairs;
  return set;
}

DasFeatures AssembleDasFeatures(const MultichannelAudio &audio,
                                const ArrayGeometry &geom, double angle_deg) {
  return AssembleDasFeatures(audio, geom, angle_deg,
                             AllPairs(geom.num_mics()));
}

DasFeatures AssembleDasFeatures(const MultichannelAudio &audio,
                                const ArrayGeometry &geom, double angle_deg,
                                const PairList &pairs) {
  Require(audio.num_channels() == geom.num_mics(),
          "audio has " + std::to_string(audio.num_channels()) +
              " channels, geometry has " + std::to_string(geom.num_mics()) +
              " microphones",
          ErrorCode::kData);
  const SteeringDelays delays =
      ComputeDelays(geom, angle_deg, audio.sample_rate());
  const AlignedSignals aligned = ShiftAlign(audio, delays);
  const DasSignalSet set = BuildDasSignalSet(aligned, pairs);
  DasFeatures f;
  f.fbank = Fbank(Stft(set.Stacked(audio.sample_rate())));
  f.pair_list = pairs;
  f.delays = delays;
  return f;
}

Signal SteeredSum(const MultichannelAudio &audio, const ArrayGeometry &geom,
                  double angle_deg) {
  Require(audio.num_channels() == geom.num_mics(),
          "audio channel count does not match geometry", ErrorCode::kData);
  return DasSum(
      ShiftAlign(audio, ComputeDelays(geom, angle_deg, audio.sample_rate())));
}

}  // namespace rss
