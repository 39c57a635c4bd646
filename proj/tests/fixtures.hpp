// Shared scene builders for tests. Unlike oracles.hpp these use the library.
#pragma once

#include <random>

#include "oracles.hpp"
#include "rss/roomsim.hpp"
#include "rss/signals.hpp"

namespace fixture {

// c / sr: one sample of travel.
inline constexpr double kSampleSpacing = 343.0 / 16000.0;

// Linear array along x whose spacing is `k` samples of travel, so that an
// endfire source produces integer inter-mic delays.
inline rss::ArrayGeometry DelayExactArray(std::size_t mics, int k = 1) {
  std::vector<rss::Vec3> pos;
  for (std::size_t i = 0; i < mics; ++i)
    pos.push_back({static_cast<double>(i) * k * kSampleSpacing, 0, 0});
  return rss::ArrayGeometry(pos, 0);
}

// Dry signal with `pad` zeros on both ends, so integer shifts never cut
// into signal content.
inline rss::Signal PaddedSpeech(std::size_t n, std::size_t pad,
                                std::uint64_t seed) {
  rss::Rng rng(seed);
  rss::Signal x = rss::SyntheticSpeech(n - 2 * pad, rng);
  rss::Signal out(pad, 0.0);
  out.insert(out.end(), x.begin(), x.end());
  out.resize(n, 0.0);
  return out;
}

// Anechoic image of `dry` from a source `distance` m away along azimuth
// `az_deg` of an array placed at the middle of a large empty room.
inline rss::MultichannelAudio AnechoicImage(const rss::ArrayGeometry &geom,
                                            const rss::Signal &dry,
                                            double az_deg, double distance) {
  rss::RoomSpec room{{120.0, 120.0, 10.0}, 0.0};
  const rss::ArrayPose pose{{60.0, 60.0, 5.0}, 0.0};
  const rss::Vec3 src = rss::FromArrayPolar(pose, az_deg, distance, 5.0);
  return rss::RenderSource(dry, rss::SimulateRir(room, src, geom.Posed(pose)));
}

// Plane wave with integer per-mic delays: channel i = x[n - delay_i].
inline rss::MultichannelAudio PlaneWave(const rss::Signal &x,
                                        const std::vector<int> &delays) {
  rss::MultichannelAudio out(delays.size(), x.size());
  for (std::size_t c = 0; c < delays.size(); ++c) {
    auto ch = out.channel(c);
    for (std::size_t n = 0; n < x.size(); ++n) {
      const long src = static_cast<long>(n) - delays[c];
      if (src >= 0 && src < static_cast<long>(x.size())) ch[n] = x[src];
    }
  }
  return out;
}

}  // namespace fixture
