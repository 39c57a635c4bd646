#pragma once

#include <cstdint>
#include <random>

#include "rss/audio.hpp"

namespace rss {

using Rng = std::mt19937_64;

// Derives an independent stream seed from (seed, index).
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t index);

// Speech-like test signal: voiced harmonic segments with a drifting pitch
// and spectral tilt, separated by short pauses, plus a little aspiration
// noise. Unit RMS.
Signal SyntheticSpeech(std::size_t num_samples, Rng &rng,
                       double sample_rate = kSampleRate);

// White Gaussian noise, unit variance.
Signal WhiteNoise(std::size_t num_samples, Rng &rng);

void NormalizeRms(Signal &x, double target_rms = 1.0);

}  // namespace rss
