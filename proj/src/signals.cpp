#include "rss/signals.hpp"

#include <algorithm>
#include <cmath>

namespace rss {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void NormalizeRms(Signal &x, double target_rms) {
  if (x.empty()) return;
  const double rms = std::sqrt(Energy(x) / static_cast<double>(x.size()));
  if (rms <= 0) return;
  for (double &v : x) v *= target_rms / rms;
}

Signal WhiteNoise(std::size_t num_samples, Rng &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Signal x(num_samples);
  for (double &v : x) v = g(rng);
  return x;
}

Signal SyntheticSpeech(std::size_t num_samples, Rng &rng, double sample_rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Signal x(num_samples, 0.0);

  const double base_f0 = 90.0 + 160.0 * u(rng);
  const double nyquist_guard = 0.47 * sample_rate;
  // Two broad formant-like emphasis bands per talker.
  const double f1 = 400.0 + 500.0 * u(rng);
  const double f2 = 1200.0 + 1300.0 * u(rng);

  std::size_t n = 0;
  double phase = 0;
  while (n < num_samples) {
    const std::size_t seg =
        static_cast<std::size_t>((0.12 + 0.25 * u(rng)) * sample_rate);
    const std::size_t pause =
        static_cast<std::size_t>((0.04 + 0.12 * u(rng)) * sample_rate);
    const double f0_start = base_f0 * (0.85 + 0.3 * u(rng));
    const double f0_end = base_f0 * (0.85 + 0.3 * u(rng));
    const double level = 0.5 + u(rng);
    const std::size_t ramp = std::max<std::size_t>(seg / 6, 1);
    for (std::size_t i = 0; i < seg && n < num_samples; ++i, ++n) {
      const double a = static_cast<double>(i) / static_cast<double>(seg);
      const double f0 = f0_start + (f0_end - f0_start) * a;
      phase += 2.0 * kPi * f0 / sample_rate;
      if (phase > 2.0 * kPi * 1e4) phase = std::fmod(phase, 2.0 * kPi);
      double v = 0;
      const int harmonics = static_cast<int>(nyquist_guard / f0);
      for (int h = 1; h <= harmonics; ++h) {
        const double fh = f0 * h;
        const double tilt = 1.0 / std::sqrt(static_cast<double>(h));
        const double formant =
            1.0 + 3.0 * std::exp(-std::pow((fh - f1) / 250.0, 2)) +
            2.0 * std::exp(-std::pow((fh - f2) / 400.0, 2));
        v += tilt * formant * std::sin(h * phase);
      }
      v += 0.3 * g(rng);
      double env = 1.0;
      if (i < ramp) env = static_cast<double>(i) / static_cast<double>(ramp);
      if (seg - i < ramp)
        env = std::min(env, static_cast<double>(seg - i) /
                                static_cast<double>(ramp));
      x[n] = level * env * v;
    }
    for (std::size_t i = 0; i < pause && n < num_samples; ++i, ++n)
      x[n] = 0.01 * g(rng);
  }
  NormalizeRms(x);
  return x;
}

}  // namespace rss
