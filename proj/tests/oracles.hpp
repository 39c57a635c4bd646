// Reference implementations used only by tests. Each one follows the
// textbook definition directly and shares no code with the library.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// X[k] = sum_n x[n] exp(-2 pi i k n / N), k = 0..N/2.
inline std::vector<std::complex<double>> Dft(const std::vector<double> &x,
                                             std::size_t n_fft) {
  std::vector<std::complex<double>> out(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t n = 0; n < x.size() && n < n_fft; ++n) {
      const long double ph = -2 * kPiL * static_cast<long double>(k * n) /
                             static_cast<long double>(n_fft);
      acc += static_cast<long double>(x[n]) *
             std::complex<long double>(std::cos(ph), std::sin(ph));
    }
    out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

inline double Hann(std::size_t n, std::size_t len) {
  return 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 *
                              static_cast<double>(n) / static_cast<double>(len));
}

// floor((d_ref - d_i) * sr / c) at a far point, in long double.
inline std::vector<int> Delays(const std::vector<std::array<double, 3>> &mics,
                               std::size_t ref, double az_deg, double dist,
                               double sr = 16000, double c = 343) {
  long double cx = 0, cy = 0, cz = 0;
  for (const auto &m : mics) cx += m[0], cy += m[1], cz += m[2];
  cx /= mics.size(), cy /= mics.size(), cz /= mics.size();
  const long double a = az_deg * kPiL / 180;
  const long double px = cx + dist * std::cos(a), py = cy + dist * std::sin(a);
  auto d = [&](const std::array<double, 3> &m) {
    return std::sqrt((px - m[0]) * (px - m[0]) + (py - m[1]) * (py - m[1]) +
                     (cz - m[2]) * (cz - m[2]));
  };
  std::vector<int> out;
  for (const auto &m : mics)
    out.push_back(static_cast<int>(std::floor((d(mics[ref]) - d(m)) * sr / c)));
  return out;
}

inline double Energy(const std::vector<double> &x) {
  long double e = 0;
  for (double v : x) e += static_cast<long double>(v) * v;
  return static_cast<double>(e);
}

inline double SnrDb(const std::vector<double> &signal,
                    const std::vector<double> &noise) {
  return 10 * std::log10(Energy(signal) / Energy(noise));
}

// Decay time from Schroeder backward integration, fitting the -5..-25 dB
// span (T20) and extrapolating to 60 dB.
inline double SchroederT60(const std::vector<double> &rir, double sr) {
  std::vector<long double> edc(rir.size());
  long double acc = 0;
  for (std::size_t n = rir.size(); n-- > 0;) {
    acc += static_cast<long double>(rir[n]) * rir[n];
    edc[n] = acc;
  }
  std::vector<double> t, db;
  for (std::size_t n = 0; n < rir.size(); ++n) {
    const double level = 10 * std::log10(static_cast<double>(edc[n] / edc[0]));
    if (level <= -5 && level >= -25) {
      t.push_back(static_cast<double>(n) / sr);
      db.push_back(level);
    }
  }
  if (t.size() < 2) return 0;
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / t.size();
  const double md = std::accumulate(db.begin(), db.end(), 0.0) / db.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (db[i] - md);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  return -60.0 / (sxy / sxx);
}

inline std::vector<double> Gaussian(std::size_t n, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto &v : x) v = g(rng);
  return x;
}

// Component of `x` orthogonal to `ref`, rescaled to `ref`'s energy.
inline std::vector<double> OrthogonalEqualPower(std::vector<double> x,
                                                const std::vector<double> &ref) {
  long double dot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<long double>(x[i]) * ref[i];
  const long double a = dot / Energy(ref);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= static_cast<double>(a * ref[i]);
  const double g = std::sqrt(Energy(ref) / Energy(x));
  for (auto &v : x) v *= g;
  return x;
}

inline double Mean(const std::vector<double> &x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace oracle
