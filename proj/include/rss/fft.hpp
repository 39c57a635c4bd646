#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rss {

using Complex = std::complex<double>;

// Real-input FFT of a fixed size backed by FFTW. Instances are cached per
// size and safe to share across threads.
class RealFft {
 public:
  static const RealFft &Get(std::size_t n);

  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Unnormalized forward transform: X[k] = sum_n x[n] e^{-2 pi i k n / N}.
  void Forward(std::span<const double> in, std::span<Complex> out) const;
  // Inverse including the 1/N factor.
  void Inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  explicit RealFft(std::size_t n);

  std::size_t n_;
  void *forward_plan_;
  void *inverse_plan_;
};

std::size_t NextPow2(std::size_t n);

// Full linear convolution via FFT; length a.size() + b.size() - 1.
std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b);

}  // namespace rss
