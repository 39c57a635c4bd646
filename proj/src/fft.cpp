#include "rss/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "rss/error.hpp"

namespace rss {

namespace {

// FFTW's planner is not thread-safe; execution with new-array functions is.
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}

struct Scratch {
  double *real = nullptr;
  fftw_complex *spec = nullptr;
  explicit Scratch(std::size_t n)
      : real(fftw_alloc_real(n)), spec(fftw_alloc_complex(n / 2 + 1)) {}
  ~Scratch() {
    fftw_free(real);
    fftw_free(spec);
  }
  Scratch(const Scratch &) = delete;
  Scratch &operator=(const Scratch &) = delete;
};

Scratch &ScratchFor(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Scratch>> pool;
  auto &slot = pool[n];
  if (!slot) slot = std::make_unique<Scratch>(n);
  return *slot;
}

}  // namespace

const RealFft &RealFft::Get(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto &slot = cache[n];
  if (!slot) slot.reset(new RealFft(n));
  return *slot;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  Require(n >= 2 && n % 2 == 0, "FFT size must be even and >= 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  Scratch s(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), s.real, s.spec,
                                       FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), s.spec, s.real,
                                       FFTW_ESTIMATE);
  Require(forward_plan_ && inverse_plan_, "FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::Forward(std::span<const double> in, std::span<Complex> out) const {
  Require(in.size() == n_ && out.size() == bins(), "FFT buffer size mismatch");
  Scratch &s = ScratchFor(n_);
  std::copy(in.begin(), in.end(), s.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real, s.spec);
  const auto *src = reinterpret_cast<const Complex *>(s.spec);
  std::copy(src, src + bins(), out.begin());
}

void RealFft::Inverse(std::span<const Complex> in, std::span<double> out) const {
  Require(in.size() == bins() && out.size() == n_, "FFT buffer size mismatch");
  Scratch &s = ScratchFor(n_);
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex *>(s.spec));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), s.spec, s.real);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = s.real[i] * scale;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = std::max<std::size_t>(NextPow2(len), 2);
  const RealFft &fft = RealFft::Get(n);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<Complex> fa(fft.bins()), fb(fft.bins());
  fft.Forward(pa, fa);
  fft.Forward(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.Inverse(fa, pa);
  pa.resize(len);
  return pa;
}

}  // namespace rss
