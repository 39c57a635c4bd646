#include "rss/roomsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rss/error.hpp"
#include "rss/fft.hpp"

namespace rss {

double EyringReflectionCoefficient(const RoomSpec &room) {
  if (room.t60 <= 0) return 0.0;
  const double k = 24.0 * std::log(10.0) * room.Volume() /
                   (kSpeedOfSound * room.SurfaceArea() * room.t60);
  // beta = sqrt(1 - alpha)
  return std::exp(-0.5 * k);
}

double DecayTimeFromEnergy(std::span<const double> energy, double dt) {
  std::vector<double> edc(energy.size());
  double acc = 0;
  for (std::size_t n = energy.size(); n-- > 0;) {
    acc += energy[n];
    edc[n] = acc;
  }
  if (energy.empty() || acc <= 0) return 0.0;
  double st = 0, sd = 0, stt = 0, std_ = 0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < edc.size(); ++n) {
    if (edc[n] <= 0) break;
    const double level = 10 * std::log10(edc[n] / acc);
    if (level > -5 || level < -25) continue;
    const double t = static_cast<double>(n) * dt;
    st += t;
    sd += level;
    stt += t * t;
    std_ += t * level;
    ++count;
  }
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  const double slope = (std_ - st * sd / c) / (stt - st * st / c);
  return slope < 0 ? -60.0 / slope : 0.0;
}

namespace {

// Image energy 1/r^2 binned by arrival time and reflection order,
// for two fixed source/receiver pairs spread through the room.
struct OrderHistogram {
  double dt = 1e-3;  // at most; shorter for small T60
  std::vector<std::vector<double>> by_order;  // [order][bin]

  std::vector<double> Envelope(double beta) const {
    // The direct path is left out: with few reflections it would dominate
    // the -5..-25 dB fit and make the decay time meaningless.
    std::vector<double> e(by_order.empty() ? 0 : by_order[0].size(), 0.0);
    double w = 1.0;
    for (std::size_t o = 1; o < by_order.size(); ++o) {
      w *= beta * beta;
      for (std::size_t b = 0; b < e.size(); ++b) e[b] += w * by_order[o][b];
    }
    return e;
  }
};

OrderHistogram BuildHistogram(const RoomSpec &room) {
  const Vec3 &L = room.dims;
  const std::pair<Vec3, Vec3> pairs[] = {
      {{0.31 * L.x, 0.42 * L.y, 0.47 * L.z}, {0.68 * L.x, 0.59 * L.y, 0.52 * L.z}},
      {{0.22 * L.x, 0.71 * L.y, 0.38 * L.z}, {0.57 * L.x, 0.27 * L.y, 0.61 * L.z}},
  };
  OrderHistogram h;
  h.dt = std::min(1e-3, room.t60 / 200);
  const double horizon = room.t60 + std::sqrt(L.x * L.x + L.y * L.y + L.z * L.z) /
                                        kSpeedOfSound;
  const std::size_t bins = static_cast<std::size_t>(std::ceil(horizon / h.dt));
  const double max_dist = horizon * kSpeedOfSound;
  const int nx = static_cast<int>(std::ceil(max_dist / (2 * L.x))) + 1;
  const int ny = static_cast<int>(std::ceil(max_dist / (2 * L.y))) + 1;
  const int nz = static_cast<int>(std::ceil(max_dist / (2 * L.z))) + 1;
  h.by_order.assign(static_cast<std::size_t>(2 * (nx + ny + nz) + 4),
                    std::vector<double>(bins, 0.0));
  for (const auto &[src, mic] : pairs)
    for (int x = -nx; x <= nx; ++x)
      for (int q = 0; q <= 1; ++q) {
        const double dx = (1 - 2 * q) * src.x + 2 * x * L.x - mic.x;
        if (std::abs(dx) > max_dist) continue;
        for (int y = -ny; y <= ny; ++y)
          for (int j = 0; j <= 1; ++j) {
            const double dy = (1 - 2 * j) * src.y + 2 * y * L.y - mic.y;
            if (dx * dx + dy * dy > max_dist * max_dist) continue;
            for (int z = -nz; z <= nz; ++z)
              for (int k = 0; k <= 1; ++k) {
                const double dz = (1 - 2 * k) * src.z + 2 * z * L.z - mic.z;
                const double r2 = dx * dx + dy * dy + dz * dz;
                const std::size_t b = static_cast<std::size_t>(
                    std::sqrt(r2) / kSpeedOfSound / h.dt);
                if (b >= bins) continue;
                const int order =
                    std::abs(2 * x - q) + std::abs(2 * y - j) + std::abs(2 * z - k);
                h.by_order[static_cast<std::size_t>(order)][b] += 1.0 / r2;
              }
          }
      }
  while (!h.by_order.empty() &&
         std::all_of(h.by_order.back().begin(), h.by_order.back().end(),
                     [](double v) { return v == 0.0; }))
    h.by_order.pop_back();
  return h;
}

double CalibrateBeta(const RoomSpec &room) {
  const OrderHistogram h = BuildHistogram(room);
  auto decay = [&](double beta) { return DecayTimeFromEnergy(h.Envelope(beta), h.dt); };
  // The image-source decay is never faster than Eyring, so the answer lies
  // below the Eyring value. Half of it bounds the search from below; very
  // short T60 in a large room can fail even there, since the first
  // reflections alone spread over longer than the target.
  const double eyring = EyringReflectionCoefficient(room);
  double lo = 0.5 * eyring, hi = eyring;
  if (decay(hi) <= room.t60 || decay(lo) >= room.t60) return eyring;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (decay(mid) < room.t60)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ReflectionCoefficient(const RoomSpec &room) {
  if (room.t60 <= 0) return 0.0;
  static std::mutex mu;
  static std::map<std::tuple<double, double, double, double>, double> cache;
  const auto key = std::make_tuple(room.dims.x, room.dims.y, room.dims.z, room.t60);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double beta = CalibrateBeta(room);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, beta);
  return beta;
}

bool InsideRoom(const RoomSpec &room, const Vec3 &p, double margin) {
  return p.x >= margin && p.x <= room.dims.x - margin && p.y >= margin &&
         p.y <= room.dims.y - margin && p.z >= margin &&
         p.z <= room.dims.z - margin;
}

std::size_t RirLength(const RoomSpec &room, const Vec3 &src,
                      std::span<const Vec3> mics, double sr) {
  double direct = 0;
  for (const auto &m : mics) direct = std::max(direct, Distance(src, m));
  const double direct_samples = direct * sr / kSpeedOfSound;
  const double tail = room.t60 > 0 ? room.t60 * sr : 0.0;
  return static_cast<std::size_t>(std::ceil(direct_samples + tail)) +
         kSincTaps + 1;
}

namespace {

void ValidateRoom(const RoomSpec &room) {
  Require(room.dims.x > 0 && room.dims.y > 0 && room.dims.z > 0,
          "room dimensions must be positive");
  Require(room.t60 >= 0 && std::isfinite(room.t60), "t60 must be >= 0");
}

// Dense image arrivals all carry positive gain, so their sum builds up a
// near-DC component that decays slower than the image energy. A 2nd-order
// Butterworth high-pass removes it, as in the classic image method.
void HighPass(Signal &h, double fc, double sr) {
  const double k = std::tan(kPi * fc / sr);
  const double q = std::sqrt(2.0);
  const double norm = 1.0 / (1.0 + q * k + k * k);
  const double b0 = norm, b1 = -2.0 * norm, b2 = norm;
  const double a1 = 2.0 * (k * k - 1.0) * norm;
  const double a2 = (1.0 - q * k + k * k) * norm;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (double &v : h) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

// Adds one band-limited arrival at fractional delay `tau` (samples).
void AddArrival(std::vector<double> &h, double tau, double gain,
                std::span<const double> cos_table,
                std::span<const double> sin_table) {
  const double whole = std::floor(tau);
  const double frac = tau - whole;
  const long start = static_cast<long>(whole) - kSincTaps / 2 + 1;
  // Window argument 2 pi (n + 1 - frac) / taps, split into a tabulated part
  // and a per-arrival rotation.
  const double b = 2.0 * kPi * frac / kSincTaps;
  const double cb = std::cos(b), sb = std::sin(b);
  const double s = std::sin(kPi * frac);
  for (int n = 0; n < kSincTaps; ++n) {
    const long pos = start + n;
    if (pos < 0 || pos >= static_cast<long>(h.size())) continue;
    const double t = static_cast<double>(n + 1 - kSincTaps / 2) - frac;
    double sinc;
    if (std::fabs(t) < 1e-12) {
      sinc = 1.0;
    } else {
      // sin(pi (m - frac)) = -(-1)^m sin(pi frac) for integer m.
      const int m = n + 1 - kSincTaps / 2;
      const double num = (m % 2 == 0) ? -s : s;
      sinc = num / (kPi * t);
    }
    const double window = 0.5 * (1.0 - (cos_table[n] * cb + sin_table[n] * sb));
    h[static_cast<std::size_t>(pos)] += gain * window * sinc;
  }
}

}  // namespace

std::vector<Signal> SimulateRir(const RoomSpec &room, const Vec3 &src,
                                std::span<const Vec3> mics, double sr) {
  ValidateRoom(room);
  Require(sr > 0, "sample rate must be positive");
  Require(InsideRoom(room, src, kWallMargin),
          "source lies outside the room or within 0.1 m of a wall",
          ErrorCode::kData);
  for (const auto &m : mics)
    Require(InsideRoom(room, m, kWallMargin),
            "microphone lies outside the room or within 0.1 m of a wall",
            ErrorCode::kData);

  const std::size_t len = RirLength(room, src, mics, sr);
  std::vector<Signal> rirs(mics.size(), Signal(len, 0.0));
  const double beta = ReflectionCoefficient(room);
  const double samples_per_meter = sr / kSpeedOfSound;
  const double max_dist = static_cast<double>(len) / samples_per_meter;

  std::vector<double> cos_table(kSincTaps), sin_table(kSincTaps);
  for (int n = 0; n < kSincTaps; ++n) {
    const double a = 2.0 * kPi * (n + 1) / kSincTaps;
    cos_table[n] = std::cos(a);
    sin_table[n] = std::sin(a);
  }

  if (beta == 0.0 || room.max_order == 0) {
    for (std::size_t m = 0; m < mics.size(); ++m) {
      const double r = Distance(src, mics[m]);
      AddArrival(rirs[m], r * samples_per_meter, 1.0 / (4 * kPi * r),
                 cos_table, sin_table);
    }
    return rirs;
  }

  const Vec3 &L = room.dims;
  const int nx = static_cast<int>(std::ceil(max_dist / (2 * L.x))) + 1;
  const int ny = static_cast<int>(std::ceil(max_dist / (2 * L.y))) + 1;
  const int nz = static_cast<int>(std::ceil(max_dist / (2 * L.z))) + 1;
  const int max_order_bound = 2 * (nx + ny + nz) + 3;
  std::vector<double> beta_pow(static_cast<std::size_t>(max_order_bound) + 1);
  beta_pow[0] = 1.0;
  for (std::size_t i = 1; i < beta_pow.size(); ++i)
    beta_pow[i] = beta_pow[i - 1] * beta;

  // Microphone bounding box, to skip lattice cells that cannot arrive in time.
  Vec3 lo = mics[0], hi = mics[0];
  for (const auto &m : mics) {
    lo = {std::min(lo.x, m.x), std::min(lo.y, m.y), std::min(lo.z, m.z)};
    hi = {std::max(hi.x, m.x), std::max(hi.y, m.y), std::max(hi.z, m.z)};
  }
  auto axis_gap = [](double v, double a, double b) {
    return v < a ? a - v : (v > b ? v - b : 0.0);
  };

  for (int x = -nx; x <= nx; ++x) {
    for (int q = 0; q <= 1; ++q) {
      const double ix = (1 - 2 * q) * src.x + 2 * x * L.x;
      const int ox = std::abs(2 * x - q);
      const double gx = axis_gap(ix, lo.x, hi.x);
      if (gx > max_dist) continue;
      for (int y = -ny; y <= ny; ++y) {
        for (int j = 0; j <= 1; ++j) {
          const double iy = (1 - 2 * j) * src.y + 2 * y * L.y;
          const int oy = std::abs(2 * y - j);
          const double gy = axis_gap(iy, lo.y, hi.y);
          if (gx * gx + gy * gy > max_dist * max_dist) continue;
          for (int z = -nz; z <= nz; ++z) {
            for (int k = 0; k <= 1; ++k) {
              const double iz = (1 - 2 * k) * src.z + 2 * z * L.z;
              const int order = ox + oy + std::abs(2 * z - k);
              if (room.max_order >= 0 && order > room.max_order) continue;
              const double gz = axis_gap(iz, lo.z, hi.z);
              if (gx * gx + gy * gy + gz * gz > max_dist * max_dist) continue;
              const double refl = beta_pow[static_cast<std::size_t>(order)];
              for (std::size_t m = 0; m < mics.size(); ++m) {
                const double dx = ix - mics[m].x, dy = iy - mics[m].y,
                             dz = iz - mics[m].z;
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (r >= max_dist) continue;
                AddArrival(rirs[m], r * samples_per_meter,
                           refl / (4 * kPi * r), cos_table, sin_table);
              }
            }
          }
        }
      }
    }
  }
  for (Signal &h : rirs) HighPass(h, kRirHighPassHz, sr);
  return rirs;
}

MultichannelAudio RenderSource(std::span<const double> dry,
                               const std::vector<Signal> &rirs, double sr) {
  std::vector<Signal> out;
  out.reserve(rirs.size());
  for (const auto &h : rirs) {
    Signal y = FftConvolve(dry, h);
    y.resize(dry.size());
    out.push_back(std::move(y));
  }
  return MultichannelAudio(std::move(out), sr);
}

nlohmann::json RoomToJson(const RoomSpec &room) {
  return {{"dims", Vec3ToJson(room.dims)},
          {"t60", room.t60},
          {"max_order", room.max_order}};
}

RoomSpec RoomFromJson(const nlohmann::json &j) {
  RoomSpec r;
  r.dims = Vec3FromJson(j.at("dims"));
  r.t60 = j.value("t60", 0.0);
  r.max_order = j.value("max_order", -1);
  ValidateRoom(r);
  return r;
}

}  // namespace rss
