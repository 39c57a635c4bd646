#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "rss/audio.hpp"
#include "rss/geometry.hpp"

namespace rss {

struct RoomSpec {
  Vec3 dims{5, 4, 3};
  double t60 = 0;     // seconds, 0 = anechoic
  int max_order = -1;  // -1: all images arriving within the RIR length

  double Volume() const { return dims.x * dims.y * dims.z; }
  double SurfaceArea() const {
    return 2 * (dims.x * dims.y + dims.y * dims.z + dims.x * dims.z);
  }
};

inline constexpr double kWallMargin = 0.1;
inline constexpr int kSincTaps = 16;
inline constexpr double kRirHighPassHz = 80.0;  // reverberant RIRs only

// Uniform pressure reflection coefficient from the Eyring relation
// 1 - alpha = exp(-24 ln10 V / (c S T60)). 0 when anechoic.
double EyringReflectionCoefficient(const RoomSpec &room);

// Reflection coefficient used by SimulateRir: the value whose image-source
// energy decay, fitted like a measured RIR, gives the requested T60. A
// shoebox with uniform walls decays slower than Eyring predicts since paths
// close to an axis meet few walls, so this is below the Eyring value.
// Falls back to the Eyring value when no coefficient reaches the target
// (very short T60 in a large room). Cached per (dims, t60). 0 when anechoic.
double ReflectionCoefficient(const RoomSpec &room);

// T60 from an energy envelope sampled every `dt` seconds: Schroeder
// backward integral, line fit over -5..-25 dB, extrapolated to -60 dB.
// 0 when the curve never spans that range.
double DecayTimeFromEnergy(std::span<const double> energy, double dt);

// Number of RIR samples simulated for `room` at sample rate `sr`: the
// requested T60 plus the longest direct path and the interpolation kernel.
std::size_t RirLength(const RoomSpec &room, const Vec3 &src,
                      std::span<const Vec3> mics, double sr = kSampleRate);

// Image-source impulse responses, one per microphone. Arrivals are rendered
// with a 16-tap Hann-windowed sinc; each image contributes
// beta^order / (4 pi r). Reverberant responses are then high-passed at
// kRirHighPassHz; anechoic ones are left as pure delayed pulses.
std::vector<Signal> SimulateRir(const RoomSpec &room, const Vec3 &src,
                                std::span<const Vec3> mics,
                                double sr = kSampleRate);

bool InsideRoom(const RoomSpec &room, const Vec3 &p, double margin);

// Convolves a dry source with per-microphone RIRs, truncated to the source
// length.
MultichannelAudio RenderSource(std::span<const double> dry,
                               const std::vector<Signal> &rirs,
                               double sr = kSampleRate);

nlohmann::json RoomToJson(const RoomSpec &room);
RoomSpec RoomFromJson(const nlohmann::json &j);

}  // namespace rss
