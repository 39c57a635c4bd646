#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rss {

inline constexpr double kSpeedOfSound = 343.0;  // m/s at 20 C
inline constexpr double kSampleRate = 16000.0;
inline constexpr double kDefaultSteerDistance = 100.0;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3 &) const = default;
  double Norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double Distance(const Vec3 &a, const Vec3 &b) { return (a - b).Norm(); }

double DegToRad(double deg);
double RadToDeg(double rad);
// Wraps any finite angle into [0, 360).
double NormalizeAzimuth(double deg);

// Placement of an array in room coordinates: the array's local frame is
// rotated by yaw about z and its centroid moved to `position`.
struct ArrayPose {
  Vec3 position;
  double yaw_deg = 0;
};

// Microphone positions in the array's local frame, in meters.
class ArrayGeometry {
 public:
  ArrayGeometry() = default;
  ArrayGeometry(std::vector<Vec3> mics, std::size_t ref_index = 0);

  std::size_t num_mics() const { return mics_.size(); }
  std::size_t ref_index() const { return ref_; }
  const std::vector<Vec3> &positions() const { return mics_; }
  const Vec3 &mic(std::size_t i) const { return mics_.at(i); }

  Vec3 Centroid() const;
  // Largest pairwise microphone distance.
  double Aperture() const;
  // True when all microphones lie on one line.
  bool IsLinear() const;
  // Azimuth of the array axis in the local frame, in [0, 180). Only
  // meaningful for linear arrays.
  double AxisAzimuth() const;

  // Microphone positions in room coordinates.
  std::vector<Vec3> Posed(const ArrayPose &pose) const;

 private:
  std::vector<Vec3> mics_;
  std::size_t ref_ = 0;
};

// Uniform linear array along local x, centered on the origin.
ArrayGeometry LinearArray(std::size_t num_mics, double aperture,
                          std::size_t ref_index = 0);
// 8 microphones, 0.38 m end to end, reference at index 0.
ArrayGeometry PaperLinear8();

// Azimuth interval (degrees, closed) and distance band (meters, closed)
// relative to the array.
class Region {
 public:
  Region() = default;
  Region(double azimuth_min, double azimuth_max, double max_distance,
         double min_distance = 0.0);

  double azimuth_min() const { return az_min_; }
  double azimuth_max() const { return az_max_; }
  double max_distance() const { return max_d_; }
  double min_distance() const { return min_d_; }
  double CenterAzimuth() const { return 0.5 * (az_min_ + az_max_); }

  bool ContainsAzimuth(double azimuth_deg) const;
  bool Contains(double azimuth_deg, double distance) const;
  // Angular distance in degrees from `azimuth_deg` to the interval; 0 inside.
  double AzimuthGap(double azimuth_deg) const;

 private:
  double az_min_ = 0, az_max_ = 0, max_d_ = 1, min_d_ = 0;
};

std::vector<Region> PaperRegions();

struct SteeringDelays {
  std::vector<int> shifts;
  double angle_deg = 0;
  double sample_rate = kSampleRate;

  int MinShift() const;
  int MaxShift() const;
};

// Integer alignment shifts toward azimuth `angle_deg`:
//   shift_i = floor((d_ref(p) - d_i(p)) * sr / c)
// with p the point `steer_distance` meters from the centroid along the
// azimuth, in the horizontal plane through the centroid.
SteeringDelays ComputeDelays(const ArrayGeometry &geom, double angle_deg,
                             double sample_rate = kSampleRate,
                             double steer_distance = kDefaultSteerDistance);

// Source azimuth (degrees, array frame) and horizontal distance from the
// array centroid.
struct Polar {
  double azimuth_deg = 0;
  double distance = 0;
};
Polar ToArrayPolar(const ArrayPose &pose, double x, double y);
// Inverse of ToArrayPolar, at height z.
Vec3 FromArrayPolar(const ArrayPose &pose, double azimuth_deg, double distance,
                    double z);

bool InRegion(const Region &region, double source_x, double source_y,
              const ArrayPose &pose);

// Region membership as a linear array perceives it: a linear array cannot
// tell an azimuth from its mirror image across the array axis, so the
// mirrored interval also counts. Falls back to InRegion otherwise.
bool InPerceivedRegion(const Region &region, double source_x, double source_y,
                       const ArrayPose &pose, const ArrayGeometry &geom);

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

PairList AllPairs(std::size_t num_mics);
// (0, M-1), (1, M-2), ... for a linear array.
PairList SymmetricPairs(std::size_t num_mics);
// Throws unless every pair is in range, i < j, and unique.
void ValidatePairs(const PairList &pairs, std::size_t num_mics);

ArrayGeometry GeometryFromJson(const nlohmann::json &j);
nlohmann::json GeometryToJson(const ArrayGeometry &geom);
Region RegionFromJson(const nlohmann::json &j);
nlohmann::json RegionToJson(const Region &region);
nlohmann::json Vec3ToJson(const Vec3 &v);
Vec3 Vec3FromJson(const nlohmann::json &j);

}  // namespace rss
