#include "rss/geometry.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "rss/error.hpp"

namespace rss {

double DegToRad(double deg) { return deg * kPi / 180.0; }
double RadToDeg(double rad) { return rad * 180.0 / kPi; }

double NormalizeAzimuth(double deg) {
  Require(std::isfinite(deg), "azimuth must be finite");
  double a = std::fmod(deg, 360.0);
  if (a < 0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

ArrayGeometry::ArrayGeometry(std::vector<Vec3> mics, std::size_t ref_index)
    : mics_(std::move(mics)), ref_(ref_index) {
  Require(mics_.size() >= 2, "array needs at least 2 microphones");
  Require(ref_ < mics_.size(), "reference index " + std::to_string(ref_) +
                                   " out of range");
  for (const auto &m : mics_)
    Require(std::isfinite(m.x) && std::isfinite(m.y) && std::isfinite(m.z),
            "microphone positions must be finite");
  for (std::size_t i = 0; i < mics_.size(); ++i)
    for (std::size_t j = i + 1; j < mics_.size(); ++j)
      Require(Distance(mics_[i], mics_[j]) > 1e-6,
              "microphones " + std::to_string(i) + " and " +
                  std::to_string(j) + " coincide");
}

Vec3 ArrayGeometry::Centroid() const {
  Vec3 c;
  for (const auto &m : mics_) c = c + m;
  return c * (1.0 / static_cast<double>(mics_.size()));
}

double ArrayGeometry::Aperture() const {
  double a = 0;
  for (std::size_t i = 0; i < mics_.size(); ++i)
    for (std::size_t j = i + 1; j < mics_.size(); ++j)
      a = std::max(a, Distance(mics_[i], mics_[j]));
  return a;
}

namespace {

std::pair<std::size_t, std::size_t> FarthestPair(const std::vector<Vec3> &m) {
  std::pair<std::size_t, std::size_t> best{0, 1};
  double d = -1;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (Distance(m[i], m[j]) > d) {
        d = Distance(m[i], m[j]);
        best = {i, j};
      }
  return best;
}

}  // namespace

bool ArrayGeometry::IsLinear() const {
  auto [a, b] = FarthestPair(mics_);
  Vec3 u = mics_[b] - mics_[a];
  u = u * (1.0 / u.Norm());
  for (const auto &m : mics_) {
    Vec3 r = m - mics_[a];
    double along = r.x * u.x + r.y * u.y + r.z * u.z;
    Vec3 perp = r - u * along;
    if (perp.Norm() > 1e-6) return false;
  }
  return true;
}

double ArrayGeometry::AxisAzimuth() const {
  auto [a, b] = FarthestPair(mics_);
  Vec3 u = mics_[b] - mics_[a];
  double az = NormalizeAzimuth(RadToDeg(std::atan2(u.y, u.x)));
  return az >= 180.0 ? az - 180.0 : az;
}

std::vector<Vec3> ArrayGeometry::Posed(const ArrayPose &pose) const {
  const Vec3 c = Centroid();
  const double yaw = DegToRad(pose.yaw_deg);
  const double cs = std::cos(yaw), sn = std::sin(yaw);
  std::vector<Vec3> out;
  out.reserve(mics_.size());
  for (const auto &m : mics_) {
    Vec3 r = m - c;
    out.push_back({pose.position.x + cs * r.x - sn * r.y,
                   pose.position.y + sn * r.x + cs * r.y,
                   pose.position.z + r.z});
  }
  return out;
}

ArrayGeometry LinearArray(std::size_t num_mics, double aperture,
                          std::size_t ref_index) {
  Require(num_mics >= 2, "linear array needs at least 2 microphones");
  Require(aperture > 0, "aperture must be positive");
  std::vector<Vec3> mics(num_mics);
  const double step = aperture / static_cast<double>(num_mics - 1);
  for (std::size_t i = 0; i < num_mics; ++i)
    mics[i] = {-0.5 * aperture + step * static_cast<double>(i), 0.0, 0.0};
  return ArrayGeometry(std::move(mics), ref_index);
}

ArrayGeometry PaperLinear8() { return LinearArray(8, 0.38, 0); }

Region::Region(double azimuth_min, double azimuth_max, double max_distance,
               double min_distance)
    : az_min_(NormalizeAzimuth(azimuth_min)),
      az_max_(NormalizeAzimuth(azimuth_max)),
      max_d_(max_distance),
      min_d_(min_distance) {
  Require(az_min_ < az_max_, "region azimuth_min must be below azimuth_max");
  Require(min_d_ >= 0, "region min_distance must be >= 0");
  Require(max_d_ > 0 && min_d_ < max_d_,
          "region needs 0 <= min_distance < max_distance");
}

bool Region::ContainsAzimuth(double azimuth_deg) const {
  const double a = NormalizeAzimuth(azimuth_deg);
  return a >= az_min_ && a <= az_max_;
}

bool Region::Contains(double azimuth_deg, double distance) const {
  return ContainsAzimuth(azimuth_deg) && distance >= min_d_ &&
         distance <= max_d_;
}

double Region::AzimuthGap(double azimuth_deg) const {
  const double a = NormalizeAzimuth(azimuth_deg);
  if (a >= az_min_ && a <= az_max_) return 0.0;
  auto circ = [](double u, double v) {
    double d = std::fabs(u - v);
    return std::min(d, 360.0 - d);
  };
  return std::min(circ(a, az_min_), circ(a, az_max_));
}

std::vector<Region> PaperRegions() {
  return {Region(70, 80, 1.8), Region(100, 110, 1.8)};
}

int SteeringDelays::MinShift() const {
  return shifts.empty() ? 0 : *std::min_element(shifts.begin(), shifts.end());
}

int SteeringDelays::MaxShift() const {
  return shifts.empty() ? 0 : *std::max_element(shifts.begin(), shifts.end());
}

SteeringDelays ComputeDelays(const ArrayGeometry &geom, double angle_deg,
                             double sample_rate, double steer_distance) {
  Require(sample_rate > 0, "sample rate must be positive");
  Require(std::isfinite(angle_deg), "steering angle must be finite");
  const double angle = NormalizeAzimuth(angle_deg);
  Require(steer_distance > geom.Aperture(),
          "far-field violation: steer distance " +
              std::to_string(steer_distance) + " m does not exceed aperture " +
              std::to_string(geom.Aperture()) + " m");

  const Vec3 c = geom.Centroid();
  const double rad = DegToRad(angle);
  const Vec3 p{c.x + steer_distance * std::cos(rad),
               c.y + steer_distance * std::sin(rad), c.z};
  const double d_ref = Distance(p, geom.mic(geom.ref_index()));
  const double bound = 10.0 * sample_rate / kSpeedOfSound;

  SteeringDelays out;
  out.angle_deg = angle;
  out.sample_rate = sample_rate;
  out.shifts.resize(geom.num_mics());
  for (std::size_t i = 0; i < geom.num_mics(); ++i) {
    const double v = (d_ref - Distance(p, geom.mic(i))) * sample_rate /
                     kSpeedOfSound;
    // The guard keeps exact integers from flooring one sample low after
    // rounding in the distance difference.
    const double s = std::floor(v + 1e-9);
    Require(std::fabs(s) < bound, "steering shift exceeds sanity bound");
    out.shifts[i] = static_cast<int>(s);
  }
  out.shifts[geom.ref_index()] = 0;
  return out;
}

Polar ToArrayPolar(const ArrayPose &pose, double x, double y) {
  const double dx = x - pose.position.x, dy = y - pose.position.y;
  Polar p;
  p.distance = std::hypot(dx, dy);
  p.azimuth_deg =
      p.distance > 0 ? NormalizeAzimuth(RadToDeg(std::atan2(dy, dx)) -
                                        pose.yaw_deg)
                     : 0.0;
  return p;
}

Vec3 FromArrayPolar(const ArrayPose &pose, double azimuth_deg, double distance,
                    double z) {
  const double a = DegToRad(azimuth_deg + pose.yaw_deg);
  return {pose.position.x + distance * std::cos(a),
          pose.position.y + distance * std::sin(a), z};
}

bool InRegion(const Region &region, double source_x, double source_y,
              const ArrayPose &pose) {
  const Polar p = ToArrayPolar(pose, source_x, source_y);
  if (p.distance <= 0) return false;
  return region.Contains(p.azimuth_deg, p.distance);
}

bool InPerceivedRegion(const Region &region, double source_x, double source_y,
                       const ArrayPose &pose, const ArrayGeometry &geom) {
  if (InRegion(region, source_x, source_y, pose)) return true;
  if (!geom.IsLinear()) return false;
  const Polar p = ToArrayPolar(pose, source_x, source_y);
  if (p.distance <= 0) return false;
  const double mirrored = NormalizeAzimuth(2.0 * geom.AxisAzimuth() -
                                           p.azimuth_deg);
  return region.Contains(mirrored, p.distance);
}

PairList AllPairs(std::size_t num_mics) {
  PairList pairs;
  for (std::size_t i = 0; i < num_mics; ++i)
    for (std::size_t j = i + 1; j < num_mics; ++j) pairs.emplace_back(i, j);
  return pairs;
}

PairList SymmetricPairs(std::size_t num_mics) {
  PairList pairs;
  for (std::size_t i = 0; i < num_mics / 2; ++i)
    pairs.emplace_back(i, num_mics - 1 - i);
  return pairs;
}

void ValidatePairs(const PairList &pairs, std::size_t num_mics) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto &[i, j] : pairs) {
    Require(i < num_mics && j < num_mics,
            "pair (" + std::to_string(i) + "," + std::to_string(j) +
                ") out of range");
    Require(i != j, "pair uses the same microphone twice");
    Require(i < j, "pairs must be ordered with i < j");
    Require(seen.insert({i, j}).second,
            "duplicate pair (" + std::to_string(i) + "," + std::to_string(j) +
                ")");
  }
}

nlohmann::json Vec3ToJson(const Vec3 &v) { return {v.x, v.y, v.z}; }

Vec3 Vec3FromJson(const nlohmann::json &j) {
  Require(j.is_array() && (j.size() == 3 || j.size() == 2),
          "expected a 2- or 3-element coordinate");
  return {j[0].get<double>(), j[1].get<double>(),
          j.size() == 3 ? j[2].get<double>() : 0.0};
}

ArrayGeometry GeometryFromJson(const nlohmann::json &j) {
  Require(j.is_object() && j.contains("mics"),
          "geometry JSON needs a \"mics\" array");
  std::vector<Vec3> mics;
  for (const auto &m : j.at("mics")) mics.push_back(Vec3FromJson(m));
  return ArrayGeometry(std::move(mics), j.value("ref", std::size_t{0}));
}

nlohmann::json GeometryToJson(const ArrayGeometry &geom) {
  nlohmann::json mics = nlohmann::json::array();
  for (const auto &m : geom.positions()) mics.push_back(Vec3ToJson(m));
  return {{"mics", mics}, {"ref", geom.ref_index()}};
}

Region RegionFromJson(const nlohmann::json &j) {
  Require(j.is_object() && j.contains("azimuth") && j.contains("max_distance"),
          "region JSON needs \"azimuth\" and \"max_distance\"");
  const auto &az = j.at("azimuth");
  Require(az.is_array() && az.size() == 2, "region azimuth must be [min,max]");
  return Region(az[0].get<double>(), az[1].get<double>(),
                j.at("max_distance").get<double>(),
                j.value("min_distance", 0.0));
}

nlohmann::json RegionToJson(const Region &r) {
  return {{"azimuth", {r.azimuth_min(), r.azimuth_max()}},
          {"max_distance", r.max_distance()},
          {"min_distance", r.min_distance()}};
}

}  // namespace rss
