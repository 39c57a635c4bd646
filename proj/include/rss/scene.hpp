#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rss/audio.hpp"
#include "rss/geometry.hpp"
#include "rss/roomsim.hpp"
#include "rss/signals.hpp"

namespace rss {

// Interferer taxonomy relative to the target region:
//   interf_a  same azimuth range, beyond the distance bound
//   interf_b  within the distance bound, outside every azimuth range
//   interf_c  outside both
// co_target is a second speaker inside the target region.
enum class SourceRole {
  kTarget,
  kCoTarget,
  kInterfA,
  kInterfB,
  kInterfC,
  kPointNoise,
};

const char *ToString(SourceRole role);
SourceRole RoleFromString(const std::string &s);

inline constexpr double kInterfDistanceBuffer = 0.2;  // m beyond the bound
inline constexpr double kInterfAzimuthMargin = 10.0;  // deg outside intervals
inline constexpr double kMinSourceDistance = 0.5;     // m from the centroid
inline constexpr double kPlacementWallMargin = 0.2;
inline constexpr int kMaxPlacementAttempts = 1000;

struct SourceSpec {
  SourceRole role = SourceRole::kTarget;
  std::string wav_path;           // empty: synthetic signal
  std::optional<Vec3> position;   // empty: sampled from the role constraint
  std::optional<double> level_db; // SIR (speech) or SNR (noise) vs target
};

struct SceneSpec {
  RoomSpec room;
  ArrayGeometry geometry = PaperLinear8();
  ArrayPose array_pose;
  std::vector<Region> regions = PaperRegions();
  std::size_t target_region = 0;  // region the target is drawn from
  std::vector<SourceSpec> sources;
  double duration_s = 3.0;
  double source_height = 1.5;
  std::pair<double, double> sir_range{-5.0, 5.0};
  std::pair<double, double> snr_range{5.0, 20.0};
  std::uint64_t seed = 0;
};

nlohmann::json SceneSpecToJson(const SceneSpec &spec);
SceneSpec SceneSpecFromJson(const nlohmann::json &j);

struct SourceTruth {
  SourceRole role = SourceRole::kTarget;
  Vec3 position;
  double azimuth_deg = 0;
  double distance = 0;
  double level_db = 0;
  std::vector<bool> in_region;  // one flag per scene region
};

struct SceneTruth {
  MultichannelAudio mixture;
  std::vector<MultichannelAudio> source_images;  // speech sources
  std::vector<SourceTruth> sources;              // parallel to source_images
  MultichannelAudio noise_image;                 // zeros without noise
  std::optional<SourceTruth> noise;
  SceneSpec spec;  // with every position and level resolved

  nlohmann::json Metadata() const;
  // Number of speech sources inside `region_index`.
  std::size_t CountInRegion(std::size_t region_index) const;
};

// Uniform draw from the admissible set for `role` (target and co_target use
// a uniform distance in [0.5, bound]). Throws kInfeasible after 1000 misses.
Vec3 SamplePosition(SourceRole role, const SceneSpec &spec, Rng &rng);

SceneTruth SynthesizeScene(const SceneSpec &spec);

// Directory layout: mixture.wav, src_<n>.wav, noise.wav, meta.json.
void WriteSceneDir(const SceneTruth &truth, const std::filesystem::path &dir);
SceneTruth ReadSceneDir(const std::filesystem::path &dir);

// Per-source region labels computed from positions, for validation.
std::vector<bool> RegionLabels(const SceneSpec &spec, const Vec3 &position);

}  // namespace rss
