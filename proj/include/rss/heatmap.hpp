#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rss/metrics.hpp"
#include "rss/roomsim.hpp"

namespace rss {

// Single-source Decay map over the horizontal plane of a room.
struct HeatmapConfig {
  RoomSpec room{{5.0, 5.0, 3.0}, 0.3};
  ArrayGeometry geometry = PaperLinear8();
  ArrayPose array_pose{{2.5, 2.5, 1.5}, 0.0};
  std::vector<Region> regions = PaperRegions();
  double grid_step = 0.2;
  double wall_margin = 0.2;
  double source_height = 1.5;
  double duration_s = 1.0;
  std::uint64_t seed = 0;
  // Oracle masks count the mirror of each region across the array axis as
  // in-region by default, matching what a linear array perceives.
  PipelineConfig pipeline{MaskKind::kOracle, "", RegionTest::kArrayPerceived};
};

nlohmann::json HeatmapConfigToJson(const HeatmapConfig &cfg);
HeatmapConfig HeatmapConfigFromJson(const nlohmann::json &j);

struct HeatmapResult {
  std::vector<double> xs, ys;             // grid coordinates (m)
  RealPlane decay;                        // [ys][xs], min over regions
  std::vector<RealPlane> region_decay;    // per region, same layout
  RealPlane azimuth, distance;            // array-polar coordinates per cell
};

// Grid points run from wall_margin to dim - wall_margin in grid_step steps.
std::vector<double> GridAxis(double extent, double margin, double step);

HeatmapResult RunHeatmap(const HeatmapConfig &cfg);

// heatmap.csv (rows = y, columns = x), heatmap.pgm (P2, dark = low Decay,
// top row = largest y) and heatmap.json (axes and per-cell records).
void WriteHeatmap(const HeatmapResult &result, const HeatmapConfig &cfg,
                  const std::filesystem::path &dir);

}  // namespace rss
