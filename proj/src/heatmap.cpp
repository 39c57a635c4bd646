#include "rss/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rss/das.hpp"
#include "rss/error.hpp"
#include "rss/parallel.hpp"
#include "rss/scene.hpp"

namespace rss {

namespace {

constexpr double kPgmMaxDecayDb = 60.0;

}  // namespace

nlohmann::json HeatmapConfigToJson(const HeatmapConfig &cfg) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto &r : cfg.regions) regions.push_back(RegionToJson(r));
  return {{"room", RoomToJson(cfg.room)},
          {"array", GeometryToJson(cfg.geometry)},
          {"array_pose",
           {{"position", Vec3ToJson(cfg.array_pose.position)},
            {"yaw", cfg.array_pose.yaw_deg}}},
          {"regions", regions},
          {"grid_step", cfg.grid_step},
          {"wall_margin", cfg.wall_margin},
          {"source_height", cfg.source_height},
          {"duration", cfg.duration_s},
          {"seed", cfg.seed},
          {"mask", ToString(cfg.pipeline)},
          {"region_test", cfg.pipeline.region_test == RegionTest::kExact
                              ? "exact"
                              : "array_perceived"}};
}

HeatmapConfig HeatmapConfigFromJson(const nlohmann::json &j) {
  HeatmapConfig cfg;
  try {
    if (j.contains("room")) cfg.room = RoomFromJson(j["room"]);
    if (j.contains("t60")) cfg.room.t60 = j["t60"].get<double>();
    if (j.contains("array")) cfg.geometry = GeometryFromJson(j["array"]);
    if (j.contains("array_pose")) {
      cfg.array_pose.position = Vec3FromJson(j["array_pose"].at("position"));
      cfg.array_pose.yaw_deg = j["array_pose"].value("yaw", 0.0);
    }
    if (j.contains("regions")) {
      cfg.regions.clear();
      for (const auto &r : j["regions"]) cfg.regions.push_back(RegionFromJson(r));
    }
    cfg.grid_step = j.value("grid_step", cfg.grid_step);
    cfg.wall_margin = j.value("wall_margin", cfg.wall_margin);
    cfg.source_height = j.value("source_height", cfg.source_height);
    cfg.duration_s = j.value("duration", cfg.duration_s);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("mask")) {
      const RegionTest test = cfg.pipeline.region_test;
      cfg.pipeline = PipelineFromString(j["mask"].get<std::string>());
      cfg.pipeline.region_test = test;
    }
    if (j.contains("region_test")) {
      const auto t = j["region_test"].get<std::string>();
      Require(t == "exact" || t == "array_perceived",
              "region_test must be exact or array_perceived");
      cfg.pipeline.region_test =
          t == "exact" ? RegionTest::kExact : RegionTest::kArrayPerceived;
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kInvalidArgument, std::string("heatmap config: ") + e.what());
  }
  Require(cfg.grid_step > 0, "grid_step must be positive");
  Require(cfg.pipeline.mask != MaskKind::kFile,
          "heatmap supports oracle or passthrough masks");
  return cfg;
}

std::vector<double> GridAxis(double extent, double margin, double step) {
  Require(step > 0, "grid step must be positive");
  const double span = extent - 2 * margin;
  Require(span >= 0, "wall margin leaves no room for the grid");
  const auto n = static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i)
    axis[i] = margin + static_cast<double>(i) * step;
  return axis;
}

HeatmapResult RunHeatmap(const HeatmapConfig &cfg) {
  Require(!cfg.regions.empty(), "heatmap needs at least one region");
  HeatmapResult res;
  res.xs = GridAxis(cfg.room.dims.x, cfg.wall_margin, cfg.grid_step);
  res.ys = GridAxis(cfg.room.dims.y, cfg.wall_margin, cfg.grid_step);
  const std::size_t nx = res.xs.size(), ny = res.ys.size();
  res.decay = RealPlane(ny, nx);
  res.azimuth = RealPlane(ny, nx);
  res.distance = RealPlane(ny, nx);
  res.region_decay.assign(cfg.regions.size(), RealPlane(ny, nx));

  ParallelFor(nx * ny, [&](std::size_t cell) {
    const std::size_t iy = cell / nx, ix = cell % nx;
    SceneSpec spec;
    spec.room = cfg.room;
    spec.geometry = cfg.geometry;
    spec.array_pose = cfg.array_pose;
    spec.regions = cfg.regions;
    spec.duration_s = cfg.duration_s;
    spec.source_height = cfg.source_height;
    spec.seed = MixSeed(cfg.seed, cell);
    SourceSpec src;
    // Role is informational here; region membership comes from position.
    src.role = SourceRole::kInterfC;
    src.position = Vec3{res.xs[ix], res.ys[iy], cfg.source_height};
    spec.sources.push_back(src);
    const SceneTruth truth = SynthesizeScene(spec);

    const Polar p = ToArrayPolar(cfg.array_pose, res.xs[ix], res.ys[iy]);
    res.azimuth.at(iy, ix) = p.azimuth_deg;
    res.distance.at(iy, ix) = p.distance;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
      const double angle = cfg.regions[r].CenterAzimuth();
      MaskSource mask = PassthroughMask{};
      if (cfg.pipeline.mask == MaskKind::kOracle)
        mask = OracleMaskSource{&truth, cfg.regions[r], cfg.pipeline.region_test};
      const Signal est = Separate(truth.mixture, cfg.geometry, angle, mask);
      const double d =
          Decay(SteeredSum(truth.mixture, cfg.geometry, angle), est);
      res.region_decay[r].at(iy, ix) = d;
      best = std::min(best, d);
    }
    res.decay.at(iy, ix) = best;
  });
  return res;
}

void WriteHeatmap(const HeatmapResult &res, const HeatmapConfig &cfg,
                  const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::size_t ny = res.decay.frames(), nx = res.decay.bins();
  char buf[64];

  std::ofstream csv(dir / "heatmap.csv", std::ios::trunc);
  Require(csv.good(), "cannot write heatmap.csv", ErrorCode::kIo);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      std::snprintf(buf, sizeof buf, "%.4f", res.decay.at(iy, ix));
      csv << (ix ? "," : "") << buf;
    }
    csv << "\n";
  }

  std::ofstream pgm(dir / "heatmap.pgm", std::ios::trunc);
  Require(pgm.good(), "cannot write heatmap.pgm", ErrorCode::kIo);
  pgm << "P2\n" << nx << " " << ny << "\n255\n";
  for (std::size_t row = 0; row < ny; ++row) {
    const std::size_t iy = ny - 1 - row;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v =
          std::clamp(res.decay.at(iy, ix) / kPgmMaxDecayDb, 0.0, 1.0);
      pgm << (ix ? " " : "") << static_cast<int>(std::lround(v * 255));
    }
    pgm << "\n";
  }

  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      nlohmann::json per = nlohmann::json::array();
      for (const auto &r : res.region_decay) per.push_back(r.at(iy, ix));
      cells.push_back({{"x", res.xs[ix]},
                       {"y", res.ys[iy]},
                       {"azimuth", res.azimuth.at(iy, ix)},
                       {"distance", res.distance.at(iy, ix)},
                       {"decay_db", res.decay.at(iy, ix)},
                       {"region_decay_db", per}});
    }
  std::ofstream js(dir / "heatmap.json", std::ios::trunc);
  Require(js.good(), "cannot write heatmap.json", ErrorCode::kIo);
  js << nlohmann::json{{"config", HeatmapConfigToJson(cfg)},
                       {"xs", res.xs},
                       {"ys", res.ys},
                       {"cells", cells}}
            .dump(2)
     << "\n";
}

}  // namespace rss
