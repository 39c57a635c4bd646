#include "rss/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "rss/das.hpp"
#include "rss/drr.hpp"
#include "rss/error.hpp"
#include "rss/heatmap.hpp"
#include "rss/metrics.hpp"
#include "rss/parallel.hpp"
#include "rss/scene.hpp"
#include "rss/separation.hpp"
#include "rss/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rss {

namespace {

constexpr Vec3 kMinRoom{3.0, 3.0, 2.5};
constexpr Vec3 kMaxRoom{10.0, 8.0, 4.0};
constexpr double kArrayWallMargin = 0.5;
constexpr double kArrayHeight = 1.5;
constexpr int kSceneAttempts = 20;
// Table-style T60 buckets for the sweep preset.
constexpr double kSweepEdges[] = {0.05, 0.3, 0.55, 0.8, 1.1, 1.4};

template <typename T>
T Get(const json &cfg, const char *key, T fallback) {
  try {
    return cfg.contains(key) && !cfg[key].is_null() ? cfg[key].get<T>()
                                                    : fallback;
  } catch (const json::exception &e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("config key '") + key + "': " + e.what());
  }
}

fs::path RequirePath(const json &cfg, const char *key) {
  const auto s = Get<std::string>(cfg, key, "");
  Require(!s.empty(), std::string("missing required setting '") + key + "'");
  return s;
}

void MakeDir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec && fs::is_directory(dir), "cannot create " + dir.string(),
          ErrorCode::kIo);
}

void WriteJson(const fs::path &path, const json &j) {
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), "cannot write " + path.string(), ErrorCode::kIo);
  out << j.dump(2) << "\n";
}

std::string FormatAngle(double deg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", deg);
  return buf;
}

double Uniform(Rng &rng, double lo, double hi) {
  return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<SourceRole> CaseRoles(const std::string &c) {
  using R = SourceRole;
  if (c == "full")
    return {R::kTarget, R::kInterfA, R::kInterfB, R::kInterfC, R::kPointNoise};
  if (c == "no_target") return {R::kInterfA, R::kInterfB, R::kInterfC, R::kPointNoise};
  if (c == "one_target") return {R::kTarget, R::kInterfB, R::kPointNoise};
  if (c == "two_target") return {R::kTarget, R::kCoTarget, R::kInterfB, R::kPointNoise};
  if (c == "clean") return {R::kTarget};
  Fail(ErrorCode::kInvalidArgument,
       "case must be full, mixed, no_target, one_target, two_target or clean, got '" +
           c + "'");
}

std::optional<std::pair<double, double>> T60Range(const json &cfg) {
  if (!cfg.contains("t60_range") || cfg["t60_range"].is_null()) return {};
  const auto r = Get<std::vector<double>>(cfg, "t60_range", {});
  Require(r.size() == 2 && r[0] >= 0 && r[0] <= r[1],
          "t60_range needs two values 0 <= lo <= hi");
  return std::make_pair(r[0], r[1]);
}

// Scene i of a preset. Placement can be infeasible for a sampled room and
// pose (small rooms, Interf(a) beyond the distance bound), so each attempt
// redraws the room and the pose.
SceneTruth SimulateOne(const json &cfg, std::size_t index) {
  const auto preset = Get<std::string>(cfg, "preset", "paper-linear8");
  const auto seed = Get<std::uint64_t>(cfg, "seed", 0);
  const double duration = Get<double>(cfg, "duration", 3.0);
  auto scene_case = Get<std::string>(cfg, "case", "full");
  if (scene_case == "mixed") {
    static const char *kCycle[] = {"no_target", "one_target", "two_target"};
    scene_case = kCycle[index % 3];
  }
  const auto t60_range = T60Range(cfg);

  std::string last_error;
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    Rng rng(MixSeed(MixSeed(seed, index), static_cast<std::uint64_t>(attempt)));
    SceneSpec spec;
    spec.duration_s = duration;
    spec.seed = rng();
    if (preset == "fig2-heatmap") {
      spec.room.dims = {5.0, 5.0, 3.0};
      spec.room.t60 = t60_range ? Uniform(rng, t60_range->first, t60_range->second)
                                : 0.3;
      spec.array_pose = {{2.5, 2.5, kArrayHeight}, 0.0};
      spec.target_region = index % spec.regions.size();
      SourceSpec src;
      src.position = Vec3{Uniform(rng, 0.2, 4.8), Uniform(rng, 0.2, 4.8),
                          spec.source_height};
      const auto labels = RegionLabels(spec, *src.position);
      src.role = labels[spec.target_region] ? SourceRole::kTarget
                                            : SourceRole::kInterfC;
      spec.sources.push_back(src);
    } else {
      Require(preset == "paper-linear8" || preset == "t60-sweep",
              "unknown preset '" + preset + "'");
      spec.room.dims = {Uniform(rng, kMinRoom.x, kMaxRoom.x),
                        Uniform(rng, kMinRoom.y, kMaxRoom.y),
                        Uniform(rng, kMinRoom.z, kMaxRoom.z)};
      if (t60_range) {
        spec.room.t60 = Uniform(rng, t60_range->first, t60_range->second);
      } else if (preset == "t60-sweep") {
        const std::size_t b = index % (std::size(kSweepEdges) - 1);
        spec.room.t60 = Uniform(rng, kSweepEdges[b], kSweepEdges[b + 1]);
      } else {
        spec.room.t60 = Uniform(rng, 0.05, 0.8);
      }
      spec.array_pose.position = {
          Uniform(rng, kArrayWallMargin, spec.room.dims.x - kArrayWallMargin),
          Uniform(rng, kArrayWallMargin, spec.room.dims.y - kArrayWallMargin),
          kArrayHeight};
      spec.array_pose.yaw_deg = Uniform(rng, 0.0, 360.0);
      spec.target_region = static_cast<std::size_t>(rng() % spec.regions.size());
      for (SourceRole role : CaseRoles(scene_case)) {
        SourceSpec s;
        s.role = role;
        spec.sources.push_back(s);
      }
    }
    try {
      return SynthesizeScene(spec);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kInfeasible) throw;
      last_error = e.what();
    }
  }
  Fail(ErrorCode::kInfeasible, "scene " + std::to_string(index) + ": no feasible "
       "placement after " + std::to_string(kSceneAttempts) +
       " room draws; last error: " + last_error);
}

std::string SceneId(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", i);
  return buf;
}

// Scene directories under `root` (or `root` itself), via the evaluator's
// discovery rules.
std::vector<fs::path> Scenes(const fs::path &root) {
  Require(fs::is_directory(root), "scene directory not found: " + root.string(),
          ErrorCode::kData);
  auto scenes = ListScenes(root);
  Require(!scenes.empty(), "no scenes found under " + root.string(),
          ErrorCode::kData);
  return scenes;
}

fs::path SceneOutDir(const fs::path &root, const fs::path &scene,
                     const std::optional<fs::path> &out) {
  if (!out) return scene;
  return scene == root ? *out : *out / scene.filename();
}

std::vector<double> Angles(const json &cfg, const SceneSpec &spec) {
  auto angles = Get<std::vector<double>>(cfg, "regions", {});
  if (angles.empty())
    for (const auto &r : spec.regions) angles.push_back(r.CenterAzimuth());
  return angles;
}

}  // namespace

CommandOutput CmdSimulate(const json &config) {
  json cfg = config;
  cfg["preset"] = Get<std::string>(cfg, "preset", "paper-linear8");
  cfg["seed"] = Get<std::uint64_t>(cfg, "seed", 0);
  cfg["count"] = Get<std::size_t>(cfg, "count", 10);
  cfg["duration"] = Get<double>(cfg, "duration", 3.0);
  if (cfg["preset"] == "fig2-heatmap") {
    cfg.erase("case");
  } else {
    cfg["case"] = Get<std::string>(cfg, "case", "full");
    if (cfg["case"] != "mixed") (void)CaseRoles(cfg["case"].get<std::string>());
  }
  const fs::path out = RequirePath(cfg, "out");
  const auto count = cfg["count"].get<std::size_t>();
  Require(count > 0, "count must be positive");
  Require(cfg["duration"].get<double>() > 0, "duration must be positive");
  (void)T60Range(cfg);
  MakeDir(out);

  std::vector<json> entries(count);
  ParallelFor(count, [&](std::size_t i) {
    const SceneTruth truth = SimulateOne(cfg, i);
    const std::string id = SceneId(i);
    WriteSceneDir(truth, out / id);
    const json meta = truth.Metadata();
    json labels = json::array();
    for (const auto &s : meta["sources"])
      labels.push_back({{"role", s["role"]}, {"in_region", s["in_region"]}});
    entries[i] = {{"id", id},
                  {"dir", id},
                  {"case", meta["case"]},
                  {"t60", truth.spec.room.t60},
                  {"room", Vec3ToJson(truth.spec.room.dims)},
                  {"target_region", truth.spec.target_region},
                  {"labels", labels}};
  });
  json manifest = {{"preset", cfg["preset"]},
                   {"seed", cfg["seed"]},
                   {"count", count},
                   {"scenes", entries}};
  WriteJson(out / "manifest.json", manifest);
  WriteJson(out / "resolved_config.json", cfg);

  std::ostringstream text;
  text << "wrote " << count << " scene(s) to " << out.string() << "\n";
  return {text.str(), manifest};
}

CommandOutput CmdFeatures(const json &config) {
  json cfg = config;
  cfg["das"] = Get<std::string>(cfg, "das", "all-pairs");
  cfg["drr"] = Get<std::string>(cfg, "drr", "ratio");
  const fs::path root = RequirePath(cfg, "scenes");
  std::optional<fs::path> out;
  if (cfg.contains("out") && !cfg["out"].is_null()) out = RequirePath(cfg, "out");
  const auto das = cfg["das"].get<std::string>();
  const auto drr = cfg["drr"].get<std::string>();
  Require(das == "all-pairs" || das == "subset" || das == "none",
          "das must be all-pairs, subset or none");
  Require(drr == "cat" || drr == "ratio" || drr == "none",
          "drr must be cat, ratio or none");

  const auto scenes = Scenes(root);
  json written = json::array();
  std::vector<json> per_scene(scenes.size());
  ParallelFor(scenes.size(), [&](std::size_t i) {
    const SceneTruth truth = ReadSceneDir(scenes[i]);
    const ArrayGeometry &geom = truth.spec.geometry;
    const std::size_t m = geom.num_mics();
    const fs::path dir = SceneOutDir(root, scenes[i], out);
    MakeDir(dir);
    json files = json::array();
    for (double angle : Angles(cfg, truth.spec)) {
      const std::string tag = FormatAngle(angle);
      if (das != "none") {
        const DasFeatures f =
            das == "all-pairs"
                ? AssembleDasFeatures(truth.mixture, geom, angle)
                : AssembleDasFeatures(truth.mixture, geom, angle, SymmetricPairs(m));
        Tensor t = TensorFromPlanes(f.fbank, "das");
        t.extra = {{"angle", angle},
                   {"pair_list", f.pair_list},
                   {"delays", f.delays.shifts},
                   {"das", das}};
        WriteTensor(dir / ("das_" + tag), t);
        files.push_back("das_" + tag);
      }
      if (drr != "none") {
        const PairList pairs = SymmetricPairs(m);
        const AlignedSignals aligned =
            ShiftAlign(truth.mixture, ComputeDelays(geom, angle));
        const DrrPairFeatures f =
            DrrFeatures(aligned, pairs, DrrModeFromString(drr));
        Tensor t = TensorFromPlanes(f.Emitted(), "drr");
        t.extra = {{"angle", angle}, {"pair_list", pairs}, {"mode", drr}};
        WriteTensor(dir / ("drr_" + tag), t);
        files.push_back("drr_" + tag);
      }
    }
    per_scene[i] = {{"scene", scenes[i].filename().string()}, {"files", files}};
  });
  for (auto &j : per_scene) written.push_back(std::move(j));
  WriteJson((out ? *out : root) / "resolved_config.json", cfg);

  std::ostringstream text;
  text << "wrote features for " << scenes.size() << " scene(s)\n";
  return {text.str(), {{"scenes", written}}};
}

CommandOutput CmdSeparate(const json &config) {
  json cfg = config;
  cfg["mask"] = Get<std::string>(cfg, "mask", "oracle");
  const fs::path root = RequirePath(cfg, "scenes");
  std::optional<fs::path> out;
  if (cfg.contains("out") && !cfg["out"].is_null()) out = RequirePath(cfg, "out");
  const PipelineConfig pipe = PipelineFromString(cfg["mask"].get<std::string>());

  const auto scenes = Scenes(root);
  std::vector<json> per_scene(scenes.size());
  ParallelFor(scenes.size(), [&](std::size_t i) {
    const SceneTruth truth = ReadSceneDir(scenes[i]);
    const SceneSpec &spec = truth.spec;
    const std::string id = scenes[i].filename().string();
    const fs::path dir = SceneOutDir(root, scenes[i], out);
    MakeDir(dir);
    json files = json::array();
    for (double angle : Angles(cfg, spec)) {
      const std::string tag = FormatAngle(angle);
      MaskSource source = PassthroughMask{};
      if (pipe.mask == MaskKind::kOracle) {
        // A requested angle matching a scene region uses that region;
        // otherwise a 10-degree region around it with the target bound.
        const Region &tr = spec.regions[spec.target_region];
        Region region(angle - 5.0, angle + 5.0, tr.max_distance(),
                      tr.min_distance());
        for (const auto &r : spec.regions)
          if (std::abs(r.CenterAzimuth() - angle) < 1e-9) region = r;
        source = OracleMaskSource{&truth, region, pipe.region_test};
      } else if (pipe.mask == MaskKind::kFile) {
        std::string p = pipe.mask_path;
        for (const auto &[key, value] :
             {std::pair<std::string, std::string>{"{scene}", id}, {"{angle}", tag}})
          for (std::size_t pos; (pos = p.find(key)) != std::string::npos;)
            p.replace(pos, key.size(), value);
        source = FileMaskSource{p};
      }
      const Signal est = Separate(truth.mixture, spec.geometry, angle, source);
      MultichannelAudio wav(1, est.size());
      std::copy(est.begin(), est.end(), wav.channel(0).begin());
      WriteWav(dir / ("est_" + tag + ".wav"), wav, WavFormat::kFloat32);
      files.push_back("est_" + tag + ".wav");
    }
    per_scene[i] = {{"scene", id}, {"files", files}};
  });
  WriteJson((out ? *out : root) / "resolved_config.json", cfg);

  std::ostringstream text;
  text << "separated " << scenes.size() << " scene(s) with mask "
       << ToString(pipe) << "\n";
  return {text.str(), {{"scenes", per_scene}}};
}

CommandOutput CmdEvaluate(const json &config) {
  json cfg = config;
  cfg["mask"] = Get<std::string>(cfg, "mask", "oracle");
  const fs::path root = RequirePath(cfg, "scenes");
  const fs::path out =
      cfg.contains("out") && !cfg["out"].is_null() ? RequirePath(cfg, "out") : root;
  const PipelineConfig pipe = PipelineFromString(cfg["mask"].get<std::string>());
  Require(fs::is_directory(root), "scene directory not found: " + root.string(),
          ErrorCode::kData);

  const EvalReport report = EvaluateSceneSet(root, pipe);
  Require(!report.records.empty(),
          "no scene under " + root.string() + " could be evaluated",
          ErrorCode::kData);
  MakeDir(out);
  WriteReport(report, out);
  WriteJson(out / "resolved_config.json", cfg);

  std::string text = report.SummaryTable();
  for (const auto &[scene, msg] : report.warnings)
    text += "warning: skipped " + scene + ": " + msg + "\n";
  return {text, report.ToJson()};
}

CommandOutput CmdHeatmap(const json &config) {
  const fs::path out = RequirePath(config, "out");
  json hm = config;
  hm.erase("out");
  const HeatmapConfig cfg = HeatmapConfigFromJson(hm);
  const HeatmapResult res = RunHeatmap(cfg);
  MakeDir(out);
  WriteHeatmap(res, cfg, out);
  json resolved = HeatmapConfigToJson(cfg);
  resolved["out"] = out.string();
  WriteJson(out / "resolved_config.json", resolved);

  std::ostringstream text;
  text << "heatmap " << res.xs.size() << "x" << res.ys.size() << " written to "
       << out.string() << "\n";
  return {text.str(),
          {{"nx", res.xs.size()}, {"ny", res.ys.size()}, {"out", out.string()}}};
}

const std::vector<std::string> &CommandNames() {
  static const std::vector<std::string> names = {"simulate", "features",
                                                 "separate", "evaluate", "heatmap"};
  return names;
}

CommandOutput RunCommand(const std::string &name, const json &config) {
  Require(config.is_object(), "command config must be a JSON object");
  if (name == "simulate") return CmdSimulate(config);
  if (name == "features") return CmdFeatures(config);
  if (name == "separate") return CmdSeparate(config);
  if (name == "evaluate") return CmdEvaluate(config);
  if (name == "heatmap") return CmdHeatmap(config);
  Fail(ErrorCode::kInvalidArgument, "unknown command '" + name + "'");
}

}  // namespace rss
