#include "rss/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rss/error.hpp"

namespace rss {

const char *ToString(SourceRole role) {
  switch (role) {
    case SourceRole::kTarget: return "target";
    case SourceRole::kCoTarget: return "co_target";
    case SourceRole::kInterfA: return "interf_a";
    case SourceRole::kInterfB: return "interf_b";
    case SourceRole::kInterfC: return "interf_c";
    case SourceRole::kPointNoise: return "point_noise";
  }
  return "unknown";
}

SourceRole RoleFromString(const std::string &s) {
  for (SourceRole r : {SourceRole::kTarget, SourceRole::kCoTarget,
                       SourceRole::kInterfA, SourceRole::kInterfB,
                       SourceRole::kInterfC, SourceRole::kPointNoise})
    if (s == ToString(r)) return r;
  Fail(ErrorCode::kInvalidArgument, "unknown source role '" + s + "'");
}

namespace {

bool IsSpeech(SourceRole r) { return r != SourceRole::kPointNoise; }

nlohmann::json RangeToJson(const std::pair<double, double> &r) {
  return {r.first, r.second};
}

std::pair<double, double> RangeFromJson(const nlohmann::json &j) {
  Require(j.is_array() && j.size() == 2, "range must be [lo, hi]");
  std::pair<double, double> r{j[0].get<double>(), j[1].get<double>()};
  Require(r.first <= r.second, "range must satisfy lo <= hi");
  return r;
}

double MaxHorizontalReach(const SceneSpec &spec) {
  const double px = spec.array_pose.position.x;
  const double py = spec.array_pose.position.y;
  const double w = spec.room.dims.x, h = spec.room.dims.y;
  return std::max({std::hypot(px, py), std::hypot(w - px, py),
                   std::hypot(px, h - py), std::hypot(w - px, h - py)});
}

bool OutsideAllIntervals(const std::vector<Region> &regions, double az) {
  for (const auto &r : regions)
    if (r.AzimuthGap(az) < kInterfAzimuthMargin) return false;
  return true;
}

// Role predicate on a candidate position.
bool SatisfiesRole(SourceRole role, const SceneSpec &spec, const Vec3 &p) {
  if (!InsideRoom(spec.room, p, kPlacementWallMargin)) return false;
  const Region &target = spec.regions.at(spec.target_region);
  const Polar pol = ToArrayPolar(spec.array_pose, p.x, p.y);
  const double far = target.max_distance() + kInterfDistanceBuffer;
  switch (role) {
    case SourceRole::kTarget:
    case SourceRole::kCoTarget:
      return target.Contains(pol.azimuth_deg, pol.distance);
    case SourceRole::kInterfA:
      return target.ContainsAzimuth(pol.azimuth_deg) && pol.distance > far;
    case SourceRole::kInterfB:
      return pol.distance <= target.max_distance() &&
             pol.distance >= kMinSourceDistance &&
             OutsideAllIntervals(spec.regions, pol.azimuth_deg);
    case SourceRole::kInterfC:
      return pol.distance > far &&
             OutsideAllIntervals(spec.regions, pol.azimuth_deg);
    case SourceRole::kPointNoise:
      return pol.distance >= kMinSourceDistance;
  }
  return false;
}

}  // namespace

Vec3 SamplePosition(SourceRole role, const SceneSpec &spec, Rng &rng) {
  Require(spec.target_region < spec.regions.size(),
          "target_region index out of range");
  const Region &target = spec.regions[spec.target_region];
  const double z = spec.source_height;
  const double reach = MaxHorizontalReach(spec);
  const double far = target.max_distance() + kInterfDistanceBuffer;
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Area-uniform radius on [lo, hi].
  auto radius = [&](double lo, double hi) {
    return std::sqrt(lo * lo + (hi * hi - lo * lo) * u(rng));
  };

  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    Vec3 p;
    const double az_in =
        target.azimuth_min() +
        (target.azimuth_max() - target.azimuth_min()) * u(rng);
    switch (role) {
      case SourceRole::kTarget:
      case SourceRole::kCoTarget: {
        const double lo = std::max(kMinSourceDistance, target.min_distance());
        if (lo >= target.max_distance()) break;
        const double d = lo + (target.max_distance() - lo) * u(rng);
        p = FromArrayPolar(spec.array_pose, az_in, d, z);
        break;
      }
      case SourceRole::kInterfA:
        if (far >= reach) break;
        p = FromArrayPolar(spec.array_pose, az_in, radius(far, reach), z);
        break;
      case SourceRole::kInterfB:
      case SourceRole::kInterfC: {
        const double az = 360.0 * u(rng);
        const double d = role == SourceRole::kInterfB
                             ? radius(kMinSourceDistance, target.max_distance())
                             : (far >= reach ? 0.0 : radius(far, reach));
        p = FromArrayPolar(spec.array_pose, az, d, z);
        break;
      }
      case SourceRole::kPointNoise: {
        const double m = kPlacementWallMargin;
        p = {m + (spec.room.dims.x - 2 * m) * u(rng),
             m + (spec.room.dims.y - 2 * m) * u(rng), z};
        break;
      }
    }
    if (SatisfiesRole(role, spec, p)) return p;
  }
  std::ostringstream msg;
  msg << "cannot place " << ToString(role) << " after "
      << kMaxPlacementAttempts << " attempts (room " << spec.room.dims.x << "x"
      << spec.room.dims.y << "x" << spec.room.dims.z << ", array at ("
      << spec.array_pose.position.x << "," << spec.array_pose.position.y
      << "), yaw " << spec.array_pose.yaw_deg << ", region ["
      << target.azimuth_min() << "," << target.azimuth_max() << "] within "
      << target.max_distance() << " m)";
  Fail(ErrorCode::kInfeasible, msg.str());
}

std::vector<bool> RegionLabels(const SceneSpec &spec, const Vec3 &position) {
  std::vector<bool> labels;
  for (const auto &r : spec.regions)
    labels.push_back(InRegion(r, position.x, position.y, spec.array_pose));
  return labels;
}

namespace {

Signal LoadDry(const SourceSpec &src, std::size_t num_samples,
               std::uint64_t seed) {
  Rng rng(seed);
  if (src.wav_path.empty())
    return IsSpeech(src.role) ? SyntheticSpeech(num_samples, rng)
                              : WhiteNoise(num_samples, rng);
  const MultichannelAudio wav = ReadWav(src.wav_path);
  Require(wav.num_frames() > 0, src.wav_path + " is empty", ErrorCode::kData);
  Signal x(num_samples);
  auto ch = wav.channel(0);
  for (std::size_t n = 0; n < num_samples; ++n) x[n] = ch[n % ch.size()];
  return x;
}

SourceTruth MakeTruth(const SceneSpec &spec, SourceRole role, const Vec3 &p,
                      double level) {
  SourceTruth t;
  t.role = role;
  t.position = p;
  const Polar pol = ToArrayPolar(spec.array_pose, p.x, p.y);
  t.azimuth_deg = pol.azimuth_deg;
  t.distance = pol.distance;
  t.level_db = level;
  t.in_region = RegionLabels(spec, p);
  return t;
}

}  // namespace

SceneTruth SynthesizeScene(const SceneSpec &spec) {
  Require(!spec.regions.empty(), "scene needs at least one region");
  Require(spec.target_region < spec.regions.size(),
          "target_region index out of range");
  Require(spec.duration_s > 0, "scene duration must be positive");
  const std::size_t num_targets = static_cast<std::size_t>(std::count_if(
      spec.sources.begin(), spec.sources.end(),
      [](const SourceSpec &s) { return s.role == SourceRole::kTarget; }));
  Require(num_targets <= 1, "a scene designates at most one target");

  const std::vector<Vec3> mics = spec.geometry.Posed(spec.array_pose);
  for (const auto &m : mics)
    Require(InsideRoom(spec.room, m, kWallMargin),
            "array does not fit inside the room", ErrorCode::kInfeasible);

  SceneTruth truth;
  truth.spec = spec;
  SceneSpec &resolved = truth.spec;
  Rng rng(spec.seed);
  for (auto &src : resolved.sources)
    if (!src.position) src.position = SamplePosition(src.role, spec, rng);

  const std::size_t num_samples =
      static_cast<std::size_t>(std::llround(spec.duration_s * kSampleRate));
  std::vector<MultichannelAudio> images;
  for (std::size_t i = 0; i < resolved.sources.size(); ++i) {
    const auto &src = resolved.sources[i];
    const Signal dry = LoadDry(src, num_samples, MixSeed(spec.seed, 1000 + i));
    images.push_back(
        RenderSource(dry, SimulateRir(spec.room, *src.position, mics)));
  }

  // Level reference: the target's image at mic 0, else the first speech
  // source, which then stays at 0 dB.
  std::optional<std::size_t> ref;
  for (std::size_t i = 0; i < resolved.sources.size(); ++i)
    if (resolved.sources[i].role == SourceRole::kTarget) ref = i;
  if (!ref)
    for (std::size_t i = 0; i < resolved.sources.size(); ++i)
      if (IsSpeech(resolved.sources[i].role)) {
        ref = i;
        break;
      }
  const double ref_energy = ref ? Energy(images[*ref].channel(0)) : 0.0;

  for (std::size_t i = 0; i < resolved.sources.size(); ++i) {
    auto &src = resolved.sources[i];
    if (ref && i == *ref) {
      src.level_db = 0.0;
      continue;
    }
    const auto &range = IsSpeech(src.role) ? spec.sir_range : spec.snr_range;
    if (!src.level_db)
      src.level_db = std::uniform_real_distribution<double>(
          range.first, range.second)(rng);
    if (!ref) continue;
    const double e = Energy(images[i].channel(0));
    if (e > 0)
      images[i] *= std::sqrt(ref_energy / (e * std::pow(10.0, *src.level_db / 10.0)));
  }

  truth.mixture = MultichannelAudio(mics.size(), num_samples);
  truth.noise_image = MultichannelAudio(mics.size(), num_samples);
  for (std::size_t i = 0; i < resolved.sources.size(); ++i) {
    const auto &src = resolved.sources[i];
    SourceTruth t = MakeTruth(resolved, src.role, *src.position,
                              src.level_db.value_or(0.0));
    if (IsSpeech(src.role)) {
      truth.source_images.push_back(std::move(images[i]));
      truth.sources.push_back(std::move(t));
    } else {
      truth.noise_image += images[i];
      truth.noise = std::move(t);
    }
  }
  for (const auto &img : truth.source_images) truth.mixture += img;
  truth.mixture += truth.noise_image;
  return truth;
}

std::size_t SceneTruth::CountInRegion(std::size_t region_index) const {
  std::size_t n = 0;
  for (const auto &s : sources)
    if (region_index < s.in_region.size() && s.in_region[region_index]) ++n;
  return n;
}

nlohmann::json SceneSpecToJson(const SceneSpec &spec) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto &r : spec.regions) regions.push_back(RegionToJson(r));
  nlohmann::json sources = nlohmann::json::array();
  for (const auto &s : spec.sources) {
    nlohmann::json js = {{"role", ToString(s.role)}};
    if (!s.wav_path.empty()) js["wav"] = s.wav_path;
    if (s.position) js["position"] = Vec3ToJson(*s.position);
    if (s.level_db) js["level_db"] = *s.level_db;
    sources.push_back(js);
  }
  return {{"room", RoomToJson(spec.room)},
          {"array", GeometryToJson(spec.geometry)},
          {"array_pose",
           {{"position", Vec3ToJson(spec.array_pose.position)},
            {"yaw", spec.array_pose.yaw_deg}}},
          {"regions", regions},
          {"target_region", spec.target_region},
          {"sources", sources},
          {"duration", spec.duration_s},
          {"source_height", spec.source_height},
          {"sir_range", RangeToJson(spec.sir_range)},
          {"snr_range", RangeToJson(spec.snr_range)},
          {"seed", spec.seed}};
}

SceneSpec SceneSpecFromJson(const nlohmann::json &j) {
  try {
    SceneSpec s;
    s.room = RoomFromJson(j.at("room"));
    if (j.contains("array")) s.geometry = GeometryFromJson(j.at("array"));
    if (j.contains("array_pose")) {
      s.array_pose.position = Vec3FromJson(j["array_pose"].at("position"));
      s.array_pose.yaw_deg = j["array_pose"].value("yaw", 0.0);
    }
    if (j.contains("regions")) {
      s.regions.clear();
      for (const auto &r : j.at("regions")) s.regions.push_back(RegionFromJson(r));
    }
    s.target_region = j.value("target_region", std::size_t{0});
    for (const auto &js : j.value("sources", nlohmann::json::array())) {
      SourceSpec src;
      src.role = RoleFromString(js.at("role").get<std::string>());
      src.wav_path = js.value("wav", "");
      if (js.contains("position")) src.position = Vec3FromJson(js["position"]);
      if (js.contains("level_db")) src.level_db = js["level_db"].get<double>();
      s.sources.push_back(std::move(src));
    }
    s.duration_s = j.value("duration", 3.0);
    s.source_height = j.value("source_height", 1.5);
    if (j.contains("sir_range")) s.sir_range = RangeFromJson(j["sir_range"]);
    if (j.contains("snr_range")) s.snr_range = RangeFromJson(j["snr_range"]);
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kInvalidArgument, std::string("scene spec: ") + e.what());
  }
}

namespace {

nlohmann::json TruthToJson(const SourceTruth &t) {
  return {{"role", ToString(t.role)},
          {"position", Vec3ToJson(t.position)},
          {"azimuth", t.azimuth_deg},
          {"distance", t.distance},
          {"level_db", t.level_db},
          {"in_region", t.in_region}};
}

SourceTruth TruthFromJson(const nlohmann::json &j) {
  SourceTruth t;
  t.role = RoleFromString(j.at("role").get<std::string>());
  t.position = Vec3FromJson(j.at("position"));
  t.azimuth_deg = j.at("azimuth").get<double>();
  t.distance = j.at("distance").get<double>();
  t.level_db = j.value("level_db", 0.0);
  t.in_region = j.at("in_region").get<std::vector<bool>>();
  return t;
}

const char *CaseName(std::size_t count) {
  return count == 0 ? "no_target" : (count == 1 ? "one_target" : "two_target");
}

}  // namespace

nlohmann::json SceneTruth::Metadata() const {
  nlohmann::json sources_js = nlohmann::json::array();
  for (std::size_t n = 0; n < sources.size(); ++n) {
    auto js = TruthToJson(sources[n]);
    js["file"] = "src_" + std::to_string(n) + ".wav";
    sources_js.push_back(js);
  }
  nlohmann::json mics = nlohmann::json::array();
  for (const auto &m : spec.geometry.Posed(spec.array_pose))
    mics.push_back(Vec3ToJson(m));
  return {{"spec", SceneSpecToJson(spec)},
          {"sources", sources_js},
          {"noise", noise ? TruthToJson(*noise) : nlohmann::json()},
          {"case", CaseName(CountInRegion(spec.target_region))},
          {"num_samples", mixture.num_frames()},
          {"sample_rate", mixture.sample_rate()},
          {"mics_room", mics}};
}

void WriteSceneDir(const SceneTruth &truth, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  Require(!ec, "cannot create " + dir.string(), ErrorCode::kIo);
  WriteWav(dir / "mixture.wav", truth.mixture);
  for (std::size_t n = 0; n < truth.source_images.size(); ++n)
    WriteWav(dir / ("src_" + std::to_string(n) + ".wav"),
             truth.source_images[n]);
  WriteWav(dir / "noise.wav", truth.noise_image);
  std::ofstream meta(dir / "meta.json", std::ios::trunc);
  Require(meta.good(), "cannot write meta.json in " + dir.string(),
          ErrorCode::kIo);
  meta << truth.Metadata().dump(2) << "\n";
}

SceneTruth ReadSceneDir(const std::filesystem::path &dir) {
  std::ifstream in(dir / "meta.json");
  Require(in.good(), dir.string() + ": missing meta.json", ErrorCode::kData);
  nlohmann::json meta;
  SceneTruth truth;
  try {
    in >> meta;
    truth.spec = SceneSpecFromJson(meta.at("spec"));
    for (const auto &s : meta.at("sources")) {
      truth.sources.push_back(TruthFromJson(s));
      truth.source_images.push_back(ReadWav(dir / s.at("file").get<std::string>()));
    }
    if (!meta.at("noise").is_null()) truth.noise = TruthFromJson(meta["noise"]);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kData, dir.string() + "/meta.json: " + e.what());
  } catch (const Error &e) {
    Fail(ErrorCode::kData, dir.string() + ": " + e.what());
  }
  truth.mixture = ReadWav(dir / "mixture.wav");
  truth.noise_image = ReadWav(dir / "noise.wav");
  const std::size_t m = truth.spec.geometry.num_mics();
  Require(truth.mixture.num_channels() == m &&
              truth.noise_image.num_channels() == m,
          dir.string() + ": channel count does not match the array",
          ErrorCode::kData);
  for (const auto &img : truth.source_images)
    Require(img.num_channels() == m &&
                img.num_frames() == truth.mixture.num_frames(),
            dir.string() + ": source image shape mismatch", ErrorCode::kData);
  return truth;
}

}  // namespace rss
