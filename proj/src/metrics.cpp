#include "rss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rss/das.hpp"
#include "rss/error.hpp"
#include "rss/parallel.hpp"

namespace rss {

double SiSdr(std::span<const double> reference,
             std::span<const double> estimate) {
  Require(reference.size() == estimate.size(),
          "SI-SDR needs equal-length signals");
  const double ref_energy = Energy(reference);
  Require(ref_energy > 0, "SI-SDR reference has zero energy", ErrorCode::kData);
  const double alpha = Dot(estimate, reference) / ref_energy;
  double target = 0, error = 0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    const double s = alpha * reference[n];
    const double e = estimate[n] - s;
    target += s * s;
    error += e * e;
  }
  if (target == 0) return -kSdrCapDb;
  if (error == 0) return kSdrCapDb;
  return std::clamp(10.0 * std::log10(target / error), -kSdrCapDb, kSdrCapDb);
}

double Decay(std::span<const double> mixture_ref,
             std::span<const double> estimate) {
  Require(mixture_ref.size() == estimate.size(),
          "Decay needs equal-length signals");
  return 10.0 * std::log10(Energy(mixture_ref) /
                           (Energy(estimate) + kDecayEpsilon));
}

const char *ToString(EvalCase c) {
  switch (c) {
    case EvalCase::kNoTarget: return "no_target";
    case EvalCase::kOneTarget: return "one_target";
    case EvalCase::kTwoTarget: return "two_target";
  }
  return "?";
}

EvalCase CaseFromCount(std::size_t in_region) {
  if (in_region == 0) return EvalCase::kNoTarget;
  return in_region == 1 ? EvalCase::kOneTarget : EvalCase::kTwoTarget;
}

Aggregate Summarize(std::vector<double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  a.median = values.size() % 2 ? values[mid]
                               : 0.5 * (values[mid - 1] + values[mid]);
  return a;
}

std::vector<std::pair<std::string, Aggregate>> EvalReport::Aggregates() const {
  std::vector<std::pair<std::string, Aggregate>> out;
  for (EvalCase c : {EvalCase::kNoTarget, EvalCase::kOneTarget,
                     EvalCase::kTwoTarget}) {
    std::vector<double> v;
    for (const auto &r : records) {
      if (r.eval_case != c) continue;
      const auto &x = c == EvalCase::kNoTarget ? r.decay_db : r.sdr_db;
      if (x) v.push_back(*x);
    }
    if (!v.empty()) out.emplace_back(ToString(c), Summarize(std::move(v)));
  }
  return out;
}

namespace {

nlohmann::json OptJson(const std::optional<double> &v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

std::string OptCsv(const std::optional<double> &v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto &r : records)
    recs.push_back({{"scene_id", r.scene_id},
                    {"case", ToString(r.eval_case)},
                    {"steer_deg", r.steer_deg},
                    {"sdr_db", OptJson(r.sdr_db)},
                    {"decay_db", OptJson(r.decay_db)},
                    {"pesq", OptJson(r.pesq)},
                    {"stoi", OptJson(r.stoi)}});
  nlohmann::json agg = nlohmann::json::object();
  for (const auto &[name, a] : Aggregates())
    agg[name] = {{"metric", name == "no_target" ? "decay_db" : "sdr_db"},
                 {"count", a.count},
                 {"mean", a.mean},
                 {"median", a.median}};
  nlohmann::json warn = nlohmann::json::array();
  for (const auto &[scene, msg] : warnings)
    warn.push_back({{"scene", scene}, {"message", msg}});
  return {{"pipeline", pipeline},
          {"records", recs},
          {"aggregates", agg},
          {"warnings", warn}};
}

std::string EvalReport::ToCsv() const {
  std::ostringstream os;
  os << "scene_id,case,steer_deg,sdr_db,decay_db,pesq,stoi\n";
  for (const auto &r : records)
    os << r.scene_id << ',' << ToString(r.eval_case) << ','
       << OptCsv(r.steer_deg) << ',' << OptCsv(r.sdr_db) << ','
       << OptCsv(r.decay_db) << ',' << OptCsv(r.pesq) << ','
       << OptCsv(r.stoi) << '\n';
  return os.str();
}

std::string EvalReport::SummaryTable() const {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %-9s %6s %10s %10s\n", "case",
                "metric", "count", "mean", "median");
  os << "pipeline: " << pipeline << "\n" << line;
  for (const auto &[name, a] : Aggregates()) {
    std::snprintf(line, sizeof line, "%-12s %-9s %6zu %10.2f %10.2f\n",
                  name.c_str(), name == "no_target" ? "decay_db" : "sdr_db",
                  a.count, a.mean, a.median);
    os << line;
  }
  if (!warnings.empty())
    os << warnings.size() << " scene(s) skipped, see report.json\n";
  return os.str();
}

PipelineConfig PipelineFromString(const std::string &spec) {
  PipelineConfig cfg;
  if (spec == "passthrough") {
    cfg.mask = MaskKind::kPassthrough;
  } else if (spec == "oracle") {
    cfg.mask = MaskKind::kOracle;
  } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    cfg.mask = MaskKind::kFile;
    cfg.mask_path = spec.substr(5);
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "mask must be oracle, passthrough or file:<path>, got '" + spec + "'");
  }
  return cfg;
}

std::string ToString(const PipelineConfig &cfg) {
  switch (cfg.mask) {
    case MaskKind::kPassthrough: return "passthrough";
    case MaskKind::kOracle: return "oracle";
    case MaskKind::kFile: return "file:" + cfg.mask_path;
  }
  return "?";
}

namespace {

std::string FormatAngle(double deg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", deg);
  return buf;
}

std::string Substitute(std::string s, const std::string &key,
                       const std::string &value) {
  for (std::size_t pos; (pos = s.find(key)) != std::string::npos;)
    s.replace(pos, key.size(), value);
  return s;
}

}  // namespace

SceneRecord EvaluateScene(const SceneTruth &truth, const std::string &scene_id,
                          const PipelineConfig &cfg) {
  const SceneSpec &spec = truth.spec;
  Require(spec.target_region < spec.regions.size(),
          "target_region index out of range", ErrorCode::kData);
  const Region &region = spec.regions[spec.target_region];
  const double angle = region.CenterAzimuth();

  std::size_t in_region = 0;
  for (const auto &s : truth.sources)
    if (SourceInRegion(truth, s, region, cfg.region_test)) ++in_region;

  MaskSource source = PassthroughMask{};
  if (cfg.mask == MaskKind::kOracle)
    source = OracleMaskSource{&truth, region, cfg.region_test};
  else if (cfg.mask == MaskKind::kFile)
    source = FileMaskSource{Substitute(
        Substitute(cfg.mask_path, "{scene}", scene_id), "{angle}",
        FormatAngle(angle))};

  SceneRecord rec;
  rec.scene_id = scene_id;
  rec.eval_case = CaseFromCount(in_region);
  rec.steer_deg = angle;
  const Signal est = Separate(truth.mixture, spec.geometry, angle, source);
  if (in_region > 0) {
    rec.sdr_db =
        SiSdr(SteeredTargetImage(truth, region, angle, cfg.region_test), est);
  } else {
    rec.decay_db = Decay(SteeredSum(truth.mixture, spec.geometry, angle), est);
  }
  return rec;
}

std::vector<std::filesystem::path> ListScenes(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  Require(fs::is_directory(dir), dir.string() + " is not a directory",
          ErrorCode::kData);
  if (fs::exists(dir / "meta.json")) return {dir};
  std::vector<fs::path> out;
  if (std::ifstream in(dir / "manifest.json"); in.good()) {
    try {
      const auto manifest = nlohmann::json::parse(in);
      for (const auto &s : manifest.at("scenes"))
        out.push_back(dir / s.at("dir").get<std::string>());
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorCode::kData, (dir / "manifest.json").string() + ": " + e.what());
    }
    return out;
  }
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::exists(e.path() / "meta.json"))
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

EvalReport EvaluateSceneSet(const std::filesystem::path &dir,
                            const PipelineConfig &cfg) {
  const auto scenes = ListScenes(dir);
  Require(!scenes.empty(), "no scenes found under " + dir.string(),
          ErrorCode::kData);
  std::vector<std::optional<SceneRecord>> recs(scenes.size());
  std::vector<std::string> errors(scenes.size());
  ParallelFor(scenes.size(), [&](std::size_t i) {
    const std::string id = scenes[i].filename().string();
    try {
      recs[i] = EvaluateScene(ReadSceneDir(scenes[i]), id, cfg);
    } catch (const Error &e) {
      // Argument errors (bad pipeline settings) are not per-scene problems.
      if (e.code() == ErrorCode::kInvalidArgument) throw;
      errors[i] = e.what();
    }
  });
  EvalReport report;
  report.pipeline = ToString(cfg);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (recs[i])
      report.records.push_back(std::move(*recs[i]));
    else
      report.warnings.emplace_back(scenes[i].filename().string(), errors[i]);
  }
  return report;
}

void WriteReport(const EvalReport &report, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream js(dir / "report.json", std::ios::trunc);
  std::ofstream csv(dir / "report.csv", std::ios::trunc);
  Require(js.good() && csv.good(), "cannot write report in " + dir.string(),
          ErrorCode::kIo);
  js << report.ToJson().dump(2) << "\n";
  csv << report.ToCsv();
}

}  // namespace rss
