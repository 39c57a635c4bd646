#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rss/separation.hpp"

namespace rss {

inline constexpr double kSdrCapDb = 60.0;
inline constexpr double kDecayEpsilon = 1e-12;

// Scale-invariant SDR, capped at +-60 dB.
double SiSdr(std::span<const double> reference, std::span<const double> estimate);

// 10 log10(sum y_s^2 / (sum est^2 + 1e-12)), whole utterance.
double Decay(std::span<const double> mixture_ref, std::span<const double> estimate);

enum class EvalCase { kNoTarget, kOneTarget, kTwoTarget };

const char *ToString(EvalCase c);
EvalCase CaseFromCount(std::size_t in_region);

struct SceneRecord {
  std::string scene_id;
  EvalCase eval_case = EvalCase::kNoTarget;
  double steer_deg = 0;
  std::optional<double> sdr_db;    // scenes with a target
  std::optional<double> decay_db;  // scenes without one
  // Reserved for externally computed scores; never filled here.
  std::optional<double> pesq;
  std::optional<double> stoi;
};

struct Aggregate {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
};

struct EvalReport {
  std::string pipeline;
  std::vector<SceneRecord> records;
  std::vector<std::pair<std::string, std::string>> warnings;  // scene, message

  // Keys "no_target" (Decay) and "one_target" / "two_target" (SI-SDR);
  // cases without records are absent.
  std::vector<std::pair<std::string, Aggregate>> Aggregates() const;

  nlohmann::json ToJson() const;
  std::string ToCsv() const;
  std::string SummaryTable() const;
};

Aggregate Summarize(std::vector<double> values);

enum class MaskKind { kPassthrough, kOracle, kFile };

struct PipelineConfig {
  MaskKind mask = MaskKind::kPassthrough;
  // kFile: path template; "{scene}" and "{angle}" are substituted.
  std::string mask_path;
  RegionTest region_test = RegionTest::kExact;
};

PipelineConfig PipelineFromString(const std::string &spec);
std::string ToString(const PipelineConfig &cfg);

// Separates one scene steered at its target region and scores it.
SceneRecord EvaluateScene(const SceneTruth &truth, const std::string &scene_id,
                          const PipelineConfig &cfg);

// Scene directories are taken from manifest.json when present, otherwise
// from the sorted subdirectories holding a meta.json. A directory that is
// itself a scene is evaluated alone.
std::vector<std::filesystem::path> ListScenes(const std::filesystem::path &dir);

EvalReport EvaluateSceneSet(const std::filesystem::path &dir,
                            const PipelineConfig &cfg);

// report.json and report.csv.
void WriteReport(const EvalReport &report, const std::filesystem::path &dir);

}  // namespace rss
