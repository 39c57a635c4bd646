// rss: scene simulation, features, separation, evaluation and heatmaps.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rss/rss.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> count;
  std::string preset;
  std::string scene_case;
  std::optional<double> duration;
  std::string das;
  std::string drr;
  std::string mask;
  std::string regions;
  std::vector<double> t60_range;
  std::optional<double> t60;
  std::optional<double> grid_step;
  std::string scenes;
  bool verbose = false;
};

std::vector<double> ParseAngles(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(s);
  return out;
}

// Config file first, then explicit flags on top.
nlohmann::json BuildConfig(const Flags &f) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + f.config);
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!cfg.is_object())
      throw CLI::ValidationError("--config", "expected a JSON object");
  }
  if (f.seed) cfg["seed"] = *f.seed;
  if (!f.out.empty()) cfg["out"] = f.out;
  if (f.count) cfg["count"] = *f.count;
  if (!f.preset.empty()) cfg["preset"] = f.preset;
  if (!f.scene_case.empty()) cfg["case"] = f.scene_case;
  if (f.duration) cfg["duration"] = *f.duration;
  if (!f.das.empty()) cfg["das"] = f.das;
  if (!f.drr.empty()) cfg["drr"] = f.drr;
  if (!f.mask.empty()) cfg["mask"] = f.mask;
  if (!f.regions.empty()) {
    try {
      cfg["regions"] = ParseAngles(f.regions);
    } catch (const std::exception &) {
      throw CLI::ValidationError("--regions",
                                 "expected comma-separated degrees, got '" +
                                     f.regions + "'");
    }
  }
  if (!f.t60_range.empty()) cfg["t60_range"] = f.t60_range;
  if (f.t60) cfg["t60"] = *f.t60;
  if (f.grid_step) cfg["grid_step"] = *f.grid_step;
  if (!f.scenes.empty()) cfg["scenes"] = f.scenes;
  return cfg;
}

void AddCommon(CLI::App *cmd, Flags &f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override it");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("-v,--verbose", f.verbose, "Also print the JSON result");
}

void AddScenes(CLI::App *cmd, Flags &f) {
  cmd->add_option("scenes", f.scenes, "Scene set or single scene directory");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Regional speech separation toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto *sim = app.add_subcommand("simulate", "Synthesize labeled scenes");
  AddCommon(sim, f);
  sim->add_option("--count", f.count, "Number of scenes");
  sim->add_option("--preset", f.preset, "paper-linear8 | t60-sweep | fig2-heatmap");
  sim->add_option("--case", f.scene_case,
                  "full | mixed | no_target | one_target | two_target | clean");
  sim->add_option("--duration", f.duration, "Scene length in seconds");
  sim->add_option("--t60-range", f.t60_range, "T60 bounds in seconds")
      ->expected(2);

  auto *feat = app.add_subcommand("features", "Extract DAS and DRR features");
  AddCommon(feat, f);
  AddScenes(feat, f);
  feat->add_option("--das", f.das, "all-pairs | subset | none");
  feat->add_option("--drr", f.drr, "cat | ratio | none");
  feat->add_option("--regions", f.regions, "Steering angles, e.g. 75,105");

  auto *sep = app.add_subcommand("separate", "Write per-region estimates");
  AddCommon(sep, f);
  AddScenes(sep, f);
  sep->add_option("--mask", f.mask, "oracle | passthrough | file:<path>");
  sep->add_option("--regions", f.regions, "Steering angles, e.g. 75,105");

  auto *eval = app.add_subcommand("evaluate", "Score a scene set");
  AddCommon(eval, f);
  AddScenes(eval, f);
  eval->add_option("--mask", f.mask, "oracle | passthrough | file:<path>");

  auto *heat = app.add_subcommand("heatmap", "Decay map over a room");
  AddCommon(heat, f);
  heat->add_option("--grid-step", f.grid_step, "Grid spacing in meters");
  heat->add_option("--mask", f.mask, "oracle | passthrough");
  heat->add_option("--t60", f.t60, "Room T60 in seconds");

  nlohmann::json cfg;
  try {
    app.parse(argc, argv);
    cfg = BuildConfig(f);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  char *result = nullptr;
  char *text = nullptr;
  const rss_status st =
      rss_run_command(name.c_str(), cfg.dump().c_str(), &result, &text);
  if (st != RSS_OK) {
    std::fprintf(stderr, "rss %s: %s\n", name.c_str(), rss_last_error());
    return st == RSS_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  }
  std::fputs(text, stdout);
  if (f.verbose) std::printf("%s\n", result);
  rss_string_free(result);
  rss_string_free(text);
  return 0;
}
