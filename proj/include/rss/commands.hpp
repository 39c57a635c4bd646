#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rss {

// Each subcommand takes a JSON config (flags already merged in), writes its
// artifacts, and returns a human-readable summary plus a machine-readable
// result. Every command echoes its fully resolved config as
// resolved_config.json in its output directory.
struct CommandOutput {
  std::string text;
  nlohmann::json result;
};

CommandOutput CmdSimulate(const nlohmann::json &config);
CommandOutput CmdFeatures(const nlohmann::json &config);
CommandOutput CmdSeparate(const nlohmann::json &config);
CommandOutput CmdEvaluate(const nlohmann::json &config);
CommandOutput CmdHeatmap(const nlohmann::json &config);

const std::vector<std::string> &CommandNames();
CommandOutput RunCommand(const std::string &name, const nlohmann::json &config);

}  // namespace rss
