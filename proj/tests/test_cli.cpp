#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rss_cli_test";

int Run(const std::string &args) {
  const std::string cmd = std::string(RSS_CLI_PATH) + " " + args + " > " +
                          (kWork / "stdout.txt").string() + " 2> " +
                          (kWork / "stderr.txt").string();
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json Json(const fs::path &p) { return nlohmann::json::parse(Slurp(p)); }

struct WorkDir {
  WorkDir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~WorkDir() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  WorkDir w;
  CHECK(Run("--help") == 0);
  CHECK(Run("") == 1);
  CHECK(Run("bogus") == 1);
  CHECK(Run("simulate --count x") == 1);
  CHECK(Run("simulate --out " + (kWork / "s").string() + " --preset nope") == 1);
  CHECK(Slurp(kWork / "stderr.txt").find("preset") != std::string::npos);
  CHECK(Run("simulate") == 1);
  CHECK(Run("features " + (kWork / "s").string() + " --regions 75,abc") == 1);
  CHECK(Run("evaluate --config " + (kWork / "missing.json").string()) == 1);
}

TEST_CASE("data errors exit 2") {
  WorkDir w;
  fs::create_directories(kWork / "empty");
  CHECK(Run("evaluate " + (kWork / "empty").string()) == 2);
}

TEST_CASE("simulate is deterministic and features have the expected shapes") {
  WorkDir w;
  const fs::path a = kWork / "a", b = kWork / "b";
  REQUIRE(Run("simulate --out " + a.string() + " --count 2 --seed 11 --duration 1") == 0);
  REQUIRE(Run("simulate --out " + b.string() + " --count 2 --seed 11 --duration 1") == 0);
  CHECK(Slurp(a / "scene_0000" / "mixture.wav") == Slurp(b / "scene_0000" / "mixture.wav"));
  CHECK(Slurp(a / "manifest.json") == Slurp(b / "manifest.json"));
  CHECK(Json(a / "manifest.json").at("scenes").size() == 2);
  CHECK(fs::exists(a / "resolved_config.json"));
  REQUIRE(Run("simulate --out " + b.string() + " --count 2 --seed 12 --duration 1") == 0);
  CHECK(Slurp(a / "scene_0000" / "mixture.wav") != Slurp(b / "scene_0000" / "mixture.wav"));

  REQUIRE(Run("features " + a.string() + " --das subset --drr ratio --regions 75") == 0);
  const auto das = Json(a / "scene_0000" / "das_75.json");
  CHECK(das.at("shape") == nlohmann::json::array({17, 49, 80}));
  CHECK(das.at("kind") == "das");
  const auto drr = Json(a / "scene_0000" / "drr_75.json");
  CHECK(drr.at("shape") == nlohmann::json::array({4, 49, 513}));
  CHECK(fs::file_size(a / "scene_0000" / "drr_75.f32") == 4u * 49 * 513 * 4);

  REQUIRE(Run("features " + a.string() + " --das all-pairs --drr cat --regions 105") == 0);
  CHECK(Json(a / "scene_0001" / "das_105.json").at("shape")[0] == 65);
  CHECK(Json(a / "scene_0001" / "drr_105.json").at("shape")[0] == 8);

  REQUIRE(Run("separate " + a.string() + " --mask passthrough --regions 75,105") == 0);
  CHECK(fs::exists(a / "scene_0000" / "est_75.wav"));
  CHECK(fs::exists(a / "scene_0001" / "est_105.wav"));

  REQUIRE(Run("evaluate " + a.string() + " --mask oracle") == 0);
  const auto report = Json(a / "report.json");
  CHECK(report.at("records").size() == 2);
  CHECK(Slurp(kWork / "stdout.txt").find("oracle") != std::string::npos);
}

TEST_CASE("presets") {
  WorkDir w;
  const fs::path s = kWork / "sweep";
  REQUIRE(Run("simulate --preset t60-sweep --out " + s.string() + " --count 5 --duration 0.5") == 0);
  const auto m = Json(s / "manifest.json");
  std::vector<double> t60s;
  for (const auto &sc : m.at("scenes")) t60s.push_back(sc.at("t60"));
  CHECK(t60s.size() == 5);
  CHECK(std::set<double>(t60s.begin(), t60s.end()).size() == 5);

  const fs::path f = kWork / "fig2";
  REQUIRE(Run("simulate --preset fig2-heatmap --out " + f.string() + " --count 2 --duration 0.5") == 0);
  for (const auto &sc : Json(f / "manifest.json").at("scenes"))
    CHECK(sc.at("room") == nlohmann::json::array({5.0, 5.0, 3.0}));
}
