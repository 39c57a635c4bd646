#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rss/rss.h"

namespace fs = std::filesystem;

namespace {

rss_geometry *Linear8() {
  rss_geometry *g = nullptr;
  REQUIRE(rss_geometry_linear(8, 0.7, 0, &g) == RSS_OK);
  return g;
}

rss_audio *NoiseAudio(std::size_t ch, std::size_t frames, unsigned seed) {
  rss_audio *a = nullptr;
  REQUIRE(rss_audio_create(ch, frames, &a) == RSS_OK);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 0.1);
  for (std::size_t c = 0; c < ch; ++c) {
    double *x = rss_audio_channel(a, c);
    for (std::size_t n = 0; n < frames; ++n) x[n] = g(rng);
  }
  return a;
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(rss_version()) > 0);
  rss_geometry *g = nullptr;
  CHECK(rss_geometry_linear(8, 0.7, 9, &g) == RSS_ERR_INVALID_ARGUMENT);
  CHECK(g == nullptr);
  CHECK(std::strlen(rss_last_error()) > 0);
  CHECK(rss_geometry_linear(8, 0.7, 0, nullptr) == RSS_ERR_INVALID_ARGUMENT);
  CHECK(rss_audio_read_wav("/nonexistent/x.wav", nullptr) ==
        RSS_ERR_INVALID_ARGUMENT);
  rss_audio *a = nullptr;
  CHECK(rss_audio_read_wav("/nonexistent/x.wav", &a) != RSS_OK);
  rss_geometry_free(nullptr);
  rss_audio_free(nullptr);
}

TEST_CASE("geometry through the C API") {
  rss_geometry *g = Linear8();
  CHECK(rss_geometry_num_mics(g) == 8);
  int shifts[8];
  REQUIRE(rss_compute_delays(g, 0.0, shifts) == RSS_OK);
  // Endfire toward +x: 0.1 m per mic is 4.66 samples of travel.
  CHECK(shifts[0] == 0);
  for (int i = 1; i < 8; ++i) CHECK(shifts[i] == static_cast<int>(std::floor(i * 0.1 * 16000 / 343 + 1e-9)));
  REQUIRE(rss_compute_delays(g, 90.0, shifts) == RSS_OK);
  for (int s : shifts) CHECK(s == 0);
  int inside = -1;
  REQUIRE(rss_in_region(70, 80, 1.8, 0, 0, 0, 0.3, 1.0, &inside) == RSS_OK);
  CHECK(inside == 1);
  REQUIRE(rss_in_region(70, 80, 1.8, 0, 0, 0, 0.3, 2.0, &inside) == RSS_OK);
  CHECK(inside == 0);
  const double xyz[6] = {0, 0, 0, 0.1, 0, 0};
  rss_geometry *two = nullptr;
  CHECK(rss_geometry_create(xyz, 2, 0, &two) == RSS_OK);
  rss_geometry_free(two);
  rss_geometry_free(g);
}

TEST_CASE("features, separation and metrics") {
  rss_geometry *g = Linear8();
  rss_audio *a = NoiseAudio(8, 16000, 1);
  rss_tensor *t = nullptr;
  REQUIRE(rss_das_features(a, g, 75, 1, &t) == RSS_OK);
  CHECK(rss_tensor_rank(t) == 3);
  CHECK(rss_tensor_dim(t, 0) == 17);
  CHECK(rss_tensor_dim(t, 2) == 80);
  rss_tensor_free(t);
  REQUIRE(rss_das_features(a, g, 75, 0, &t) == RSS_OK);
  CHECK(rss_tensor_dim(t, 0) == 65);
  rss_tensor_free(t);
  REQUIRE(rss_drr_features(a, g, 75, 0, &t) == RSS_OK);
  CHECK(rss_tensor_dim(t, 0) == 8);
  CHECK(rss_tensor_dim(t, 2) == 513);
  const fs::path base = fs::temp_directory_path() / "rss_capi_drr";
  CHECK(rss_tensor_write(t, base.c_str()) == RSS_OK);
  const auto side = nlohmann::json::parse(std::ifstream(base.string() + ".json"));
  CHECK(side.at("kind") == "drr");
  fs::remove(base.string() + ".json");
  fs::remove(base.string() + ".f32");
  rss_tensor_free(t);
  REQUIRE(rss_drr_features(a, g, 75, 1, &t) == RSS_OK);
  CHECK(rss_tensor_dim(t, 0) == 4);
  const std::size_t frames = rss_tensor_dim(t, 1);
  rss_tensor_free(t);

  rss_audio *pass = nullptr;
  REQUIRE(rss_separate(a, g, 75, nullptr, 0, 0, &pass) == RSS_OK);
  CHECK(rss_audio_channels(pass) == 1);
  CHECK(rss_audio_frames(pass) == 16000);
  std::vector<double> ones(frames * 513, 1.0);
  rss_audio *masked = nullptr;
  REQUIRE(rss_separate(a, g, 75, ones.data(), frames, 513, &masked) == RSS_OK);
  double sdr = 0;
  const double *p = rss_audio_channel(pass, 0);
  const double *m = rss_audio_channel(masked, 0);
  REQUIRE(rss_si_sdr(p + 320, m + 320, 16000 - 640, &sdr) == RSS_OK);
  CHECK(sdr > 55);
  double decay = 0;
  REQUIRE(rss_decay(p, p, 16000, &decay) == RSS_OK);
  CHECK(std::abs(decay) < 1e-9);
  CHECK(rss_separate(a, g, 75, ones.data(), frames - 1, 513, &masked) == RSS_ERR_DATA);
  ones[5] = 2.0;
  rss_audio *bad = nullptr;
  CHECK(rss_separate(a, g, 75, ones.data(), frames, 513, &bad) != RSS_OK);
  rss_audio_free(masked);
  rss_audio_free(pass);

  rss_audio *four = NoiseAudio(4, 1000, 2);
  CHECK(rss_das_features(four, g, 75, 1, &t) != RSS_OK);
  rss_audio_free(four);
  rss_audio_free(a);
  rss_geometry_free(g);
}

namespace {

void HalfMask(void *user, size_t, const double *, double *mask, size_t bins) {
  ++*static_cast<int *>(user);
  for (size_t k = 0; k < bins; ++k) mask[k] = 0.5;
}

}  // namespace

TEST_CASE("streaming through the C API") {
  rss_geometry *g = Linear8();
  rss_audio *a = NoiseAudio(8, 320 * 20, 3);
  int calls = 0;
  rss_stream *s = nullptr;
  REQUIRE(rss_stream_create(g, 75, HalfMask, &calls, &s) == RSS_OK);
  const std::size_t hop = rss_stream_hop(s);
  CHECK(hop == 320);
  CHECK(rss_stream_shift_delay(s) == 0);
  std::vector<double> in(hop * 8), out(hop), all;
  for (std::size_t h = 0; h < 20; ++h) {
    for (std::size_t n = 0; n < hop; ++n)
      for (std::size_t c = 0; c < 8; ++c)
        in[n * 8 + c] = rss_audio_channel(a, c)[h * hop + n];
    int emitted = -1;
    REQUIRE(rss_stream_push(s, in.data(), in.size(), out.data(), &emitted) == RSS_OK);
    CHECK(emitted == (h == 0 ? 0 : 1));
    if (emitted) all.insert(all.end(), out.begin(), out.end());
  }
  int emitted = 0;
  REQUIRE(rss_stream_flush(s, out.data(), &emitted) == RSS_OK);
  if (emitted) all.insert(all.end(), out.begin(), out.end());
  CHECK(calls >= 19);
  CHECK(all.size() == 20 * hop);

  rss_audio *pass = nullptr;
  REQUIRE(rss_separate(a, g, 75, nullptr, 0, 0, &pass) == RSS_OK);
  const double *ys = rss_audio_channel(pass, 0);
  double worst = 0;
  for (std::size_t n = hop; n + hop < all.size(); ++n)
    worst = std::max(worst, std::abs(all[n] - 0.5 * ys[n]));
  CHECK(worst < 1e-9);
  CHECK(rss_stream_push(s, in.data(), in.size() - 1, out.data(), &emitted) == RSS_ERR_DATA);
  rss_audio_free(pass);
  rss_stream_free(s);
  rss_audio_free(a);
  rss_geometry_free(g);
}

TEST_CASE("batch commands through the C API") {
  const fs::path dir = fs::temp_directory_path() / "rss_capi_cmd";
  fs::remove_all(dir);
  const std::string cfg =
      nlohmann::json{{"out", dir.string()}, {"count", 2}, {"duration", 1.0}, {"seed", 5}}
          .dump();
  char *json = nullptr, *text = nullptr;
  REQUIRE(rss_run_command("simulate", cfg.c_str(), &json, &text) == RSS_OK);
  const auto result = nlohmann::json::parse(json);
  CHECK(result.is_object());
  rss_string_free(json);
  rss_string_free(text);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(rss_run_command("nope", "{}", nullptr, nullptr) == RSS_ERR_INVALID_ARGUMENT);
  CHECK(rss_run_command("simulate", "[1,", nullptr, nullptr) == RSS_ERR_INVALID_ARGUMENT);
  CHECK(rss_run_command("simulate", "{}", nullptr, nullptr) == RSS_ERR_INVALID_ARGUMENT);
  fs::remove_all(dir);
}
