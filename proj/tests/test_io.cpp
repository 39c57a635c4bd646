#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "rss/audio.hpp"
#include "rss/error.hpp"
#include "rss/tensor_io.hpp"

using namespace rss;
namespace fs = std::filesystem;

TEST_CASE("wav round trip") {
  const fs::path dir = fs::temp_directory_path() / "rss_io_wav";
  fs::create_directories(dir);
  std::mt19937_64 rng(1);
  std::vector<Signal> ch;
  for (int c = 0; c < 3; ++c) {
    Signal x = oracle::Gaussian(1234, rng);
    for (double &v : x) v = std::clamp(v * 0.2, -0.99, 0.99);
    ch.push_back(x);
  }
  const MultichannelAudio a(ch);

  WriteWav(dir / "f.wav", a, WavFormat::kFloat32);
  const MultichannelAudio f = ReadWav(dir / "f.wav");
  REQUIRE(f.num_channels() == 3);
  REQUIRE(f.num_frames() == 1234);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < 1234; ++n)
      CHECK(f.channel(c)[n] == doctest::Approx(a.channel(c)[n]).epsilon(1e-6));

  WriteWav(dir / "p.wav", a, WavFormat::kPcm16);
  const MultichannelAudio p = ReadWav(dir / "p.wav");
  double worst = 0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < 1234; ++n)
      worst = std::max(worst, std::abs(p.channel(c)[n] - a.channel(c)[n]));
  CHECK(worst <= 1.0 / 32768 + 1e-12);

  CHECK_THROWS_AS(ReadWav(dir / "missing.wav"), Error);
  std::ofstream(dir / "junk.wav") << "RIFF1234WAVEnope";
  CHECK_THROWS_AS(ReadWav(dir / "junk.wav"), Error);
  CHECK_THROWS_AS(WriteWav(dir / "r.wav", MultichannelAudio(1, 10, 44100.0)), Error);
  fs::remove_all(dir);
}

TEST_CASE("tensor round trip and sidecar") {
  const fs::path dir = fs::temp_directory_path() / "rss_io_tensor";
  fs::create_directories(dir);
  RealPlane a(3, 4), b(3, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a.data()[k] = static_cast<double>(k);
    b.data()[k] = -static_cast<double>(k) / 8;
  }
  Tensor t = TensorFromPlanes({a, b}, "drr");
  t.extra["mode"] = "cat";
  CHECK(t.shape == std::vector<std::size_t>{2, 3, 4});
  WriteTensor(dir / "x", t);
  CHECK(fs::file_size(dir / "x.f32") == 24 * sizeof(float));

  for (const char *name : {"x", "x.f32", "x.json"}) {
    const Tensor r = ReadTensor(dir / name);
    CHECK(r.shape == t.shape);
    CHECK(r.data == t.data);
    CHECK(r.kind == "drr");
    CHECK(r.extra.at("mode") == "cat");
  }
  const auto side = nlohmann::json::parse(std::ifstream(dir / "x.json"));
  CHECK(side.at("frame_len") == 640);
  CHECK(side.at("hop") == 320);
  // Row-major layout: element [1][2][3].
  std::ifstream raw(dir / "x.f32", std::ios::binary);
  raw.seekg(static_cast<std::streamoff>((12 + 2 * 4 + 3) * sizeof(float)));
  float v = 0;
  raw.read(reinterpret_cast<char *>(&v), sizeof v);
  CHECK(v == doctest::Approx(-11.0 / 8));

  fs::resize_file(dir / "x.f32", 10);
  CHECK_THROWS_AS(ReadTensor(dir / "x"), Error);
  CHECK_THROWS_AS(TensorFromPlanes({a, RealPlane(2, 4)}, "drr"), Error);
  fs::remove_all(dir);
}
