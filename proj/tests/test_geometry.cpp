#include <doctest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rss/error.hpp"
#include "rss/geometry.hpp"

using namespace rss;

TEST_CASE("paper array delays match the golden file") {
  std::ifstream in(RSS_TEST_DATA_DIR "/golden/linear8_delays.json");
  REQUIRE(in.good());
  const auto golden = nlohmann::json::parse(in);
  const ArrayGeometry geom = PaperLinear8();
  const auto &angles = golden["angles"];
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double a = angles[i].get<double>();
    CAPTURE(a);
    CHECK(ComputeDelays(geom, a).shifts ==
          golden["shifts"][i].get<std::vector<int>>());
  }
}

TEST_CASE("endfire pair 0.343 m apart gives 16 samples") {
  const ArrayGeometry geom({{0, 0, 0}, {0.343, 0, 0}}, 0);
  const auto d = ComputeDelays(geom, 0.0);
  CHECK(d.shifts[0] == 0);
  CHECK(d.shifts[1] == 16);
}

TEST_CASE("random geometries agree with the long-double oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.3, 0.3), ang(0, 360);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + trial % 7;
    std::vector<Vec3> mics;
    std::vector<std::array<double, 3>> raw;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3 p{u(rng), u(rng), 0.1 * u(rng)};
      mics.push_back(p);
      raw.push_back({p.x, p.y, p.z});
    }
    const std::size_t ref = trial % m;
    const double a = ang(rng);
    const auto got = ComputeDelays(ArrayGeometry(mics, ref), a).shifts;
    const auto want = oracle::Delays(raw, ref, a, 100.0);
    if (got != want) ++mismatches;
    CHECK(got[ref] == 0);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("broadside on a symmetric linear array") {
  const auto d = ComputeDelays(PaperLinear8(), 90.0);
  for (int s : d.shifts) CHECK(s == 0);
}

TEST_CASE("endfire delays are monotonic in mic index") {
  for (double a : {0.0, 180.0}) {
    const auto s = ComputeDelays(PaperLinear8(), a).shifts;
    for (std::size_t i = 1; i < s.size(); ++i)
      CHECK((a == 0.0 ? s[i] >= s[i - 1] : s[i] <= s[i - 1]));
  }
}

TEST_CASE("far-field consistency between 100 m and 1000 m") {
  for (double a = 0; a < 360; a += 7.5) {
    const auto n = ComputeDelays(PaperLinear8(), a, kSampleRate, 100.0).shifts;
    const auto f = ComputeDelays(PaperLinear8(), a, kSampleRate, 1000.0).shifts;
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(std::abs(n[i] - f[i]) <= 1);
  }
}

TEST_CASE("compute_delays rejects bad inputs") {
  CHECK_THROWS_AS(ComputeDelays(PaperLinear8(), 75.0, kSampleRate, 0.3), Error);
  CHECK_THROWS_AS(ComputeDelays(PaperLinear8(), 75.0, 0.0), Error);
  CHECK_THROWS_AS(ComputeDelays(PaperLinear8(), std::nan("")), Error);
  CHECK(ComputeDelays(PaperLinear8(), 435.0).shifts ==
        ComputeDelays(PaperLinear8(), 75.0).shifts);
}

TEST_CASE("geometry invariants") {
  CHECK_THROWS_AS(ArrayGeometry({{0, 0, 0}}, 0), Error);
  CHECK_THROWS_AS(ArrayGeometry({{0, 0, 0}, {1, 0, 0}}, 2), Error);
  CHECK_THROWS_AS(ArrayGeometry({{0, 0, 0}, {0, 0, 1e-7}}, 0), Error);
  const ArrayGeometry g = PaperLinear8();
  CHECK(g.num_mics() == 8);
  CHECK(g.Aperture() == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(g.IsLinear());
  CHECK(g.AxisAzimuth() == doctest::Approx(0.0));
}

TEST_CASE("in_region examples") {
  const Region r(70, 80, 1.8);
  const ArrayPose pose{{2.0, 3.0, 1.5}, 30.0};
  auto at = [&](double az, double d) {
    const Vec3 p = FromArrayPolar(pose, az, d, 1.5);
    return InRegion(r, p.x, p.y, pose);
  };
  CHECK(at(75, 1.0));
  CHECK_FALSE(at(75, 2.5));
  CHECK(at(75, 1.8 - 1e-12));
  CHECK(r.Contains(75, 1.8));
  CHECK(r.Contains(70, 1.0));
  CHECK(r.Contains(80, 1.0));
  CHECK_FALSE(at(60, 1.0));
  CHECK_FALSE(InRegion(r, pose.position.x, pose.position.y, pose));
}

TEST_CASE("polar round trip under yaw") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> az(0, 360), d(0.1, 5), yaw(-720, 720);
  for (int i = 0; i < 200; ++i) {
    const ArrayPose pose{{1.0, -2.0, 0.5}, yaw(rng)};
    const double a = az(rng), r = d(rng);
    const Vec3 p = FromArrayPolar(pose, a, r, 0.0);
    const Polar q = ToArrayPolar(pose, p.x, p.y);
    CHECK(q.distance == doctest::Approx(r).epsilon(1e-9));
    const double diff = std::fmod(q.azimuth_deg - a + 540.0, 360.0) - 180.0;
    CHECK(std::abs(diff) < 1e-8);
  }
}

TEST_CASE("perceived region adds the mirror across the array axis") {
  const Region r(70, 80, 1.8);
  const ArrayPose pose{{0, 0, 0}, 0};
  const ArrayGeometry g = PaperLinear8();
  const Vec3 mirror = FromArrayPolar(pose, 285.0, 1.0, 0);  // -75 deg
  CHECK_FALSE(InRegion(r, mirror.x, mirror.y, pose));
  CHECK(InPerceivedRegion(r, mirror.x, mirror.y, pose, g));
  const Vec3 off = FromArrayPolar(pose, 200.0, 1.0, 0);
  CHECK_FALSE(InPerceivedRegion(r, off.x, off.y, pose, g));
}

TEST_CASE("region validation and wrap") {
  CHECK_THROWS_AS(Region(80, 70, 1.8), Error);
  CHECK_THROWS_AS(Region(70, 80, 1.0, 1.5), Error);
  CHECK_THROWS_AS(Region(70, 80, 0.0), Error);
  const Region w(430, 440, 1.0);
  CHECK(w.azimuth_min() == doctest::Approx(70));
  CHECK(w.CenterAzimuth() == doctest::Approx(75));
  CHECK(Region(70, 80, 1.8).AzimuthGap(95) == doctest::Approx(15));
}

TEST_CASE("pair lists") {
  CHECK(AllPairs(8).size() == 28);
  CHECK(SymmetricPairs(8) == PairList{{0, 7}, {1, 6}, {2, 5}, {3, 4}});
  CHECK_THROWS_AS(ValidatePairs({{1, 1}}, 4), Error);
  CHECK_THROWS_AS(ValidatePairs({{0, 4}}, 4), Error);
  CHECK_THROWS_AS(ValidatePairs({{0, 1}, {0, 1}}, 4), Error);
}

TEST_CASE("geometry and region JSON") {
  const auto j = nlohmann::json::parse(
      R"({"mics": [[0,0,0],[0.1,0,0],[0.2,0,0]], "ref": 1})");
  const ArrayGeometry g = GeometryFromJson(j);
  CHECK(g.num_mics() == 3);
  CHECK(g.ref_index() == 1);
  CHECK(GeometryToJson(GeometryFromJson(GeometryToJson(g))) == GeometryToJson(g));
  const Region r = RegionFromJson(nlohmann::json::parse(
      R"({"azimuth": [70, 80], "max_distance": 1.8})"));
  CHECK(r.max_distance() == 1.8);
  CHECK(r.min_distance() == 0.0);
  CHECK_THROWS_AS(GeometryFromJson(nlohmann::json::parse(R"({"mics": 3})")), Error);
}
