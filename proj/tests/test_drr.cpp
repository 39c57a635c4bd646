#include <doctest.h>

#include "fixtures.hpp"
#include "rss/drr.hpp"
#include "rss/error.hpp"

using namespace rss;

namespace {

ComplexPlane RandomPlane(std::size_t t, std::size_t f, std::mt19937_64 &rng,
                         double scale = 1.0) {
  std::normal_distribution<double> g;
  ComplexPlane p(t, f);
  for (auto &v : p.data()) v = scale * Complex(g(rng), g(rng));
  return p;
}

double Mean(const RealPlane &p) {
  double s = 0;
  for (double v : p.data()) s += v;
  return s / static_cast<double>(p.size());
}

double MeanRatioDb(const MultichannelAudio &img, const ArrayGeometry &g,
                   double angle) {
  const auto f = DrrFeatures(ShiftAlign(img, ComputeDelays(g, angle)),
                             SymmetricPairs(g.num_mics()), DrrMode::kRatio);
  double s = 0;
  for (const auto &p : f.Emitted()) s += Mean(p);
  return s / static_cast<double>(f.pair_list.size());
}

}  // namespace

TEST_CASE("gain examples") {
  std::mt19937_64 rng(1);
  const ComplexPlane yi = RandomPlane(3, 20, rng);
  const RealPlane g1 = DrrGain(yi, yi);
  for (std::size_t k = 0; k < yi.size(); ++k)
    if (std::abs(yi.data()[k]) > 1e-2) CHECK(std::abs(g1.data()[k] - 1.0) < 1e-6);
  ComplexPlane yj = yi;
  for (auto &v : yj.data()) v *= 2.0;
  const RealPlane g2 = DrrGain(yi, yj);
  for (double v : g2.data()) CHECK(v == doctest::Approx(2.0).epsilon(1e-6));
  const RealPlane g0 = DrrGain(ComplexPlane(3, 20), yj);
  for (std::size_t k = 0; k < yj.size(); ++k) {
    CHECK(std::isfinite(g0.data()[k]));
    CHECK(g0.data()[k] == doctest::Approx(std::abs(yj.data()[k]) / kDrrEpsilon));
  }
  CHECK_THROWS_AS(DrrGain(yi, ComplexPlane(3, 21)), Error);
}

TEST_CASE("compensation keeps phase and matches magnitude") {
  std::mt19937_64 rng(2);
  const ComplexPlane yi = RandomPlane(4, 30, rng), yj = RandomPlane(4, 30, rng);
  const ComplexPlane c = Compensate(yi, DrrGain(yi, yj));
  for (std::size_t k = 0; k < yi.size(); ++k) {
    CHECK(std::abs(c.data()[k]) == doctest::Approx(std::abs(yj.data()[k])).epsilon(1e-6));
    CHECK(std::arg(c.data()[k]) == doctest::Approx(std::arg(yi.data()[k])));
  }
  const ComplexPlane same = Compensate(yi, RealPlane(4, 30, 1.0));
  CHECK(same.data() == yi.data());
}

TEST_CASE("residual and direct identities") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexPlane yi = RandomPlane(5, 40, rng), yj = RandomPlane(5, 40, rng, 3.0);
    const RealPlane r = ResidualEnergy(yj, Compensate(yi, DrrGain(yi, yj)));
    const RealPlane d = DirectEnergy(yj, r);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double p = std::norm(yj.data()[k]);
      CHECK(r.data()[k] >= 0.0);
      CHECK(std::abs(d.data()[k] + r.data()[k] - p) <= 1e-6 * p);
    }
  }
  const ComplexPlane y = RandomPlane(2, 10, rng);
  const RealPlane self = ResidualEnergy(y, Compensate(y, DrrGain(y, y)));
  for (double v : self.data())
    CHECK(v < 1e-12);
  ComplexPlane twice = y;
  for (auto &v : twice.data()) v *= 2.0;
  const RealPlane r2 = ResidualEnergy(y, twice);
  const RealPlane d2 = DirectEnergy(y, r2);
  for (double v : d2.data()) CHECK(std::abs(v) < 1e-12);
  const RealPlane d0 = DirectEnergy(y, RealPlane(2, 10));
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(d0.data()[k] == std::norm(y.data()[k]));
}

TEST_CASE("emitted layouts") {
  std::mt19937_64 rng(4);
  std::vector<Signal> ch;
  for (int c = 0; c < 8; ++c) ch.push_back(oracle::Gaussian(4000, rng));
  const auto al = ShiftAlign(MultichannelAudio(ch), ComputeDelays(PaperLinear8(), 75));
  const auto cat = DrrFeatures(al, SymmetricPairs(8), DrrMode::kCat);
  const auto ratio = DrrFeatures(al, SymmetricPairs(8), DrrMode::kRatio);
  REQUIRE(cat.Emitted().size() == 8);
  REQUIRE(ratio.Emitted().size() == 4);
  CHECK(cat.Emitted()[0].bins() == 513);
  CHECK(cat.Emitted()[0].data() == cat.direct[0].data());
  CHECK(cat.Emitted()[4].data() == cat.residual[0].data());
  for (const auto &p : ratio.Emitted())
    for (double v : p.data()) {
      CHECK(std::isfinite(v));
      CHECK(v >= -40.0);
      CHECK(v <= 40.0);
    }
  CHECK(DrrModeFromString("cat") == DrrMode::kCat);
  CHECK_THROWS_AS(DrrModeFromString("sum"), Error);
}

TEST_CASE("identical channels clamp at +40 dB") {
  std::mt19937_64 rng(5);
  const Signal x = oracle::Gaussian(4000, rng);
  SteeringDelays d;
  d.shifts = {0, 0};
  const auto f = DrrFeatures(ShiftAlign(MultichannelAudio({x, x}), d), {{0, 1}},
                             DrrMode::kRatio);
  const auto planes = f.Emitted();
  for (double v : planes[0].data()) CHECK(v == doctest::Approx(40.0));
}

TEST_CASE("uncorrelated noise gives a non-positive median") {
  std::mt19937_64 rng(6);
  SteeringDelays d;
  d.shifts = {0, 0};
  const MultichannelAudio a({oracle::Gaussian(32000, rng), oracle::Gaussian(32000, rng)});
  auto v = DrrFeatures(ShiftAlign(a, d), {{0, 1}}, DrrMode::kRatio).Emitted()[0].data();
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  CHECK(v[v.size() / 2] <= 0.0);
}

TEST_CASE("ratio mode is gain invariant") {
  std::mt19937_64 rng(7);
  const ComplexPlane yi = RandomPlane(3, 50, rng), yj = RandomPlane(3, 50, rng);
  auto ratio = [](const ComplexPlane &a, const ComplexPlane &b) {
    const RealPlane r = ResidualEnergy(b, Compensate(a, DrrGain(a, b)));
    return DrrRatioDb(DirectEnergy(b, r), r);
  };
  ComplexPlane si = yi, sj = yj;
  for (auto &v : si.data()) v *= 7.0;
  for (auto &v : sj.data()) v *= 7.0;
  const RealPlane a = ratio(yi, yj), b = ratio(si, sj);
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK(a.data()[k] == doctest::Approx(b.data()[k]).epsilon(1e-6));
}

TEST_CASE("anechoic residual is tiny and reverberation raises it") {
  const ArrayGeometry g = fixture::DelayExactArray(8);
  const Signal dry = fixture::PaddedSpeech(24000, 3000, 8);
  const MultichannelAudio img = fixture::AnechoicImage(g, dry, 0.0, 40.0);
  const auto al = ShiftAlign(img, ComputeDelays(g, 0.0));
  const auto f = DrrFeatures(al, SymmetricPairs(8), DrrMode::kCat);
  const SpectrogramStack spec = Stft(al.signals);
  for (std::size_t p = 0; p < f.pair_list.size(); ++p) {
    const auto &yj = spec.channels[f.pair_list[p].second];
    double pj = 0;
    for (const auto &v : yj.data()) pj += std::norm(v);
    pj /= static_cast<double>(yj.size());
    CHECK(Mean(f.residual[p]) <= 1e-4 * pj);
  }

  const RoomSpec dry_room{{6, 5, 3}, 0.0}, wet_room{{6, 5, 3}, 0.5};
  const ArrayGeometry pg = PaperLinear8();
  const ArrayPose pose{{3, 2.5, 1.5}, 0};
  const Vec3 src = FromArrayPolar(pose, 75, 1.5, 1.5);
  const Signal s = fixture::PaddedSpeech(24000, 400, 9);
  auto residual = [&](const RoomSpec &room) {
    const auto im = RenderSource(s, SimulateRir(room, src, pg.Posed(pose)));
    const auto ff = DrrFeatures(ShiftAlign(im, ComputeDelays(pg, 75)),
                                SymmetricPairs(8), DrrMode::kCat);
    double r = 0;
    for (const auto &p : ff.residual) r += Mean(p);
    return r;
  };
  CHECK(residual(wet_room) > residual(dry_room));
}

TEST_CASE("ratio DRR falls with distance in a fixed room") {
  const RoomSpec room{{8, 7, 3}, 0.4};
  const ArrayGeometry g = PaperLinear8();
  // Every position at least 1 m from the walls.
  const ArrayPose pose{{3.0, 1.5, 1.5}, 0};
  const Signal s = fixture::PaddedSpeech(32000, 0, 10);
  double prev = 1e9;
  for (double d : {0.5, 1.0, 2.0, 4.0}) {
    const Vec3 src = FromArrayPolar(pose, 75, d, 1.5);
    const auto img = RenderSource(s, SimulateRir(room, src, g.Posed(pose)));
    const double v = MeanRatioDb(img, g, 75);
    CAPTURE(d);
    CHECK(v < prev);
    prev = v;
  }
}
