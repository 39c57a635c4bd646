#include "rss/drr.hpp"

#include <algorithm>
#include <cmath>

namespace rss {

RealPlane DrrGain(const ComplexPlane &yi, const ComplexPlane &yj) {
  RequireSameShape(yi, yj);
  RealPlane g(yi.frames(), yi.bins());
  for (std::size_t k = 0; k < g.size(); ++k)
    g.data()[k] = std::abs(yj.data()[k]) / (std::abs(yi.data()[k]) + kDrrEpsilon);
  return g;
}

ComplexPlane Compensate(const ComplexPlane &yi, const RealPlane &gain) {
  RequireSameShape(yi, gain);
  ComplexPlane out(yi.frames(), yi.bins());
  for (std::size_t k = 0; k < out.size(); ++k)
    out.data()[k] = yi.data()[k] * gain.data()[k];
  return out;
}

RealPlane ResidualEnergy(const ComplexPlane &yj, const ComplexPlane &yig) {
  RequireSameShape(yj, yig);
  RealPlane r(yj.frames(), yj.bins());
  for (std::size_t k = 0; k < r.size(); ++k)
    r.data()[k] = std::norm(yj.data()[k] - yig.data()[k]);
  return r;
}

RealPlane DirectEnergy(const ComplexPlane &yj, const RealPlane &residual) {
  RequireSameShape(yj, residual);
  RealPlane d(yj.frames(), yj.bins());
  for (std::size_t k = 0; k < d.size(); ++k)
    d.data()[k] = std::norm(yj.data()[k]) - residual.data()[k];
  return d;
}

const char *ToString(DrrMode mode) {
  return mode == DrrMode::kCat ? "cat" : "ratio";
}

DrrMode DrrModeFromString(const std::string &s) {
  if (s == "cat") return DrrMode::kCat;
  if (s == "ratio") return DrrMode::kRatio;
  Fail(ErrorCode::kInvalidArgument, "unknown DRR mode '" + s + "'");
}

RealPlane DrrRatioDb(const RealPlane &direct, const RealPlane &residual) {
  RequireSameShape(direct, residual);
  RealPlane out(direct.frames(), direct.bins());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double d = std::max(direct.data()[k], kDrrEpsilon);
    const double r = std::max(residual.data()[k], kDrrEpsilon);
    out.data()[k] =
        std::clamp(10.0 * std::log10(d / r), -kDrrClampDb, kDrrClampDb);
  }
  return out;
}

std::vector<RealPlane> DrrPairFeatures::Emitted() const {
  std::vector<RealPlane> out;
  if (mode == DrrMode::kCat) {
    out = direct;
    out.insert(out.end(), residual.begin(), residual.end());
  } else {
    for (std::size_t p = 0; p < direct.size(); ++p)
      out.push_back(DrrRatioDb(direct[p], residual[p]));
  }
  return out;
}

DrrPairFeatures DrrFeatures(const SpectrogramStack &aligned_spec,
                            const PairList &pairs, DrrMode mode) {
  ValidatePairs(pairs, aligned_spec.num_channels());
  DrrPairFeatures f;
  f.mode = mode;
  f.pair_list = pairs;
  for (const auto &[i, j] : pairs) {
    const ComplexPlane &yi = aligned_spec.channels[i];
    const ComplexPlane &yj = aligned_spec.channels[j];
    RealPlane r = ResidualEnergy(yj, Compensate(yi, DrrGain(yi, yj)));
    f.direct.push_back(DirectEnergy(yj, r));
    f.residual.push_back(std::move(r));
  }
  return f;
}

DrrPairFeatures DrrFeatures(const AlignedSignals &aligned,
                            const PairList &pairs, DrrMode mode) {
  ValidatePairs(pairs, aligned.signals.num_channels());
  return DrrFeatures(Stft(aligned.signals), pairs, mode);
}

}  // namespace rss
