#pragma once

#include <vector>

#include "rss/das.hpp"
#include "rss/dsp.hpp"

namespace rss {

inline constexpr double kDrrEpsilon = 1e-8;
inline constexpr double kDrrClampDb = 40.0;

// G = |Yj| / (|Yi| + eps)
RealPlane DrrGain(const ComplexPlane &yi, const ComplexPlane &yj);
// Yi scaled per bin by the real gain; phase is kept.
ComplexPlane Compensate(const ComplexPlane &yi, const RealPlane &gain);
// R = |Yj - Yi^g|^2
RealPlane ResidualEnergy(const ComplexPlane &yj, const ComplexPlane &yig);
// D = |Yj|^2 - R, may be negative.
RealPlane DirectEnergy(const ComplexPlane &yj, const RealPlane &residual);

enum class DrrMode { kCat, kRatio };

const char *ToString(DrrMode mode);
DrrMode DrrModeFromString(const std::string &s);

struct DrrPairFeatures {
  std::vector<RealPlane> direct;    // D per pair
  std::vector<RealPlane> residual;  // R per pair
  DrrMode mode = DrrMode::kRatio;
  PairList pair_list;

  // Cat: [D_0..D_{P-1}, R_0..R_{P-1}] (2P planes), raw values.
  // Ratio: 10 log10(max(D,eps) / max(R,eps)) clamped to +-40 dB (P planes).
  std::vector<RealPlane> Emitted() const;
};

RealPlane DrrRatioDb(const RealPlane &direct, const RealPlane &residual);

DrrPairFeatures DrrFeatures(const SpectrogramStack &aligned_spec,
                            const PairList &pairs, DrrMode mode);
DrrPairFeatures DrrFeatures(const AlignedSignals &aligned,
                            const PairList &pairs, DrrMode mode);

}  // namespace rss
