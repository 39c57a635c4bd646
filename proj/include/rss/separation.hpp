#pragma once

#include <filesystem>
#include <variant>

#include "rss/das.hpp"
#include "rss/dsp.hpp"
#include "rss/scene.hpp"
#include "rss/tensor_io.hpp"

namespace rss {

inline constexpr double kMaskEpsilon = 1e-8;

// Real-valued time-frequency mask with every value in [0, 1].
class TFMask {
 public:
  TFMask() = default;
  explicit TFMask(RealPlane values);
  static TFMask Constant(std::size_t frames, std::size_t bins, double value);

  const RealPlane &values() const { return values_; }
  std::size_t frames() const { return values_.frames(); }
  std::size_t bins() const { return values_.bins(); }

 private:
  RealPlane values_;
};

// Exact: the region predicate as stated. ArrayPerceived: additionally
// accepts the mirror image of the region across a linear array's axis.
enum class RegionTest { kExact, kArrayPerceived };

bool SourceInRegion(const SceneTruth &truth, const SourceTruth &src,
                    const Region &region, RegionTest test);

// Steered (aligned, averaged) sum of the in-region source images. This is
// the reference signal for SI-SDR.
Signal SteeredTargetImage(const SceneTruth &truth, const Region &region,
                          double angle_deg, RegionTest test = RegionTest::kExact);

// Magnitude ideal ratio mask in the steered domain:
//   m = |S_t| / (|S_t| + |S_nt| + eps)
// with S_t the STFT of the steered in-region images and S_nt that of the
// steered remaining images plus noise.
TFMask OracleMask(const SceneTruth &truth, const Region &region,
                  double angle_deg, const ArrayGeometry &geom,
                  RegionTest test = RegionTest::kExact);

TFMask MaskFromTensor(const Tensor &tensor);
TFMask LoadMask(const std::filesystem::path &path);
Tensor MaskToTensor(const TFMask &mask);

// istft(mask * stft(y_s)), same length as y_s.
Signal ApplyMaskToSteered(std::span<const double> steered, const TFMask &mask);
Signal ApplyMask(const MultichannelAudio &audio, const ArrayGeometry &geom,
                 double angle_deg, const TFMask &mask);

struct PassthroughMask {};
struct OracleMaskSource {
  const SceneTruth *truth = nullptr;
  Region region;
  RegionTest test = RegionTest::kExact;
};
struct FileMaskSource {
  std::filesystem::path path;
};
using MaskSource = std::variant<PassthroughMask, OracleMaskSource, FileMaskSource>;

// Builds the mask for steering `audio` toward `angle_deg`; validates the
// shape against the steered STFT.
TFMask ResolveMask(const MaskSource &source, const MultichannelAudio &audio,
                   const ArrayGeometry &geom, double angle_deg);

// Passthrough returns y_s unchanged; other sources go through ApplyMask.
Signal Separate(const MultichannelAudio &audio, const ArrayGeometry &geom,
                double angle_deg, const MaskSource &source);

}  // namespace rss
