#include "rss/separation.hpp"

#include <algorithm>
#include <cmath>

#include "rss/error.hpp"

namespace rss {

TFMask::TFMask(RealPlane values) : values_(std::move(values)) {
  for (double v : values_.data())
    Require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
            "mask values must lie in [0, 1]", ErrorCode::kData);
}

TFMask TFMask::Constant(std::size_t frames, std::size_t bins, double value) {
  return TFMask(RealPlane(frames, bins, value));
}

bool SourceInRegion(const SceneTruth &truth, const SourceTruth &src,
                    const Region &region, RegionTest test) {
  const auto &pose = truth.spec.array_pose;
  return test == RegionTest::kExact
             ? InRegion(region, src.position.x, src.position.y, pose)
             : InPerceivedRegion(region, src.position.x, src.position.y, pose,
                                 truth.spec.geometry);
}

namespace {

struct SplitImages {
  MultichannelAudio target;
  MultichannelAudio rest;
};

SplitImages Split(const SceneTruth &truth, const Region &region,
                  RegionTest test) {
  const std::size_t m = truth.mixture.num_channels();
  const std::size_t n = truth.mixture.num_frames();
  SplitImages s{MultichannelAudio(m, n), MultichannelAudio(m, n)};
  for (std::size_t i = 0; i < truth.sources.size(); ++i) {
    if (SourceInRegion(truth, truth.sources[i], region, test))
      s.target += truth.source_images[i];
    else
      s.rest += truth.source_images[i];
  }
  s.rest += truth.noise_image;
  return s;
}

}  // namespace

Signal SteeredTargetImage(const SceneTruth &truth, const Region &region,
                          double angle_deg, RegionTest test) {
  const SplitImages s = Split(truth, region, test);
  return SteeredSum(s.target, truth.spec.geometry, angle_deg);
}

TFMask OracleMask(const SceneTruth &truth, const Region &region,
                  double angle_deg, const ArrayGeometry &geom,
                  RegionTest test) {
  Require(!truth.source_images.empty() &&
              truth.source_images.size() == truth.sources.size(),
          "oracle mask needs per-source images", ErrorCode::kData);
  const SplitImages s = Split(truth, region, test);
  const ComplexPlane st = Stft(SteeredSum(s.target, geom, angle_deg));
  const ComplexPlane snt = Stft(SteeredSum(s.rest, geom, angle_deg));
  RealPlane m(st.frames(), st.bins());
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double a = std::abs(st.data()[k]);
    const double b = std::abs(snt.data()[k]);
    m.data()[k] = a / (a + b + kMaskEpsilon);
  }
  return TFMask(std::move(m));
}

TFMask MaskFromTensor(const Tensor &tensor) {
  Require(tensor.kind == "mask",
          "expected a tensor of kind \"mask\", got \"" + tensor.kind + "\"",
          ErrorCode::kData);
  Require(tensor.shape.size() == 2, "mask tensor must be [frames, bins]",
          ErrorCode::kData);
  RealPlane p(tensor.shape[0], tensor.shape[1]);
  for (std::size_t k = 0; k < p.size(); ++k) p.data()[k] = tensor.data[k];
  return TFMask(std::move(p));
}

TFMask LoadMask(const std::filesystem::path &path) {
  return MaskFromTensor(ReadTensor(path));
}

Tensor MaskToTensor(const TFMask &mask) {
  return TensorFromPlane(mask.values(), "mask");
}

Signal ApplyMaskToSteered(std::span<const double> steered, const TFMask &mask) {
  ComplexPlane spec = Stft(steered);
  Require(mask.frames() == spec.frames() && mask.bins() == spec.bins(),
          "mask shape [" + std::to_string(mask.frames()) + "," +
              std::to_string(mask.bins()) + "] does not match STFT [" +
              std::to_string(spec.frames()) + "," +
              std::to_string(spec.bins()) + "]",
          ErrorCode::kData);
  for (std::size_t k = 0; k < spec.size(); ++k)
    spec.data()[k] *= mask.values().data()[k];
  return Istft(spec, steered.size());
}

Signal ApplyMask(const MultichannelAudio &audio, const ArrayGeometry &geom,
                 double angle_deg, const TFMask &mask) {
  return ApplyMaskToSteered(SteeredSum(audio, geom, angle_deg), mask);
}

TFMask ResolveMask(const MaskSource &source, const MultichannelAudio &audio,
                   const ArrayGeometry &geom, double angle_deg) {
  const FrameConfig cfg;
  const std::size_t frames = cfg.NumFrames(audio.num_frames());
  Require(frames > 0, "audio shorter than one frame", ErrorCode::kData);
  if (std::holds_alternative<PassthroughMask>(source))
    return TFMask::Constant(frames, cfg.num_bins(), 1.0);
  if (const auto *o = std::get_if<OracleMaskSource>(&source)) {
    Require(o->truth != nullptr, "oracle mask needs scene truth",
            ErrorCode::kData);
    return OracleMask(*o->truth, o->region, angle_deg, geom, o->test);
  }
  TFMask m = LoadMask(std::get<FileMaskSource>(source).path);
  Require(m.frames() == frames && m.bins() == cfg.num_bins(),
          "mask file shape [" + std::to_string(m.frames()) + "," +
              std::to_string(m.bins()) + "] does not match STFT [" +
              std::to_string(frames) + "," + std::to_string(cfg.num_bins()) +
              "]",
          ErrorCode::kData);
  return m;
}

Signal Separate(const MultichannelAudio &audio, const ArrayGeometry &geom,
                double angle_deg, const MaskSource &source) {
  // The baseline output is y_s itself, not its STFT round trip, which
  // fades the first and last half-frames.
  if (std::holds_alternative<PassthroughMask>(source))
    return SteeredSum(audio, geom, angle_deg);
  return ApplyMask(audio, geom, angle_deg,
                   ResolveMask(source, audio, geom, angle_deg));
}

}  // namespace rss
