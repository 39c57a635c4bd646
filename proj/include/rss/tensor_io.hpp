#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rss/dsp.hpp"

namespace rss {

// Row-major float32 tensor plus the sidecar metadata stored next to it.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;
  std::string kind;        // fbank | stft | drr | das | mask
  nlohmann::json extra;    // additional sidecar fields (pair_list, mode, ...)

  std::size_t NumElements() const;
};

Tensor TensorFromPlanes(const std::vector<RealPlane> &planes, std::string kind);
Tensor TensorFromPlane(const RealPlane &plane, std::string kind);

// Writes <base>.f32 (little-endian float32, C order) and <base>.json with
// {"shape", "kind", "frame_len", "hop", ...extra}.
void WriteTensor(const std::filesystem::path &base, const Tensor &tensor,
                 const FrameConfig &cfg = {});
// Accepts either the .f32, the .json, or the extension-less base path.
Tensor ReadTensor(const std::filesystem::path &path);

}  // namespace rss
