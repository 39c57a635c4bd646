#include "rss/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include "rss/error.hpp"

namespace rss {

std::size_t Tensor::NumElements() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor TensorFromPlanes(const std::vector<RealPlane> &planes,
                        std::string kind) {
  Tensor t;
  t.kind = std::move(kind);
  const std::size_t frames = planes.empty() ? 0 : planes.front().frames();
  const std::size_t bins = planes.empty() ? 0 : planes.front().bins();
  t.shape = {planes.size(), frames, bins};
  t.data.reserve(planes.size() * frames * bins);
  for (const auto &p : planes) {
    RequireSameShape(p, planes.front());
    for (double v : p.data()) t.data.push_back(static_cast<float>(v));
  }
  return t;
}

Tensor TensorFromPlane(const RealPlane &plane, std::string kind) {
  Tensor t;
  t.kind = std::move(kind);
  t.shape = {plane.frames(), plane.bins()};
  t.data.reserve(plane.size());
  for (double v : plane.data()) t.data.push_back(static_cast<float>(v));
  return t;
}

namespace {

std::filesystem::path WithExt(std::filesystem::path p, const char *ext) {
  if (p.extension() == ".f32" || p.extension() == ".json")
    p.replace_extension();
  p += ext;
  return p;
}

}  // namespace

void WriteTensor(const std::filesystem::path &base, const Tensor &tensor,
                 const FrameConfig &cfg) {
  Require(tensor.data.size() == tensor.NumElements(),
          "tensor data does not match its shape", ErrorCode::kData);
  nlohmann::json meta = tensor.extra.is_object() ? tensor.extra
                                                 : nlohmann::json::object();
  meta["shape"] = tensor.shape;
  meta["kind"] = tensor.kind;
  meta["frame_len"] = cfg.frame_len;
  meta["hop"] = cfg.hop;
  meta["dtype"] = "float32";

  const auto bin_path = WithExt(base, ".f32");
  std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
  Require(bin.good(), "cannot write " + bin_path.string(), ErrorCode::kIo);
  bin.write(reinterpret_cast<const char *>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.data.size() * sizeof(float)));
  Require(bin.good(), "short write to " + bin_path.string(), ErrorCode::kIo);

  const auto json_path = WithExt(base, ".json");
  std::ofstream js(json_path, std::ios::trunc);
  Require(js.good(), "cannot write " + json_path.string(), ErrorCode::kIo);
  js << meta.dump(2) << "\n";
}

Tensor ReadTensor(const std::filesystem::path &path) {
  const auto json_path = WithExt(path, ".json");
  const auto bin_path = WithExt(path, ".f32");
  std::ifstream js(json_path);
  Require(js.good(), "cannot open " + json_path.string(), ErrorCode::kIo);
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kData, json_path.string() + ": " + e.what());
  }
  Tensor t;
  try {
    t.shape = meta.at("shape").get<std::vector<std::size_t>>();
    t.kind = meta.value("kind", "");
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kData, json_path.string() + ": " + e.what());
  }
  t.extra = meta;
  std::ifstream bin(bin_path, std::ios::binary);
  Require(bin.good(), "cannot open " + bin_path.string(), ErrorCode::kIo);
  std::vector<char> bytes((std::istreambuf_iterator<char>(bin)),
                          std::istreambuf_iterator<char>());
  Require(bytes.size() == t.NumElements() * sizeof(float),
          bin_path.string() + ": size does not match sidecar shape",
          ErrorCode::kData);
  t.data.resize(t.NumElements());
  std::memcpy(t.data.data(), bytes.data(), bytes.size());
  return t;
}

}  // namespace rss
