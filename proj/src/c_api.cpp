#include "rss/rss.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "rss/commands.hpp"
#include "rss/das.hpp"
#include "rss/drr.hpp"
#include "rss/error.hpp"
#include "rss/metrics.hpp"
#include "rss/separation.hpp"
#include "rss/stream.hpp"
#include "rss/tensor_io.hpp"

struct rss_geometry {
  rss::ArrayGeometry geom;
};
struct rss_audio {
  rss::MultichannelAudio audio;
};
struct rss_tensor {
  rss::Tensor tensor;
};
struct rss_stream {
  rss::StreamSeparator stream;
};

namespace {

thread_local std::string g_last_error;

rss_status ToStatus(rss::ErrorCode code) {
  switch (code) {
    case rss::ErrorCode::kInvalidArgument: return RSS_ERR_INVALID_ARGUMENT;
    case rss::ErrorCode::kData: return RSS_ERR_DATA;
    case rss::ErrorCode::kIo: return RSS_ERR_IO;
    case rss::ErrorCode::kInfeasible: return RSS_ERR_INFEASIBLE;
  }
  return RSS_ERR_INTERNAL;
}

template <typename F>
rss_status Guard(F &&f) {
  try {
    f();
    g_last_error.clear();
    return RSS_OK;
  } catch (const rss::Error &e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
  } catch (const std::exception &e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return RSS_ERR_INTERNAL;
}

void NotNull(const void *p, const char *what) {
  rss::Require(p != nullptr, std::string(what) + " is NULL");
}

char *Dup(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char *rss_version(void) { return "0.1.0"; }

const char *rss_last_error(void) { return g_last_error.c_str(); }

rss_status rss_geometry_create(const double *xyz, size_t num_mics,
                               size_t ref_index, rss_geometry **out) {
  return Guard([&] {
    NotNull(xyz, "xyz");
    NotNull(out, "out");
    std::vector<rss::Vec3> mics(num_mics);
    for (size_t i = 0; i < num_mics; ++i)
      mics[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
    *out = new rss_geometry{rss::ArrayGeometry(std::move(mics), ref_index)};
  });
}

rss_status rss_geometry_linear(size_t num_mics, double aperture,
                               size_t ref_index, rss_geometry **out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new rss_geometry{rss::LinearArray(num_mics, aperture, ref_index)};
  });
}

void rss_geometry_free(rss_geometry *geom) { delete geom; }

size_t rss_geometry_num_mics(const rss_geometry *geom) {
  return geom ? geom->geom.num_mics() : 0;
}

rss_status rss_compute_delays(const rss_geometry *geom, double angle_deg,
                              int *shifts) {
  return Guard([&] {
    NotNull(geom, "geometry");
    NotNull(shifts, "shifts");
    const auto d = rss::ComputeDelays(geom->geom, angle_deg);
    std::copy(d.shifts.begin(), d.shifts.end(), shifts);
  });
}

rss_status rss_in_region(double az_min, double az_max, double max_distance,
                         double array_x, double array_y, double yaw_deg,
                         double src_x, double src_y, int *inside) {
  return Guard([&] {
    NotNull(inside, "inside");
    const rss::Region region(az_min, az_max, max_distance);
    const rss::ArrayPose pose{{array_x, array_y, 0.0}, yaw_deg};
    *inside = rss::InRegion(region, src_x, src_y, pose) ? 1 : 0;
  });
}

rss_status rss_audio_create(size_t channels, size_t frames, rss_audio **out) {
  return Guard([&] {
    NotNull(out, "out");
    rss::Require(channels > 0, "audio needs at least one channel");
    *out = new rss_audio{rss::MultichannelAudio(channels, frames)};
  });
}

rss_status rss_audio_read_wav(const char *path, rss_audio **out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new rss_audio{rss::ReadWav(path)};
  });
}

rss_status rss_audio_write_wav(const char *path, const rss_audio *audio,
                               int float32) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(audio, "audio");
    rss::WriteWav(path, audio->audio,
                  float32 ? rss::WavFormat::kFloat32 : rss::WavFormat::kPcm16);
  });
}

void rss_audio_free(rss_audio *audio) { delete audio; }

size_t rss_audio_channels(const rss_audio *audio) {
  return audio ? audio->audio.num_channels() : 0;
}

size_t rss_audio_frames(const rss_audio *audio) {
  return audio ? audio->audio.num_frames() : 0;
}

double *rss_audio_channel(rss_audio *audio, size_t channel) {
  if (!audio || channel >= audio->audio.num_channels()) return nullptr;
  return audio->audio.channel(channel).data();
}

rss_status rss_das_features(const rss_audio *audio, const rss_geometry *geom,
                            double angle_deg, int subset, rss_tensor **out) {
  return Guard([&] {
    NotNull(audio, "audio");
    NotNull(geom, "geometry");
    NotNull(out, "out");
    const auto f =
        subset ? rss::AssembleDasFeatures(audio->audio, geom->geom, angle_deg,
                                          rss::SymmetricPairs(geom->geom.num_mics()))
               : rss::AssembleDasFeatures(audio->audio, geom->geom, angle_deg);
    rss::Tensor t = rss::TensorFromPlanes(f.fbank, "das");
    t.extra = {{"angle", angle_deg}, {"pair_list", f.pair_list}};
    *out = new rss_tensor{std::move(t)};
  });
}

rss_status rss_drr_features(const rss_audio *audio, const rss_geometry *geom,
                            double angle_deg, int ratio, rss_tensor **out) {
  return Guard([&] {
    NotNull(audio, "audio");
    NotNull(geom, "geometry");
    NotNull(out, "out");
    const auto pairs = rss::SymmetricPairs(geom->geom.num_mics());
    const auto aligned = rss::ShiftAlign(
        audio->audio, rss::ComputeDelays(geom->geom, angle_deg));
    const auto mode = ratio ? rss::DrrMode::kRatio : rss::DrrMode::kCat;
    const auto f = rss::DrrFeatures(aligned, pairs, mode);
    rss::Tensor t = rss::TensorFromPlanes(f.Emitted(), "drr");
    t.extra = {{"angle", angle_deg},
               {"pair_list", pairs},
               {"mode", rss::ToString(mode)}};
    *out = new rss_tensor{std::move(t)};
  });
}

void rss_tensor_free(rss_tensor *tensor) { delete tensor; }

size_t rss_tensor_rank(const rss_tensor *tensor) {
  return tensor ? tensor->tensor.shape.size() : 0;
}

size_t rss_tensor_dim(const rss_tensor *tensor, size_t axis) {
  if (!tensor || axis >= tensor->tensor.shape.size()) return 0;
  return tensor->tensor.shape[axis];
}

const float *rss_tensor_data(const rss_tensor *tensor) {
  return tensor ? tensor->tensor.data.data() : nullptr;
}

rss_status rss_tensor_write(const rss_tensor *tensor, const char *base) {
  return Guard([&] {
    NotNull(tensor, "tensor");
    NotNull(base, "base");
    rss::WriteTensor(base, tensor->tensor);
  });
}

rss_status rss_separate(const rss_audio *audio, const rss_geometry *geom,
                        double angle_deg, const double *mask,
                        size_t mask_frames, size_t mask_bins, rss_audio **out) {
  return Guard([&] {
    NotNull(audio, "audio");
    NotNull(geom, "geometry");
    NotNull(out, "out");
    rss::Signal est;
    if (mask) {
      rss::RealPlane values(mask_frames, mask_bins);
      std::copy(mask, mask + mask_frames * mask_bins, values.data().begin());
      est = rss::ApplyMask(audio->audio, geom->geom, angle_deg,
                           rss::TFMask(std::move(values)));
    } else {
      est = rss::Separate(audio->audio, geom->geom, angle_deg,
                          rss::PassthroughMask{});
    }
    *out = new rss_audio{rss::MultichannelAudio({std::move(est)})};
  });
}

rss_status rss_si_sdr(const double *reference, const double *estimate,
                      size_t n, double *out_db) {
  return Guard([&] {
    NotNull(reference, "reference");
    NotNull(estimate, "estimate");
    NotNull(out_db, "out_db");
    *out_db = rss::SiSdr({reference, n}, {estimate, n});
  });
}

rss_status rss_decay(const double *mixture, const double *estimate, size_t n,
                     double *out_db) {
  return Guard([&] {
    NotNull(mixture, "mixture");
    NotNull(estimate, "estimate");
    NotNull(out_db, "out_db");
    *out_db = rss::Decay({mixture, n}, {estimate, n});
  });
}

rss_status rss_stream_create(const rss_geometry *geom, double angle_deg,
                             rss_mask_fn mask_fn, void *user,
                             rss_stream **out) {
  return Guard([&] {
    NotNull(geom, "geometry");
    NotNull(out, "out");
    rss::StreamSeparator::MaskProvider provider;
    if (mask_fn)
      provider = [mask_fn, user](std::size_t frame,
                                 std::span<const rss::Complex> spec,
                                 std::span<double> mask) {
        mask_fn(user, frame, reinterpret_cast<const double *>(spec.data()),
                mask.data(), mask.size());
      };
    *out = new rss_stream{
        rss::StreamSeparator(geom->geom, angle_deg, std::move(provider))};
  });
}

void rss_stream_free(rss_stream *stream) { delete stream; }

size_t rss_stream_hop(const rss_stream *stream) {
  return stream ? stream->stream.hop() : 0;
}

size_t rss_stream_shift_delay(const rss_stream *stream) {
  return stream ? stream->stream.shift_delay() : 0;
}

rss_status rss_stream_push(rss_stream *stream, const double *samples,
                           size_t num_samples, double *out, int *emitted) {
  return Guard([&] {
    NotNull(stream, "stream");
    NotNull(samples, "samples");
    NotNull(out, "out");
    NotNull(emitted, "emitted");
    *emitted = stream->stream.Push({samples, num_samples},
                                   {out, stream->stream.hop()})
                   ? 1
                   : 0;
  });
}

rss_status rss_stream_flush(rss_stream *stream, double *out, int *emitted) {
  return Guard([&] {
    NotNull(stream, "stream");
    NotNull(out, "out");
    NotNull(emitted, "emitted");
    *emitted = stream->stream.Flush({out, stream->stream.hop()}) ? 1 : 0;
  });
}

rss_status rss_run_command(const char *name, const char *config_json,
                           char **result_json, char **text) {
  return Guard([&] {
    NotNull(name, "name");
    NotNull(config_json, "config_json");
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception &e) {
      rss::Fail(rss::ErrorCode::kInvalidArgument,
                std::string("config is not valid JSON: ") + e.what());
    }
    const rss::CommandOutput res = rss::RunCommand(name, cfg);
    char *r = result_json ? Dup(res.result.dump(2)) : nullptr;
    char *t = nullptr;
    try {
      if (text) t = Dup(res.text);
    } catch (...) {
      std::free(r);
      throw;
    }
    if (result_json) *result_json = r;
    if (text) *text = t;
  });
}

void rss_string_free(char *s) { std::free(s); }

}  // extern "C"
