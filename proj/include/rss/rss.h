/* C interface to the regional speech separation library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an rss_status; on
 * failure rss_last_error() describes the problem for the calling thread.
 * Audio is 16 kHz throughout. */
#ifndef RSS_RSS_H_
#define RSS_RSS_H_

#include <stddef.h>

#if defined(RSS_BUILDING_LIBRARY)
#define RSS_API __attribute__((visibility("default")))
#else
#define RSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  RSS_OK = 0,
  RSS_ERR_INVALID_ARGUMENT = 1,
  RSS_ERR_DATA = 2,
  RSS_ERR_IO = 3,
  RSS_ERR_INFEASIBLE = 4,
  RSS_ERR_INTERNAL = 5
} rss_status;

typedef struct rss_geometry rss_geometry;
typedef struct rss_audio rss_audio;
typedef struct rss_tensor rss_tensor;
typedef struct rss_stream rss_stream;

RSS_API const char *rss_version(void);
/* Message for the last failed call on this thread; "" after a success. */
RSS_API const char *rss_last_error(void);

/* ---- geometry ---- */

/* xyz holds num_mics * 3 coordinates in meters. */
RSS_API rss_status rss_geometry_create(const double *xyz, size_t num_mics,
                                       size_t ref_index, rss_geometry **out);
/* Uniform linear array along x, centered on the origin. */
RSS_API rss_status rss_geometry_linear(size_t num_mics, double aperture,
                                       size_t ref_index, rss_geometry **out);
RSS_API void rss_geometry_free(rss_geometry *geom);
RSS_API size_t rss_geometry_num_mics(const rss_geometry *geom);

/* Integer alignment shifts toward angle_deg; shifts holds num_mics ints. */
RSS_API rss_status rss_compute_delays(const rss_geometry *geom,
                                      double angle_deg, int *shifts);

/* Sets *inside to 1 when (src_x, src_y) lies in the azimuth interval
 * [az_min, az_max] within max_distance of an array at (array_x, array_y)
 * rotated by yaw_deg. */
RSS_API rss_status rss_in_region(double az_min, double az_max,
                                 double max_distance, double array_x,
                                 double array_y, double yaw_deg, double src_x,
                                 double src_y, int *inside);

/* ---- audio ---- */

RSS_API rss_status rss_audio_create(size_t channels, size_t frames,
                                    rss_audio **out);
RSS_API rss_status rss_audio_read_wav(const char *path, rss_audio **out);
/* float32 != 0 writes IEEE float samples, otherwise 16-bit PCM. */
RSS_API rss_status rss_audio_write_wav(const char *path,
                                       const rss_audio *audio, int float32);
RSS_API void rss_audio_free(rss_audio *audio);
RSS_API size_t rss_audio_channels(const rss_audio *audio);
RSS_API size_t rss_audio_frames(const rss_audio *audio);
/* Writable samples of one channel; NULL when out of range. */
RSS_API double *rss_audio_channel(rss_audio *audio, size_t channel);

/* ---- features ---- */

/* Log-mel DAS stack [channels, frames, 80]. subset != 0 uses the symmetric
 * pairs (0,M-1), (1,M-2), ... instead of all pairs. */
RSS_API rss_status rss_das_features(const rss_audio *audio,
                                    const rss_geometry *geom, double angle_deg,
                                    int subset, rss_tensor **out);
/* DRR over the symmetric pairs: ratio != 0 gives [P, frames, 513] in dB,
 * otherwise the raw [2P, frames, 513] direct/residual stack. */
RSS_API rss_status rss_drr_features(const rss_audio *audio,
                                    const rss_geometry *geom, double angle_deg,
                                    int ratio, rss_tensor **out);
RSS_API void rss_tensor_free(rss_tensor *tensor);
RSS_API size_t rss_tensor_rank(const rss_tensor *tensor);
RSS_API size_t rss_tensor_dim(const rss_tensor *tensor, size_t axis);
RSS_API const float *rss_tensor_data(const rss_tensor *tensor);
/* Writes <base>.f32 and the <base>.json sidecar. */
RSS_API rss_status rss_tensor_write(const rss_tensor *tensor, const char *base);

/* ---- separation and metrics ---- */

/* Steers toward angle_deg and applies a [frames, 513] mask (row-major).
 * mask == NULL passes the steered signal through. Output is mono. */
RSS_API rss_status rss_separate(const rss_audio *audio,
                                const rss_geometry *geom, double angle_deg,
                                const double *mask, size_t mask_frames,
                                size_t mask_bins, rss_audio **out);
RSS_API rss_status rss_si_sdr(const double *reference, const double *estimate,
                              size_t n, double *out_db);
RSS_API rss_status rss_decay(const double *mixture, const double *estimate,
                             size_t n, double *out_db);

/* ---- streaming ---- */

/* Mask callback: spectrum holds bins complex values as (re, im) pairs;
 * write bins values in [0, 1] to mask. */
typedef void (*rss_mask_fn)(void *user, size_t frame, const double *spectrum,
                            double *mask, size_t bins);

/* mask_fn == NULL streams the steered signal unmasked. */
RSS_API rss_status rss_stream_create(const rss_geometry *geom, double angle_deg,
                                     rss_mask_fn mask_fn, void *user,
                                     rss_stream **out);
RSS_API void rss_stream_free(rss_stream *stream);
RSS_API size_t rss_stream_hop(const rss_stream *stream);
/* Extra output delay in samples caused by negative alignment shifts. */
RSS_API size_t rss_stream_shift_delay(const rss_stream *stream);
/* Pushes one hop: num_samples must equal hop * num_mics, interleaved
 * sample-major. When *emitted is set, out holds hop output samples. */
RSS_API rss_status rss_stream_push(rss_stream *stream, const double *samples,
                                   size_t num_samples, double *out,
                                   int *emitted);
RSS_API rss_status rss_stream_flush(rss_stream *stream, double *out,
                                    int *emitted);

/* ---- batch commands ---- */

/* Runs simulate, features, separate, evaluate or heatmap with a JSON config.
 * On success *result_json and *text (either may be NULL) receive strings
 * released with rss_string_free. */
RSS_API rss_status rss_run_command(const char *name, const char *config_json,
                                   char **result_json, char **text);
RSS_API void rss_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* RSS_RSS_H_ */
