// Copyright 2026 The latentnav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the latentnav library. Every function returns an
 * lnav_status; on failure lnav_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. */

#ifndef LATENTNAV_H
#define LATENTNAV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LNAV_API __declspec(dllexport)
#elif defined(__GNUC__)
#define LNAV_API __attribute__((visibility("default")))
#else
#define LNAV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lnav_status {
  LNAV_OK = 0,
  LNAV_ERR_CONFIG = 1,
  LNAV_ERR_ARGUMENT = 2,
  LNAV_ERR_CONTRACT = 3,
  LNAV_ERR_EVALUATION = 4,
  LNAV_ERR_TRAINING = 5,
  LNAV_ERR_PLANNING = 6,
  LNAV_ERR_BAD_MAGIC = 7,
  LNAV_ERR_BAD_VERSION = 8,
  LNAV_ERR_TRUNCATED = 9,
  LNAV_ERR_FORMAT = 10,
  LNAV_ERR_IO = 11,
  LNAV_ERR_DISCONNECTED = 12,
  LNAV_ERR_NO_GROUND_TRUTH = 13,
  LNAV_ERR_INTERNAL = 99
} lnav_status;

typedef struct lnav_dataset lnav_dataset;
typedef struct lnav_model lnav_model;
typedef struct lnav_path lnav_path;
typedef struct lnav_route lnav_route;

LNAV_API const char *lnav_version(void);
LNAV_API const char *lnav_status_name(lnav_status status);
/* Message of the last failed call on this thread, "" if none. */
LNAV_API const char *lnav_last_error(void);
LNAV_API void lnav_string_free(char *s);

/* ---- datasets ---- */

typedef struct lnav_world_config {
  uint64_t num_rooms;
  uint64_t frames;
  uint64_t height;
  uint64_t width;
  uint64_t channels;
  double transition_width;
  /* num_alias_pairs pairs stored as [a0, b0, a1, b1, ...]. */
  const uint64_t *alias_pairs;
  uint64_t num_alias_pairs;
  uint64_t seed;
} lnav_world_config;

typedef struct lnav_dataset_info {
  uint64_t frames;
  uint64_t height;
  uint64_t width;
  uint64_t channels;
  uint64_t num_rooms;
  int has_ground_truth;
  uint64_t checksum;
} lnav_dataset_info;

LNAV_API void lnav_world_config_default(lnav_world_config *cfg);
LNAV_API lnav_status lnav_dataset_generate(const lnav_world_config *cfg,
                                           lnav_dataset **out);
LNAV_API lnav_status lnav_dataset_ingest(const char *directory, uint64_t height,
                                         uint64_t width, lnav_dataset **out);
LNAV_API lnav_status lnav_dataset_load(const char *manifest_path, lnav_dataset **out);
/* Writes the manifest and its .raw companion; nothing is left on failure. */
LNAV_API lnav_status lnav_dataset_save(const lnav_dataset *ds, const char *manifest_path);
LNAV_API void lnav_dataset_free(lnav_dataset *ds);
LNAV_API lnav_status lnav_dataset_info_get(const lnav_dataset *ds, lnav_dataset_info *info);
/* Copies frame `index` (height*width*channels values) and its position. */
LNAV_API lnav_status lnav_dataset_frame(const lnav_dataset *ds, uint64_t index,
                                        double *pixels, uint64_t count,
                                        double *position);

/* ---- models ---- */

typedef enum lnav_likelihood {
  LNAV_LIKELIHOOD_GAUSSIAN = 0,
  LNAV_LIKELIHOOD_BERNOULLI = 1
} lnav_likelihood;

typedef struct lnav_model_config {
  uint64_t latent_dim;
  uint64_t height;
  uint64_t width;
  uint64_t channels;
  const uint64_t *encoder_hidden;
  uint64_t num_encoder_hidden;
  const uint64_t *decoder_hidden;
  uint64_t num_decoder_hidden;
  lnav_likelihood likelihood;
} lnav_model_config;

typedef struct lnav_model_info {
  uint64_t latent_dim;
  uint64_t height;
  uint64_t width;
  uint64_t channels;
  lnav_likelihood likelihood;
  uint64_t parameter_count;
  uint64_t checksum;
} lnav_model_info;

typedef struct lnav_train_config {
  uint64_t batch_size;
  uint64_t epochs;
  uint64_t mc_samples;
  uint64_t seed;
  double learning_rate;
  double decay;
  double epsilon;
  int shuffle;
} lnav_train_config;

typedef void (*lnav_epoch_callback)(uint64_t epoch, double mean_loss, void *user);

/* The default model config points at static hidden-size arrays. */
LNAV_API void lnav_model_config_default(lnav_model_config *cfg);
LNAV_API void lnav_train_config_default(lnav_train_config *cfg);
LNAV_API lnav_status lnav_model_init(const lnav_model_config *cfg, uint64_t seed,
                                     lnav_model **out);
LNAV_API lnav_status lnav_model_load(const char *path, lnav_model **out);
LNAV_API lnav_status lnav_model_save(const lnav_model *model, const char *path);
LNAV_API void lnav_model_free(lnav_model *model);
LNAV_API lnav_status lnav_model_info_get(const lnav_model *model, lnav_model_info *info);
/* Trains in place. loss_history, if not NULL, receives cfg->epochs values. */
LNAV_API lnav_status lnav_model_train(lnav_model *model, const lnav_dataset *ds,
                                      const lnav_train_config *cfg,
                                      double *loss_history,
                                      lnav_epoch_callback on_epoch, void *user);
/* Posterior mean and log-variance; either output may be NULL. */
LNAV_API lnav_status lnav_model_encode(const lnav_model *model, const double *x,
                                       uint64_t x_count, double *mu,
                                       double *log_var, uint64_t latent_count);
LNAV_API lnav_status lnav_model_decode(const lnav_model *model, const double *z,
                                       uint64_t latent_count, double *x,
                                       uint64_t x_count);
/* Decodes a grid x grid sweep of dims (dim_a, dim_b) over [lo, hi] with the
 * other dims at `fixed`. Tile (r, c) has z[dim_a] = v_r and z[dim_b] = v_c,
 * v_i = lo + i (hi - lo) / (grid - 1), and is placed row-major into an image
 * of (grid*height) x (grid*width) x channels values. */
LNAV_API lnav_status lnav_model_slice(const lnav_model *model, uint64_t dim_a,
                                      uint64_t dim_b, uint64_t grid, double lo,
                                      double hi, double fixed, double *out,
                                      uint64_t out_count);

/* Writes interleaved [0,1] pixels as binary PGM (1 channel) or PPM (3). */
LNAV_API lnav_status lnav_image_write(const char *path, const double *pixels,
                                      uint64_t height, uint64_t width,
                                      uint64_t channels);

/* ---- planning ---- */

typedef struct lnav_planner_config {
  uint64_t points;
  double alpha;
  uint64_t max_sweeps;
  double tol;
  double norm_eps;
  int squared_norm;
} lnav_planner_config;

typedef struct lnav_path_info {
  uint64_t points;
  uint64_t dim;
  double initial_length;
  uint64_t sweeps;
  int converged;
  int alpha_too_large;
} lnav_path_info;

LNAV_API void lnav_planner_config_default(lnav_planner_config *cfg);
/* Plans between the posterior means of two dataset frames. */
LNAV_API lnav_status lnav_plan_frames(const lnav_model *model, const lnav_dataset *ds,
                                      uint64_t start, uint64_t end,
                                      const lnav_planner_config *cfg, lnav_path **out);
LNAV_API lnav_status lnav_plan_latent(const lnav_model *model, const double *z_start,
                                      const double *z_end, uint64_t latent_count,
                                      const lnav_planner_config *cfg, lnav_path **out);
LNAV_API lnav_status lnav_path_load(const char *path, lnav_path **out);
LNAV_API lnav_status lnav_path_save(const lnav_path *p, const char *path);
LNAV_API void lnav_path_free(lnav_path *p);
LNAV_API lnav_status lnav_path_info_get(const lnav_path *p, lnav_path_info *info);
LNAV_API lnav_status lnav_path_point(const lnav_path *p, uint64_t index, double *z,
                                     uint64_t latent_count);
/* Copies min(count, sweeps) per-sweep objective values. */
LNAV_API lnav_status lnav_path_length_history(const lnav_path *p, double *out,
                                              uint64_t count);
/* Decoded length of the path under the model. */
LNAV_API lnav_status lnav_path_length(const lnav_model *model, const lnav_path *p,
                                      int squared, double *length);

/* ---- routes ---- */

typedef enum lnav_route_source {
  LNAV_ROUTE_GEODESIC = 0,
  LNAV_ROUTE_MANUAL = 1,
  LNAV_ROUTE_ORACLE = 2
} lnav_route_source;

LNAV_API lnav_status lnav_route_match(const lnav_model *model, const lnav_dataset *ds,
                                      const lnav_path *p, lnav_route **out);
/* Shortest path over a k-nearest-neighbor graph of posterior means with
 * raw-frame distances as weights. */
LNAV_API lnav_status lnav_route_oracle(const lnav_model *model, const lnav_dataset *ds,
                                       uint64_t start, uint64_t end, uint64_t k,
                                       lnav_route **out);
LNAV_API lnav_status lnav_route_from_indices(const uint64_t *indices, uint64_t count,
                                             lnav_route_source source,
                                             lnav_route **out);
LNAV_API lnav_status lnav_route_load(const char *path, lnav_route **out);
LNAV_API lnav_status lnav_route_save(const lnav_route *r, const char *path);
LNAV_API void lnav_route_free(lnav_route *r);
LNAV_API lnav_status lnav_route_size(const lnav_route *r, uint64_t *count);
LNAV_API lnav_status lnav_route_indices(const lnav_route *r, uint64_t *out,
                                        uint64_t count);
LNAV_API lnav_status lnav_route_categories(const lnav_route *r, uint64_t *distinct,
                                           uint64_t *total);
LNAV_API lnav_status lnav_route_gap(const lnav_route *r, const lnav_dataset *ds,
                                    double *max_gap);
/* Writes two horizontal strips: the decoded path images and the matched
 * frames. Either file name may be NULL to skip it; p may be NULL only when
 * decoded_path is NULL. */
LNAV_API lnav_status lnav_route_write_strips(const lnav_model *model,
                                             const lnav_dataset *ds,
                                             const lnav_path *p, const lnav_route *r,
                                             const char *decoded_path,
                                             const char *matched_path);

/* ---- evaluation ---- */

/* Report as JSON text; free with lnav_string_free. geodesic_path may be
 * NULL, in which case posterior means of the geodesic frames are used. */
LNAV_API lnav_status lnav_evaluate(const lnav_model *model, const lnav_dataset *ds,
                                   const lnav_route *geodesic,
                                   const lnav_route *reference,
                                   const lnav_path *geodesic_path, uint64_t seed,
                                   uint64_t bins, char **json_out);

typedef struct lnav_gradcheck_config {
  uint64_t trials;
  uint64_t seed;
  double step;
  double tolerance;
  int corrupt;
} lnav_gradcheck_config;

typedef struct lnav_gradcheck_suite {
  const char *name;
  uint64_t trials;
  uint64_t coordinates;
  double worst_relative_error;
  int passed;
} lnav_gradcheck_suite;

LNAV_API void lnav_gradcheck_config_default(lnav_gradcheck_config *cfg);
/* Fills up to `capacity` suites and stores the suite count in *count. */
LNAV_API lnav_status lnav_gradcheck(const lnav_gradcheck_config *cfg,
                                    lnav_gradcheck_suite *suites, uint64_t capacity,
                                    uint64_t *count);

#ifdef __cplusplus
}
#endif

#endif
