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

#include "latentnav.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "error.hpp"
#include "gradcheck.hpp"
#include "image.hpp"
#include "io_util.hpp"
#include "planner.hpp"
#include "routing.hpp"
#include "vae.hpp"
#include "worldgen.hpp"

namespace ln = latentnav;

struct lnav_dataset {
  ln::TourDataset value;
};
struct lnav_model {
  ln::ModelParams value;
};
struct lnav_path {
  ln::LatentPath value;
};
struct lnav_route {
  ln::Route value;
};

namespace {

thread_local std::string last_error;

static_assert(static_cast<int>(ln::ErrorCode::kNoGroundTruth) == LNAV_ERR_NO_GROUND_TRUTH);
static_assert(static_cast<int>(ln::ErrorCode::kConfig) == LNAV_ERR_CONFIG);

template <typename F>
lnav_status Guard(F &&body) {
  try {
    body();
    return LNAV_OK;
  } catch (const ln::Error &e) {
    last_error = e.what();
    return static_cast<lnav_status>(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return LNAV_ERR_INTERNAL;
  } catch (const std::exception &e) {
    last_error = e.what();
    return LNAV_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return LNAV_ERR_INTERNAL;
  }
}

template <typename T>
const T &Need(const T *p, const char *name) {
  if (p == nullptr) ln::Fail(ln::ErrorCode::kArgument, std::string(name) + " is NULL");
  return *p;
}

void NeedOut(const void *p, const char *name) {
  if (p == nullptr) ln::Fail(ln::ErrorCode::kArgument, std::string(name) + " is NULL");
}

void NeedCount(std::uint64_t got, std::size_t want, const char *name) {
  if (got != want) {
    ln::Fail(ln::ErrorCode::kArgument, std::string(name) + " holds " +
                                           std::to_string(got) + " values, expected " +
                                           std::to_string(want));
  }
}

std::vector<std::size_t> Sizes(const std::uint64_t *values, std::uint64_t count,
                               const char *name) {
  if (count > 0 && values == nullptr) {
    ln::Fail(ln::ErrorCode::kArgument, std::string(name) + " is NULL");
  }
  return std::vector<std::size_t>(values, values + count);
}

ln::WorldConfig ToWorld(const lnav_world_config &c) {
  ln::WorldConfig w;
  w.num_rooms = c.num_rooms;
  w.frames = c.frames;
  w.height = c.height;
  w.width = c.width;
  w.channels = c.channels;
  w.transition_width = c.transition_width;
  w.seed = c.seed;
  const auto flat = Sizes(c.alias_pairs, 2 * c.num_alias_pairs, "alias_pairs");
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    w.alias_pairs.emplace_back(flat[i], flat[i + 1]);
  }
  return w;
}

ln::ModelConfig ToModel(const lnav_model_config &c) {
  ln::ModelConfig m;
  m.latent_dim = c.latent_dim;
  m.height = c.height;
  m.width = c.width;
  m.channels = c.channels;
  m.encoder_hidden = Sizes(c.encoder_hidden, c.num_encoder_hidden, "encoder_hidden");
  m.decoder_hidden = Sizes(c.decoder_hidden, c.num_decoder_hidden, "decoder_hidden");
  m.likelihood = static_cast<ln::Likelihood>(c.likelihood);
  return m;
}

ln::TrainConfig ToTrain(const lnav_train_config &c) {
  ln::TrainConfig t;
  t.batch_size = c.batch_size;
  t.epochs = c.epochs;
  t.mc_samples = c.mc_samples;
  t.seed = c.seed;
  t.optimizer.learning_rate = c.learning_rate;
  t.optimizer.decay = c.decay;
  t.optimizer.epsilon = c.epsilon;
  t.shuffle = c.shuffle != 0;
  return t;
}

ln::PlannerConfig ToPlanner(const lnav_planner_config &c) {
  ln::PlannerConfig p;
  p.points = c.points;
  p.alpha = c.alpha;
  p.max_sweeps = c.max_sweeps;
  p.tol = c.tol;
  p.norm_eps = c.norm_eps;
  p.squared_norm = c.squared_norm != 0;
  return p;
}

void CheckModelMatches(const ln::ModelParams &m, const ln::TourDataset &ds) {
  const auto &c = m.config();
  if (c.height != ds.config.height || c.width != ds.config.width ||
      c.channels != ds.config.channels) {
    ln::Fail(ln::ErrorCode::kConfig,
             "model images are " + std::to_string(c.height) + "x" +
                 std::to_string(c.width) + "x" + std::to_string(c.channels) +
                 " but dataset frames are " + std::to_string(ds.config.height) + "x" +
                 std::to_string(ds.config.width) + "x" +
                 std::to_string(ds.config.channels));
  }
}

void CheckFrame(const ln::TourDataset &ds, std::uint64_t index, const char *name) {
  if (index >= ds.size()) {
    ln::Fail(ln::ErrorCode::kArgument, std::string(name) + " frame " +
                                           std::to_string(index) + " is out of range (" +
                                           std::to_string(ds.size()) + " frames)");
  }
}

char *CopyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const std::uint64_t kDefaultHidden[] = {64};

}  // namespace

extern "C" {

const char *lnav_version(void) { return "1.0.0"; }

const char *lnav_status_name(lnav_status status) {
  switch (status) {
    case LNAV_OK: return "ok";
    case LNAV_ERR_CONFIG: return "configuration error";
    case LNAV_ERR_ARGUMENT: return "invalid argument";
    case LNAV_ERR_CONTRACT: return "contract violation";
    case LNAV_ERR_EVALUATION: return "evaluation error";
    case LNAV_ERR_TRAINING: return "training error";
    case LNAV_ERR_PLANNING: return "planning error";
    case LNAV_ERR_BAD_MAGIC: return "bad magic";
    case LNAV_ERR_BAD_VERSION: return "bad version";
    case LNAV_ERR_TRUNCATED: return "truncated file";
    case LNAV_ERR_FORMAT: return "format error";
    case LNAV_ERR_IO: return "i/o error";
    case LNAV_ERR_DISCONNECTED: return "disconnected";
    case LNAV_ERR_NO_GROUND_TRUTH: return "no ground truth";
    case LNAV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *lnav_last_error(void) { return last_error.c_str(); }

void lnav_string_free(char *s) { std::free(s); }

void lnav_world_config_default(lnav_world_config *cfg) {
  if (cfg == nullptr) return;
  const ln::WorldConfig w;
  *cfg = {w.num_rooms, w.frames, w.height, w.width, w.channels,
          w.transition_width, nullptr, 0, w.seed};
}

lnav_status lnav_dataset_generate(const lnav_world_config *cfg, lnav_dataset **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto world = ToWorld(Need(cfg, "cfg"));
    *out = new lnav_dataset{ln::GenerateTour(world)};
  });
}

lnav_status lnav_dataset_ingest(const char *directory, uint64_t height, uint64_t width,
                                lnav_dataset **out) {
  return Guard([&] {
    NeedOut(out, "out");
    NeedOut(directory, "directory");
    *out = new lnav_dataset{ln::IngestFrames(directory, height, width)};
  });
}

lnav_status lnav_dataset_load(const char *manifest_path, lnav_dataset **out) {
  return Guard([&] {
    NeedOut(out, "out");
    NeedOut(manifest_path, "manifest_path");
    *out = new lnav_dataset{ln::LoadDataset(manifest_path)};
  });
}

lnav_status lnav_dataset_save(const lnav_dataset *ds, const char *manifest_path) {
  return Guard([&] {
    NeedOut(manifest_path, "manifest_path");
    ln::SaveDataset(Need(ds, "dataset").value, manifest_path);
  });
}

void lnav_dataset_free(lnav_dataset *ds) { delete ds; }

lnav_status lnav_dataset_info_get(const lnav_dataset *ds, lnav_dataset_info *info) {
  return Guard([&] {
    NeedOut(info, "info");
    const auto &d = Need(ds, "dataset").value;
    *info = {d.size(),
             d.config.height,
             d.config.width,
             d.config.channels,
             d.config.num_rooms,
             d.has_ground_truth() ? 1 : 0,
             ln::DatasetChecksum(d)};
  });
}

lnav_status lnav_dataset_frame(const lnav_dataset *ds, uint64_t index, double *pixels,
                               uint64_t count, double *position) {
  return Guard([&] {
    const auto &d = Need(ds, "dataset").value;
    CheckFrame(d, index, "requested");
    const auto &frame = d.frames[index];
    if (pixels != nullptr) {
      NeedCount(count, frame.image.size(), "pixels");
      std::copy(frame.image.pixels.begin(), frame.image.pixels.end(), pixels);
    }
    if (position != nullptr) *position = frame.position;
  });
}

void lnav_model_config_default(lnav_model_config *cfg) {
  if (cfg == nullptr) return;
  const ln::ModelConfig m;
  *cfg = {m.latent_dim,    m.height, m.width, m.channels, kDefaultHidden, 1,
          kDefaultHidden, 1,        static_cast<lnav_likelihood>(m.likelihood)};
}

void lnav_train_config_default(lnav_train_config *cfg) {
  if (cfg == nullptr) return;
  const ln::TrainConfig t;
  *cfg = {t.batch_size,
          t.epochs,
          t.mc_samples,
          t.seed,
          t.optimizer.learning_rate,
          t.optimizer.decay,
          t.optimizer.epsilon,
          t.shuffle ? 1 : 0};
}

lnav_status lnav_model_init(const lnav_model_config *cfg, uint64_t seed,
                            lnav_model **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto config = ToModel(Need(cfg, "cfg"));
    *out = new lnav_model{ln::ModelParams::Init(config, seed)};
  });
}

lnav_status lnav_model_load(const char *path, lnav_model **out) {
  return Guard([&] {
    NeedOut(out, "out");
    NeedOut(path, "path");
    *out = new lnav_model{ln::LoadCheckpoint(path)};
  });
}

lnav_status lnav_model_save(const lnav_model *model, const char *path) {
  return Guard([&] {
    NeedOut(path, "path");
    ln::SaveCheckpoint(Need(model, "model").value, path);
  });
}

void lnav_model_free(lnav_model *model) { delete model; }

lnav_status lnav_model_info_get(const lnav_model *model, lnav_model_info *info) {
  return Guard([&] {
    NeedOut(info, "info");
    const auto &m = Need(model, "model").value;
    const auto &c = m.config();
    *info = {c.latent_dim, c.height, c.width, c.channels,
             static_cast<lnav_likelihood>(c.likelihood), m.parameter_count(),
             m.checksum()};
  });
}

lnav_status lnav_model_train(lnav_model *model, const lnav_dataset *ds,
                             const lnav_train_config *cfg, double *loss_history,
                             lnav_epoch_callback on_epoch, void *user) {
  return Guard([&] {
    NeedOut(model, "model");
    const auto &d = Need(ds, "dataset").value;
    const auto train = ToTrain(Need(cfg, "cfg"));
    CheckModelMatches(model->value, d);
    // The caller's model changes only on success.
    ln::ModelParams params = model->value;
    const auto spans = d.FrameSpans();
    const auto report = ln::Train(params, spans, train, [&](std::size_t e, double l) {
      if (on_epoch != nullptr) on_epoch(e, l, user);
    });
    if (loss_history != nullptr) {
      std::copy(report.epoch_loss.begin(), report.epoch_loss.end(), loss_history);
    }
    model->value = std::move(params);
  });
}

lnav_status lnav_model_encode(const lnav_model *model, const double *x, uint64_t x_count,
                              double *mu, double *log_var, uint64_t latent_count) {
  return Guard([&] {
    const auto &m = Need(model, "model").value;
    NeedOut(x, "x");
    NeedCount(x_count, m.config().pixel_count(), "x");
    NeedCount(latent_count, m.config().latent_dim, "latent outputs");
    const auto post = ln::Encode(m, std::span<const double>(x, x_count));
    if (mu != nullptr) std::copy(post.mu.begin(), post.mu.end(), mu);
    if (log_var != nullptr) std::copy(post.log_var.begin(), post.log_var.end(), log_var);
  });
}

lnav_status lnav_model_decode(const lnav_model *model, const double *z,
                              uint64_t latent_count, double *x, uint64_t x_count) {
  return Guard([&] {
    const auto &m = Need(model, "model").value;
    NeedOut(z, "z");
    NeedOut(x, "x");
    NeedCount(latent_count, m.config().latent_dim, "z");
    NeedCount(x_count, m.config().pixel_count(), "x");
    const auto img = ln::Decode(m, std::span<const double>(z, latent_count));
    std::copy(img.begin(), img.end(), x);
  });
}

lnav_status lnav_model_slice(const lnav_model *model, uint64_t dim_a, uint64_t dim_b,
                             uint64_t grid, double lo, double hi, double fixed,
                             double *out, uint64_t out_count) {
  return Guard([&] {
    const auto &m = Need(model, "model").value;
    NeedOut(out, "out");
    const ln::SliceSpec spec{dim_a, dim_b, grid, lo, hi, fixed};
    spec.Validate(m.config().latent_dim);
    NeedCount(out_count, grid * grid * m.config().pixel_count(), "out");
    const auto image = ln::DecodeSlice(m, spec);
    std::copy(image.pixels.begin(), image.pixels.end(), out);
  });
}

lnav_status lnav_image_write(const char *path, const double *pixels, uint64_t height,
                             uint64_t width, uint64_t channels) {
  return Guard([&] {
    NeedOut(path, "path");
    NeedOut(pixels, "pixels");
    ln::Image image(height, width, channels);
    std::copy(pixels, pixels + image.size(), image.pixels.begin());
    ln::WritePnm(path, image);
  });
}

void lnav_planner_config_default(lnav_planner_config *cfg) {
  if (cfg == nullptr) return;
  const ln::PlannerConfig p;
  *cfg = {p.points, p.alpha, p.max_sweeps, p.tol, p.norm_eps, p.squared_norm ? 1 : 0};
}

lnav_status lnav_plan_frames(const lnav_model *model, const lnav_dataset *ds,
                             uint64_t start, uint64_t end,
                             const lnav_planner_config *cfg, lnav_path **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto &m = Need(model, "model").value;
    const auto &d = Need(ds, "dataset").value;
    const auto planner = ToPlanner(Need(cfg, "cfg"));
    CheckModelMatches(m, d);
    CheckFrame(d, start, "start");
    CheckFrame(d, end, "end");
    const auto zs = ln::Encode(m, d.frames[start].image.pixels).mu;
    const auto zd = ln::Encode(m, d.frames[end].image.pixels).mu;
    const ln::VaeDecoder decoder(m);
    *out = new lnav_path{ln::PlanGeodesic(zs, zd, decoder, planner)};
  });
}

lnav_status lnav_plan_latent(const lnav_model *model, const double *z_start,
                             const double *z_end, uint64_t latent_count,
                             const lnav_planner_config *cfg, lnav_path **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto &m = Need(model, "model").value;
    NeedOut(z_start, "z_start");
    NeedOut(z_end, "z_end");
    NeedCount(latent_count, m.config().latent_dim, "latent points");
    const auto planner = ToPlanner(Need(cfg, "cfg"));
    const ln::VaeDecoder decoder(m);
    *out = new lnav_path{ln::PlanGeodesic(std::span<const double>(z_start, latent_count),
                                          std::span<const double>(z_end, latent_count),
                                          decoder, planner)};
  });
}

lnav_status lnav_path_load(const char *path, lnav_path **out) {
  return Guard([&] {
    NeedOut(out, "out");
    NeedOut(path, "path");
    *out = new lnav_path{ln::LoadPath(path)};
  });
}

lnav_status lnav_path_save(const lnav_path *p, const char *path) {
  return Guard([&] {
    NeedOut(path, "path");
    ln::SavePath(Need(p, "latent path").value, path);
  });
}

void lnav_path_free(lnav_path *p) { delete p; }

lnav_status lnav_path_info_get(const lnav_path *p, lnav_path_info *info) {
  return Guard([&] {
    NeedOut(info, "info");
    const auto &v = Need(p, "latent path").value;
    *info = {v.size(),
             v.dim(),
             v.initial_length,
             v.length_history.size(),
             v.converged ? 1 : 0,
             v.alpha_too_large ? 1 : 0};
  });
}

lnav_status lnav_path_point(const lnav_path *p, uint64_t index, double *z,
                            uint64_t latent_count) {
  return Guard([&] {
    const auto &v = Need(p, "latent path").value;
    NeedOut(z, "z");
    if (index >= v.size()) {
      ln::Fail(ln::ErrorCode::kArgument, "path point " + std::to_string(index) +
                                             " is out of range");
    }
    NeedCount(latent_count, v.dim(), "z");
    std::copy(v.points[index].begin(), v.points[index].end(), z);
  });
}

lnav_status lnav_path_length_history(const lnav_path *p, double *out, uint64_t count) {
  return Guard([&] {
    const auto &v = Need(p, "latent path").value;
    NeedOut(out, "out");
    const auto n = std::min<std::size_t>(count, v.length_history.size());
    std::copy_n(v.length_history.begin(), n, out);
  });
}

lnav_status lnav_path_length(const lnav_model *model, const lnav_path *p, int squared,
                             double *length) {
  return Guard([&] {
    const auto &m = Need(model, "model").value;
    const auto &v = Need(p, "latent path").value;
    NeedOut(length, "length");
    if (v.dim() != m.config().latent_dim) {
      ln::Fail(ln::ErrorCode::kConfig, "path dimension does not match the model");
    }
    const ln::VaeDecoder decoder(m);
    *length = ln::PathLength(v, decoder, squared != 0);
  });
}

lnav_status lnav_route_match(const lnav_model *model, const lnav_dataset *ds,
                             const lnav_path *p, lnav_route **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto &m = Need(model, "model").value;
    const auto &d = Need(ds, "dataset").value;
    const auto &v = Need(p, "latent path").value;
    CheckModelMatches(m, d);
    if (v.dim() != m.config().latent_dim) {
      ln::Fail(ln::ErrorCode::kConfig, "path dimension does not match the model");
    }
    const ln::VaeDecoder decoder(m);
    *out = new lnav_route{ln::MatchRoute(v, decoder, d)};
  });
}

lnav_status lnav_route_oracle(const lnav_model *model, const lnav_dataset *ds,
                              uint64_t start, uint64_t end, uint64_t k,
                              lnav_route **out) {
  return Guard([&] {
    NeedOut(out, "out");
    const auto &m = Need(model, "model").value;
    const auto &d = Need(ds, "dataset").value;
    CheckModelMatches(m, d);
    CheckFrame(d, start, "start");
    CheckFrame(d, end, "end");
    const auto means = ln::PosteriorMeans(m, d);
    const auto images = d.FrameSpans();
    const auto graph = ln::BuildFrameGraph(means, images, k);
    ln::Route route;
    route.source = ln::RouteSource::kOracle;
    route.indices = ln::OracleShortestPath(graph, start, end).nodes;
    *out = new lnav_route{std::move(route)};
  });
}

lnav_status lnav_route_from_indices(const uint64_t *indices, uint64_t count,
                                    lnav_route_source source, lnav_route **out) {
  return Guard([&] {
    NeedOut(out, "out");
    ln::Route route;
    route.indices = Sizes(indices, count, "indices");
    switch (source) {
      case LNAV_ROUTE_GEODESIC: route.source = ln::RouteSource::kGeodesic; break;
      case LNAV_ROUTE_MANUAL: route.source = ln::RouteSource::kManual; break;
      case LNAV_ROUTE_ORACLE: route.source = ln::RouteSource::kOracle; break;
      default: ln::Fail(ln::ErrorCode::kArgument, "unknown route source");
    }
    *out = new lnav_route{std::move(route)};
  });
}

lnav_status lnav_route_load(const char *path, lnav_route **out) {
  return Guard([&] {
    NeedOut(out, "out");
    NeedOut(path, "path");
    *out = new lnav_route{ln::LoadRoute(path)};
  });
}

lnav_status lnav_route_save(const lnav_route *r, const char *path) {
  return Guard([&] {
    NeedOut(path, "path");
    ln::SaveRoute(Need(r, "route").value, path);
  });
}

void lnav_route_free(lnav_route *r) { delete r; }

lnav_status lnav_route_size(const lnav_route *r, uint64_t *count) {
  return Guard([&] {
    NeedOut(count, "count");
    *count = Need(r, "route").value.size();
  });
}

lnav_status lnav_route_indices(const lnav_route *r, uint64_t *out, uint64_t count) {
  return Guard([&] {
    const auto &v = Need(r, "route").value;
    NeedOut(out, "out");
    NeedCount(count, v.size(), "out");
    std::copy(v.indices.begin(), v.indices.end(), out);
  });
}

lnav_status lnav_route_categories(const lnav_route *r, uint64_t *distinct,
                                  uint64_t *total) {
  return Guard([&] {
    NeedOut(distinct, "distinct");
    NeedOut(total, "total");
    const auto c = ln::CountCategories(Need(r, "route").value);
    *distinct = c.distinct;
    *total = c.total;
  });
}

lnav_status lnav_route_gap(const lnav_route *r, const lnav_dataset *ds, double *max_gap) {
  return Guard([&] {
    NeedOut(max_gap, "max_gap");
    *max_gap = ln::ContinuityGap(Need(r, "route").value, Need(ds, "dataset").value);
  });
}

lnav_status lnav_route_write_strips(const lnav_model *model, const lnav_dataset *ds,
                                    const lnav_path *p, const lnav_route *r,
                                    const char *decoded_path, const char *matched_path) {
  return Guard([&] {
    const auto &d = Need(ds, "dataset").value;
    const auto &route = Need(r, "route").value;
    if (route.indices.empty()) ln::Fail(ln::ErrorCode::kArgument, "route is empty");
    route.CheckAgainst(d);
    ln::OutputBatch batch;
    if (decoded_path != nullptr) {
      const auto &m = Need(model, "model").value;
      const auto &v = Need(p, "latent path").value;
      CheckModelMatches(m, d);
      if (v.dim() != m.config().latent_dim) {
        ln::Fail(ln::ErrorCode::kConfig, "path dimension does not match the model");
      }
      std::vector<ln::Image> tiles;
      for (const auto &z : v.points) {
        ln::Image tile(d.config.height, d.config.width, d.config.channels);
        tile.pixels = ln::Decode(m, z);
        tiles.push_back(std::move(tile));
      }
      batch.Add(decoded_path, ln::EncodePnm(ln::TileImages(tiles, 1, tiles.size())));
    }
    if (matched_path != nullptr) {
      std::vector<ln::Image> tiles;
      for (auto i : route.indices) tiles.push_back(d.frames[i].image);
      batch.Add(matched_path, ln::EncodePnm(ln::TileImages(tiles, 1, tiles.size())));
    }
    batch.Commit();
  });
}

lnav_status lnav_evaluate(const lnav_model *model, const lnav_dataset *ds,
                          const lnav_route *geodesic, const lnav_route *reference,
                          const lnav_path *geodesic_path, uint64_t seed, uint64_t bins,
                          char **json_out) {
  return Guard([&] {
    NeedOut(json_out, "json_out");
    const auto &m = Need(model, "model").value;
    const auto &d = Need(ds, "dataset").value;
    CheckModelMatches(m, d);
    const ln::LatentPath *path = geodesic_path ? &geodesic_path->value : nullptr;
    const auto report = ln::Evaluate(m, d, Need(geodesic, "geodesic route").value,
                                     Need(reference, "reference route").value, path,
                                     seed, bins);
    *json_out = CopyString(ln::EvalReportJson(report));
  });
}

void lnav_gradcheck_config_default(lnav_gradcheck_config *cfg) {
  if (cfg == nullptr) return;
  const ln::GradcheckConfig g;
  *cfg = {g.trials, g.seed, g.step, g.tolerance, g.corrupt ? 1 : 0};
}

lnav_status lnav_gradcheck(const lnav_gradcheck_config *cfg, lnav_gradcheck_suite *suites,
                           uint64_t capacity, uint64_t *count) {
  return Guard([&] {
    const auto &c = Need(cfg, "cfg");
    NeedOut(count, "count");
    if (capacity > 0) NeedOut(suites, "suites");
    ln::GradcheckConfig g;
    g.trials = c.trials;
    g.seed = c.seed;
    g.step = c.step;
    g.tolerance = c.tolerance;
    g.corrupt = c.corrupt != 0;
    const auto results = ln::RunGradcheck(g);
    *count = results.size();
    for (std::size_t i = 0; i < results.size() && i < capacity; ++i) {
      const auto &r = results[i];
      const char *name = r.name == "numerics" ? "numerics" : "vae";
      suites[i] = {name, r.trials, r.coordinates, r.worst_relative_error,
                   r.passed ? 1 : 0};
    }
  });
}

}  // extern "C"
