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

#include "vae.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "error.hpp"
#include "io_util.hpp"

namespace latentnav {

namespace {

constexpr double kBernoulliClamp = 1e-7;

void CheckLength(std::span<const double> v, std::size_t expected,
                 const char *what) {
  if (v.size() != expected) {
    Fail(ErrorCode::kConfig, std::string(what) + " has length " +
                                 std::to_string(v.size()) + ", expected " +
                                 std::to_string(expected));
  }
}

// Per-sample scratch reused across a batch.
struct Workspace {
  MlpCache trunk;
  MlpCache mu;
  MlpCache log_var;
  MlpCache decoder;
  std::vector<double> recon_grad;
  std::vector<double> dz;
  std::vector<double> dmu;
  std::vector<double> dlog_var;
  std::vector<double> dh;
  std::vector<double> dh_part;
  std::vector<double> z;
};

std::span<const double> EncodeInto(const ModelParams &params,
                                   std::span<const double> x, Workspace &ws) {
  const auto &cfg = params.config();
  CheckLength(x, cfg.pixel_count(), "image");
  std::span<const double> h = x;
  if (cfg.has_trunk()) {
    MlpForwardTrusted(cfg.TrunkSpec(), params.trunk(), x, ws.trunk);
    h = ws.trunk.output();
  }
  const MlpSpec head = cfg.HeadSpec();
  MlpForwardTrusted(head, params.mu_head(), h, ws.mu);
  MlpForwardTrusted(head, params.log_var_head(), h, ws.log_var);
  return h;
}

// d(-log p(x|x_hat)) / d x_hat.
void ReconLossGradient(std::span<const double> x, std::span<const double> x_hat,
                       Likelihood kind, double scale, std::vector<double> &out) {
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (kind == Likelihood::kGaussianUnitVariance) {
      out[i] = scale * (x_hat[i] - x[i]);
    } else {
      const double p = x_hat[i];
      if (p < kBernoulliClamp || p > 1.0 - kBernoulliClamp) {
        out[i] = 0.0;  // clamp is flat there
      } else {
        out[i] = scale * (-(x[i] / p) + (1.0 - x[i]) / (1.0 - p));
      }
    }
  }
}

}  // namespace

const char *LikelihoodName(Likelihood l) {
  return l == Likelihood::kBernoulli ? "bernoulli" : "gaussian_unit_variance";
}

Likelihood ParseLikelihood(const std::string &name) {
  if (name == "gaussian_unit_variance" || name == "gaussian") {
    return Likelihood::kGaussianUnitVariance;
  }
  if (name == "bernoulli") return Likelihood::kBernoulli;
  Fail(ErrorCode::kConfig, "unknown likelihood '" + name + "'");
}

void ModelConfig::Validate() const {
  if (latent_dim == 0) Fail(ErrorCode::kConfig, "latent_dim must be >= 1");
  if (height == 0 || width == 0 || channels == 0) {
    Fail(ErrorCode::kConfig, "image height, width and channels must be >= 1");
  }
  for (auto h : encoder_hidden) {
    if (h == 0) Fail(ErrorCode::kConfig, "encoder_hidden sizes must be >= 1");
  }
  for (auto h : decoder_hidden) {
    if (h == 0) Fail(ErrorCode::kConfig, "decoder_hidden sizes must be >= 1");
  }
  if (likelihood != Likelihood::kGaussianUnitVariance &&
      likelihood != Likelihood::kBernoulli) {
    Fail(ErrorCode::kConfig, "unknown likelihood code");
  }
}

MlpSpec ModelConfig::TrunkSpec() const {
  MlpSpec spec;
  spec.layer_sizes.push_back(pixel_count());
  spec.layer_sizes.insert(spec.layer_sizes.end(), encoder_hidden.begin(),
                          encoder_hidden.end());
  spec.hidden_activation = Activation::kTanh;
  spec.output_activation = Activation::kTanh;
  return spec;
}

MlpSpec ModelConfig::HeadSpec() const {
  MlpSpec spec;
  spec.layer_sizes = {has_trunk() ? encoder_hidden.back() : pixel_count(),
                      latent_dim};
  spec.hidden_activation = Activation::kTanh;
  spec.output_activation = Activation::kIdentity;
  return spec;
}

MlpSpec ModelConfig::DecoderSpec() const {
  MlpSpec spec;
  spec.layer_sizes.push_back(latent_dim);
  spec.layer_sizes.insert(spec.layer_sizes.end(), decoder_hidden.begin(),
                          decoder_hidden.end());
  spec.layer_sizes.push_back(pixel_count());
  spec.hidden_activation = Activation::kTanh;
  spec.output_activation = Activation::kSigmoid;
  return spec;
}

ModelParams ModelParams::Zero(const ModelConfig &config) {
  config.Validate();
  ModelParams p;
  p.config_ = config;
  if (config.has_trunk()) {
    p.tensors_ = ZeroMlpParams(config.TrunkSpec());
  }
  p.trunk_count_ = p.tensors_.size();
  for (int head = 0; head < 2; ++head) {
    for (auto &t : ZeroMlpParams(config.HeadSpec())) p.tensors_.push_back(std::move(t));
  }
  for (auto &t : ZeroMlpParams(config.DecoderSpec())) p.tensors_.push_back(std::move(t));
  return p;
}

ModelParams ModelParams::Init(const ModelConfig &config, std::uint64_t seed) {
  config.Validate();
  ModelParams p;
  p.config_ = config;
  SplitMix64 rng(DeriveSeed(seed, 1));
  if (config.has_trunk()) p.tensors_ = InitMlpParams(config.TrunkSpec(), rng);
  p.trunk_count_ = p.tensors_.size();
  for (int head = 0; head < 2; ++head) {
    for (auto &t : InitMlpParams(config.HeadSpec(), rng)) {
      p.tensors_.push_back(std::move(t));
    }
  }
  for (auto &t : InitMlpParams(config.DecoderSpec(), rng)) {
    p.tensors_.push_back(std::move(t));
  }
  return p;
}

GaussianPosterior Encode(const ModelParams &params, std::span<const double> x) {
  Workspace ws;
  EncodeInto(params, x, ws);
  return {std::vector<double>(ws.mu.output().begin(), ws.mu.output().end()),
          std::vector<double>(ws.log_var.output().begin(),
                              ws.log_var.output().end())};
}

std::vector<double> SampleLatent(const GaussianPosterior &post,
                                 std::span<const double> eps) {
  CheckLength(eps, post.mu.size(), "noise vector");
  std::vector<double> z(post.mu.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = post.mu[j] + std::exp(0.5 * post.log_var[j]) * eps[j];
  }
  return z;
}

std::vector<double> Decode(const ModelParams &params, std::span<const double> z) {
  CheckLength(z, params.config().latent_dim, "latent vector");
  MlpCache cache;
  MlpForwardTrusted(params.config().DecoderSpec(), params.decoder(), z, cache);
  return cache.activations.back();
}

double KlDivergence(const GaussianPosterior &post) {
  double acc = 0.0;
  for (std::size_t j = 0; j < post.mu.size(); ++j) {
    const double lv = post.log_var[j];
    acc += 1.0 + lv - post.mu[j] * post.mu[j] - std::exp(lv);
  }
  return -0.5 * acc;
}

double ReconLogLikelihood(std::span<const double> x, std::span<const double> x_hat,
                          Likelihood kind) {
  CheckLength(x_hat, x.size(), "reconstruction");
  const double d = static_cast<double>(x.size());
  if (kind == Likelihood::kGaussianUnitVariance) {
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - x_hat[i];
      sq += r * r;
    }
    return -0.5 * sq - 0.5 * d * std::log(2.0 * std::numbers::pi);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x_hat[i], kBernoulliClamp, 1.0 - kBernoulliClamp);
    acc += x[i] * std::log(p) + (1.0 - x[i]) * std::log(1.0 - p);
  }
  return acc;
}

double ElboEstimate(const ModelParams &params, std::span<const double> x,
                    std::span<const std::vector<double>> eps_samples) {
  if (eps_samples.empty()) {
    Fail(ErrorCode::kArgument, "ELBO estimate needs at least one noise sample");
  }
  const GaussianPosterior post = Encode(params, x);
  double recon = 0.0;
  for (const auto &eps : eps_samples) {
    recon += ReconLogLikelihood(x, Decode(params, SampleLatent(post, eps)),
                                params.config().likelihood);
  }
  return -KlDivergence(post) + recon / static_cast<double>(eps_samples.size());
}

LossAndGrads ComputeLossAndGrads(const ModelParams &params,
                                 std::span<const std::span<const double>> batch,
                                 std::span<const std::vector<double>> noise) {
  if (batch.empty()) Fail(ErrorCode::kArgument, "batch must be non-empty");
  if (noise.size() != batch.size()) {
    Fail(ErrorCode::kArgument, "one noise block per batch item is required");
  }
  const ModelConfig &cfg = params.config();
  const std::size_t J = cfg.latent_dim;
  const MlpSpec trunk_spec = cfg.has_trunk() ? cfg.TrunkSpec() : MlpSpec{};
  const MlpSpec head_spec = cfg.HeadSpec();
  const MlpSpec dec_spec = cfg.DecoderSpec();

  LossAndGrads out;
  for (const auto &t : params.tensors()) out.grads.emplace_back(t.shape());
  std::span<Tensor> all_grads(out.grads);
  const std::size_t tc = params.trunk_count();
  std::span<Tensor> trunk_grads = all_grads.subspan(0, tc);
  std::span<Tensor> mu_grads = all_grads.subspan(tc, 2);
  std::span<Tensor> lv_grads = all_grads.subspan(tc + 2, 2);
  std::span<Tensor> dec_grads = all_grads.subspan(tc + 4);

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  Workspace ws;
  double total = 0.0;
  // Samples are processed and accumulated in ascending index order.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = batch[i];
    const auto &eps_block = noise[i];
    if (eps_block.empty() || eps_block.size() % J != 0) {
      Fail(ErrorCode::kArgument, "noise block " + std::to_string(i) +
                                     " is not a multiple of the latent size");
    }
    const std::size_t L = eps_block.size() / J;
    const double inv_l = 1.0 / static_cast<double>(L);
    const auto h = EncodeInto(params, x, ws);
    const auto mu = ws.mu.output();
    const auto lv = ws.log_var.output();

    double kl = 0.0;
    ws.dmu.assign(J, 0.0);
    ws.dlog_var.assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double var = std::exp(lv[j]);
      kl += -0.5 * (1.0 + lv[j] - mu[j] * mu[j] - var);
      ws.dmu[j] = inv_batch * mu[j];
      ws.dlog_var[j] = inv_batch * 0.5 * (var - 1.0);
    }

    double recon = 0.0;
    ws.z.resize(J);
    ws.dz.resize(J);
    for (std::size_t l = 0; l < L; ++l) {
      const double *eps = eps_block.data() + l * J;
      for (std::size_t j = 0; j < J; ++j) {
        ws.z[j] = mu[j] + std::exp(0.5 * lv[j]) * eps[j];
      }
      MlpForwardTrusted(dec_spec, params.decoder(), ws.z, ws.decoder);
      const auto x_hat = ws.decoder.output();
      recon += ReconLogLikelihood(x, x_hat, cfg.likelihood);
      ReconLossGradient(x, x_hat, cfg.likelihood, inv_batch * inv_l, ws.recon_grad);
      MlpBackwardTrusted(dec_spec, params.decoder(), ws.decoder, ws.recon_grad,
                            dec_grads, ws.dz);
      for (std::size_t j = 0; j < J; ++j) {
        const double sigma = std::exp(0.5 * lv[j]);
        ws.dmu[j] += ws.dz[j];
        ws.dlog_var[j] += ws.dz[j] * eps[j] * 0.5 * sigma;
      }
    }
    const double sample_loss = kl - recon * inv_l;
    if (!std::isfinite(sample_loss)) {
      Fail(ErrorCode::kTraining,
           "non-finite loss at batch sample " + std::to_string(i));
    }
    total += sample_loss;

    ws.dh.assign(h.size(), 0.0);
    ws.dh_part.assign(h.size(), 0.0);
    MlpBackwardTrusted(head_spec, params.mu_head(), ws.mu, ws.dmu, mu_grads,
                          ws.dh);
    MlpBackwardTrusted(head_spec, params.log_var_head(), ws.log_var,
                          ws.dlog_var, lv_grads, ws.dh_part);
    if (cfg.has_trunk()) {
      for (std::size_t k = 0; k < ws.dh.size(); ++k) ws.dh[k] += ws.dh_part[k];
      MlpBackwardTrusted(trunk_spec, params.trunk(), ws.trunk, ws.dh,
                            trunk_grads, {});
    }
  }
  out.loss = total * inv_batch;
  return out;
}

void TrainConfig::Validate() const {
  if (batch_size == 0) Fail(ErrorCode::kConfig, "batch_size must be >= 1");
  if (mc_samples == 0) Fail(ErrorCode::kConfig, "mc_samples must be >= 1");
  optimizer.Validate();
}

TrainReport Train(ModelParams &params, std::span<const std::span<const double>> data,
                  const TrainConfig &cfg, const EpochCallback &on_epoch) {
  cfg.Validate();
  if (data.empty()) Fail(ErrorCode::kArgument, "training set is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != params.config().pixel_count()) {
      Fail(ErrorCode::kConfig, "training image " + std::to_string(i) + " has " +
                                   std::to_string(data[i].size()) +
                                   " values; the model expects " +
                                   std::to_string(params.config().pixel_count()));
    }
  }
  const std::size_t J = params.config().latent_dim;
  const std::size_t n = data.size();
  SplitMix64 rng(DeriveSeed(cfg.seed, 2));
  RmspropState state{cfg.optimizer, {}};
  TrainReport report;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::span<const double>> batch;
  std::vector<std::vector<double>> noise;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (cfg.shuffle) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.Below(i + 1)]);
      }
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0, b = 0; start < n; start += cfg.batch_size, ++b) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      batch.clear();
      noise.resize(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(data[order[k]]);
        auto &block = noise[k - start];
        block.resize(cfg.mc_samples * J);
        for (double &e : block) e = rng.Normal();
      }
      LossAndGrads lg;
      try {
        lg = ComputeLossAndGrads(params, batch, noise);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kTraining) throw;
        Fail(ErrorCode::kTraining, std::string(e.what()) + " (epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(b) + ")");
      }
      loss_sum += lg.loss * static_cast<double>(stop - start);
      RmspropStep(params.tensors(), lg.grads, state);
    }
    const double mean = loss_sum / static_cast<double>(n);
    report.epoch_loss.push_back(mean);
    report.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count());
    if (on_epoch) on_epoch(epoch, mean);
  }
  report.params_checksum = params.checksum();
  return report;
}

namespace {

constexpr char kMagic[8] = {'L', 'N', 'A', 'V', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void SliceSpec::Validate(std::size_t latent_dim) const {
  if (!(dim_a < dim_b && dim_b < latent_dim)) {
    Fail(ErrorCode::kArgument, "slice dims need 0 <= a < b < latent_dim (" +
                                   std::to_string(latent_dim) + ")");
  }
  if (grid < 2) Fail(ErrorCode::kArgument, "slice grid must be >= 2");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(fixed)) {
    Fail(ErrorCode::kArgument, "slice bounds and fixed value must be finite");
  }
}

std::vector<double> SliceValues(const SliceSpec &spec) {
  std::vector<double> v(spec.grid);
  const double step = (spec.hi - spec.lo) / static_cast<double>(spec.grid - 1);
  for (std::size_t i = 0; i < spec.grid; ++i) {
    v[i] = spec.lo + static_cast<double>(i) * step;
  }
  v.back() = spec.hi;
  return v;
}

std::vector<double> SliceLatent(const SliceSpec &spec, std::size_t latent_dim,
                                std::size_t row, std::size_t col) {
  spec.Validate(latent_dim);
  const auto values = SliceValues(spec);
  std::vector<double> z(latent_dim, spec.fixed);
  z[spec.dim_a] = values.at(row);
  z[spec.dim_b] = values.at(col);
  return z;
}

Image DecodeSlice(const ModelParams &params, const SliceSpec &spec) {
  const ModelConfig &cfg = params.config();
  spec.Validate(cfg.latent_dim);
  std::vector<Image> tiles;
  tiles.reserve(spec.grid * spec.grid);
  for (std::size_t r = 0; r < spec.grid; ++r) {
    for (std::size_t c = 0; c < spec.grid; ++c) {
      Image tile(cfg.height, cfg.width, cfg.channels);
      tile.pixels = Decode(params, SliceLatent(spec, cfg.latent_dim, r, c));
      tiles.push_back(std::move(tile));
    }
  }
  return TileImages(tiles, spec.grid, spec.grid);
}

std::string EncodeCheckpoint(const ModelParams &params) {
  const auto &cfg = params.config();
  std::string out(kMagic, sizeof(kMagic));
  AppendU32(out, kVersion);
  AppendU32(out, static_cast<std::uint32_t>(cfg.latent_dim));
  AppendU32(out, static_cast<std::uint32_t>(cfg.height));
  AppendU32(out, static_cast<std::uint32_t>(cfg.width));
  AppendU32(out, static_cast<std::uint32_t>(cfg.channels));
  AppendU32(out, static_cast<std::uint32_t>(cfg.likelihood));
  for (const auto *hidden : {&cfg.encoder_hidden, &cfg.decoder_hidden}) {
    AppendU32(out, static_cast<std::uint32_t>(hidden->size()));
    for (auto s : *hidden) AppendU32(out, static_cast<std::uint32_t>(s));
  }
  for (const auto &t : params.tensors()) {
    for (double v : t.data()) AppendF64(out, v);
  }
  return out;
}

ModelParams DecodeCheckpoint(const std::string &bytes) {
  auto need = [&](std::size_t upto, const char *what) {
    if (bytes.size() < upto) {
      Fail(ErrorCode::kTruncated,
           std::string("checkpoint truncated in ") + what + ": expected at least " +
               std::to_string(upto) + " bytes, got " + std::to_string(bytes.size()));
    }
  };
  need(sizeof(kMagic), "magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    Fail(ErrorCode::kBadMagic, "bad magic: not a LNAVCKP1 checkpoint");
  }
  std::size_t pos = sizeof(kMagic);
  auto u32 = [&](const char *what) {
    need(pos + 4, what);
    const auto v = ReadU32(bytes, pos);
    pos += 4;
    return v;
  };
  const auto version = u32("version");
  if (version != kVersion) {
    Fail(ErrorCode::kBadVersion,
         "unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig cfg;
  cfg.latent_dim = u32("header");
  cfg.height = u32("header");
  cfg.width = u32("header");
  cfg.channels = u32("header");
  const auto lik = u32("header");
  if (lik > 1) Fail(ErrorCode::kFormat, "unknown likelihood code " + std::to_string(lik));
  cfg.likelihood = static_cast<Likelihood>(lik);
  for (auto *hidden : {&cfg.encoder_hidden, &cfg.decoder_hidden}) {
    const auto count = u32("layer table");
    if (count > 64) Fail(ErrorCode::kFormat, "implausible layer count");
    hidden->clear();
    for (std::uint32_t i = 0; i < count; ++i) hidden->push_back(u32("layer table"));
  }
  try {
    cfg.Validate();
  } catch (const Error &e) {
    Fail(ErrorCode::kFormat, std::string("checkpoint header invalid: ") + e.what());
  }
  ModelParams params = ModelParams::Zero(cfg);
  const std::size_t expected = pos + 8 * params.parameter_count();
  if (bytes.size() < expected) {
    Fail(ErrorCode::kTruncated, "checkpoint truncated: expected " +
                                    std::to_string(expected) + " bytes, got " +
                                    std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    Fail(ErrorCode::kFormat, "checkpoint has " +
                                 std::to_string(bytes.size() - expected) +
                                 " trailing bytes");
  }
  for (auto &t : params.tensors()) {
    for (double &v : t.data()) {
      v = ReadF64(bytes, pos);
      pos += 8;
    }
  }
  return params;
}

void SaveCheckpoint(const ModelParams &params, const std::string &path) {
  WriteFileAtomic(path, EncodeCheckpoint(params));
}

ModelParams LoadCheckpoint(const std::string &path) {
  return DecodeCheckpoint(ReadFileBytes(path));
}

}  // namespace latentnav
