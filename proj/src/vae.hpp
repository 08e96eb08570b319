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

// Variational autoencoder with a diagonal Gaussian posterior, a standard
// normal prior and a fully connected encoder/decoder pair.
//
// Encoder: x -> trunk (tanh hidden layers) -> two linear heads giving mu and
// log(sigma^2). Decoder: z -> tanh hidden layers -> sigmoid pixels.

#ifndef LATENTNAV_VAE_HPP
#define LATENTNAV_VAE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "image.hpp"
#include "numerics.hpp"

namespace latentnav {

enum class Likelihood : std::uint32_t {
  kGaussianUnitVariance = 0,
  kBernoulli = 1,
};

const char *LikelihoodName(Likelihood l);
Likelihood ParseLikelihood(const std::string &name);

struct ModelConfig {
  std::size_t latent_dim = 4;
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t channels = 3;
  std::vector<std::size_t> encoder_hidden{64};
  std::vector<std::size_t> decoder_hidden{64};
  Likelihood likelihood = Likelihood::kGaussianUnitVariance;

  std::size_t pixel_count() const { return height * width * channels; }
  void Validate() const;

  /// Empty encoder_hidden means the heads read the pixels directly, and
  /// TrunkSpec() is then not a valid network.
  bool has_trunk() const { return !encoder_hidden.empty(); }
  MlpSpec TrunkSpec() const;
  MlpSpec HeadSpec() const;
  MlpSpec DecoderSpec() const;

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

/// All encoder (phi) and decoder (theta) tensors in checkpoint order:
/// trunk layers, mu head, log-variance head, decoder layers; each layer is
/// (weights, bias).
class ModelParams {
 public:
  ModelParams() = default;

  static ModelParams Zero(const ModelConfig &config);
  /// Glorot-uniform weights and zero biases drawn from `seed`.
  static ModelParams Init(const ModelConfig &config, std::uint64_t seed);

  const ModelConfig &config() const { return config_; }

  std::vector<Tensor> &tensors() { return tensors_; }
  const std::vector<Tensor> &tensors() const { return tensors_; }

  std::span<const Tensor> trunk() const { return Slice(0, trunk_count_); }
  std::span<const Tensor> mu_head() const { return Slice(trunk_count_, 2); }
  std::span<const Tensor> log_var_head() const {
    return Slice(trunk_count_ + 2, 2);
  }
  std::span<const Tensor> decoder() const {
    return Slice(trunk_count_ + 4, tensors_.size() - trunk_count_ - 4);
  }

  std::size_t trunk_count() const { return trunk_count_; }
  std::size_t parameter_count() const { return CountParams(tensors_); }
  std::uint64_t checksum() const { return Fingerprint(tensors_); }

  friend bool operator==(const ModelParams &, const ModelParams &) = default;

 private:
  std::span<const Tensor> Slice(std::size_t offset, std::size_t count) const {
    return std::span<const Tensor>(tensors_).subspan(offset, count);
  }

  ModelConfig config_;
  std::vector<Tensor> tensors_;
  std::size_t trunk_count_ = 0;
};

struct GaussianPosterior {
  std::vector<double> mu;
  std::vector<double> log_var;
};

GaussianPosterior Encode(const ModelParams &params, std::span<const double> x);

/// z = mu + exp(log_var / 2) * eps.
std::vector<double> SampleLatent(const GaussianPosterior &post,
                                 std::span<const double> eps);

std::vector<double> Decode(const ModelParams &params, std::span<const double> z);

/// KL(q || N(0, I)) = -1/2 sum(1 + log_var - mu^2 - exp(log_var)).
double KlDivergence(const GaussianPosterior &post);

/// log p(x | x_hat). Gaussian: -|x - x_hat|^2 / 2 - D/2 ln(2 pi).
/// Bernoulli: sum x ln x_hat + (1 - x) ln(1 - x_hat), x_hat clamped to
/// [1e-7, 1 - 1e-7].
double ReconLogLikelihood(std::span<const double> x, std::span<const double> x_hat,
                          Likelihood kind);

/// SGVB estimate: -KL + mean over eps samples of the reconstruction term.
double ElboEstimate(const ModelParams &params, std::span<const double> x,
                    std::span<const std::vector<double>> eps_samples);

struct LossAndGrads {
  double loss = 0.0;
  std::vector<Tensor> grads;
};

/// Mean negative SGVB estimate over the batch and its exact gradient with
/// respect to every tensor in `params`. noise[i] holds the L * J standard
/// normal draws for batch[i] (L consecutive blocks of J).
LossAndGrads ComputeLossAndGrads(const ModelParams &params,
                                 std::span<const std::span<const double>> batch,
                                 std::span<const std::vector<double>> noise);

struct TrainConfig {
  std::size_t batch_size = 20;
  std::size_t epochs = 200;
  std::size_t mc_samples = 1;
  std::uint64_t seed = 1;
  RmspropSettings optimizer;
  bool shuffle = true;

  void Validate() const;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_seconds;
  std::uint64_t params_checksum = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// AEVB: per epoch, optionally shuffle, cut into batches of batch_size,
/// draw reparameterization noise, take one RMSprop step per batch. The
/// noise and the shuffle come from one splitmix64 stream seeded by
/// cfg.seed, consumed in a fixed order.
TrainReport Train(ModelParams &params, std::span<const std::span<const double>> data,
                  const TrainConfig &cfg, const EpochCallback &on_epoch = {});

// Checkpoint file: magic "LNAVCKP1", then u32 version (1), J, height, width,
// channels, likelihood code, encoder hidden count + sizes, decoder hidden
// count + sizes, then every tensor as little-endian f64 in ModelParams order.
struct SliceSpec {
  std::size_t dim_a = 0;
  std::size_t dim_b = 1;
  std::size_t grid = 10;
  double lo = 0.05;
  double hi = 0.95;
  double fixed = 0.0;

  void Validate(std::size_t latent_dim) const;
};

/// grid values lo + i (hi - lo) / (grid - 1); the last is exactly hi.
std::vector<double> SliceValues(const SliceSpec &spec);

/// Latent point of tile (row, col): z[dim_a] = v_row, z[dim_b] = v_col,
/// every other entry `fixed`.
std::vector<double> SliceLatent(const SliceSpec &spec, std::size_t latent_dim,
                                std::size_t row, std::size_t col);

/// Decoded tiles placed row-major into one (grid h) x (grid w) image.
Image DecodeSlice(const ModelParams &params, const SliceSpec &spec);

std::string EncodeCheckpoint(const ModelParams &params);
ModelParams DecodeCheckpoint(const std::string &bytes);
void SaveCheckpoint(const ModelParams &params, const std::string &path);
ModelParams LoadCheckpoint(const std::string &path);

}  // namespace latentnav

#endif
