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

#include "gradcheck.hpp"

#include <cmath>

#include "error.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "vae.hpp"

namespace latentnav {

namespace {

void Record(GradcheckSuite &suite, std::size_t trial, std::span<const double> analytic,
            std::span<const double> numeric) {
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double e = RelativeError(analytic[i], numeric[i]);
    if (e > suite.worst_relative_error) {
      suite.worst_relative_error = e;
      suite.worst_trial = trial;
      suite.worst_coordinate = suite.coordinates + i;
    }
  }
  suite.coordinates += analytic.size();
}

void Perturb(std::vector<Tensor> &tensors, SplitMix64 &rng, double scale) {
  for (auto &t : tensors) {
    for (double &v : t.data()) v += rng.Uniform(-scale, scale);
  }
}

GradcheckSuite NumericsSuite(const GradcheckConfig &cfg) {
  static constexpr Activation kHidden[] = {Activation::kTanh, Activation::kSigmoid,
                                           Activation::kRelu};
  static constexpr Activation kOutput[] = {Activation::kIdentity, Activation::kSigmoid,
                                           Activation::kTanh};
  GradcheckSuite suite{.name = "numerics"};
  SplitMix64 rng(DeriveSeed(cfg.seed, 1));
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    MlpSpec spec;
    const std::size_t layers = 1 + rng.Below(3);
    for (std::size_t l = 0; l <= layers; ++l) spec.layer_sizes.push_back(1 + rng.Below(10));
    spec.hidden_activation = kHidden[rng.Below(3)];
    spec.output_activation = kOutput[rng.Below(3)];
    auto params = InitMlpParams(spec, rng);
    Perturb(params, rng, 0.3);
    std::vector<double> input(spec.input_size());
    for (double &v : input) v = rng.Uniform(-1.0, 1.0);
    std::vector<double> target(spec.output_size());
    for (double &v : target) v = rng.Uniform(-1.0, 1.0);

    // L = sum_k t_k y_k + 0.5 y_k^2, so dL/dy = t + y.
    auto loss = [&](std::span<const Tensor> p, std::span<const double> x) {
      MlpCache cache;
      MlpForwardInto(spec, p, x, cache);
      double l = 0.0;
      for (std::size_t k = 0; k < target.size(); ++k) {
        const double y = cache.output()[k];
        l += target[k] * y + 0.5 * y * y;
      }
      return l;
    };

    MlpCache cache;
    MlpForwardInto(spec, params, input, cache);
    std::vector<double> out_grad(spec.output_size());
    for (std::size_t k = 0; k < out_grad.size(); ++k) out_grad[k] = target[k] + cache.output()[k];
    auto grads = ZeroMlpParams(spec);
    std::vector<double> input_grad(spec.input_size());
    MlpBackwardAccumulate(spec, params, cache, out_grad, grads, input_grad);
    std::vector<double> analytic = Flatten(grads);
    analytic.insert(analytic.end(), input_grad.begin(), input_grad.end());
    if (cfg.corrupt && trial == 0) analytic[0] += 1e-3 * (1.0 + std::abs(analytic[0]));

    std::vector<double> flat = Flatten(params);
    flat.insert(flat.end(), input.begin(), input.end());
    const std::size_t n_params = flat.size() - input.size();
    auto scratch = params;
    const auto numeric = FiniteDiffGradient(
        [&](std::span<const double> v) {
          Unflatten(v.first(n_params), scratch);
          return loss(scratch, v.subspan(n_params));
        },
        flat, cfg.step);
    Record(suite, trial, analytic, numeric);
  }
  suite.trials = cfg.trials;
  suite.passed = suite.worst_relative_error < cfg.tolerance;
  return suite;
}

GradcheckSuite VaeSuite(const GradcheckConfig &cfg) {
  GradcheckSuite suite{.name = "vae"};
  SplitMix64 rng(DeriveSeed(cfg.seed, 2));
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    ModelConfig mc;
    mc.height = 1 + rng.Below(3);
    mc.width = 1 + rng.Below(3);
    mc.channels = 1 + rng.Below(3);
    mc.latent_dim = 1 + rng.Below(3);
    mc.encoder_hidden.assign(rng.Below(3), 0);
    for (auto &h : mc.encoder_hidden) h = 1 + rng.Below(8);
    mc.decoder_hidden.assign(rng.Below(3), 0);
    for (auto &h : mc.decoder_hidden) h = 1 + rng.Below(8);
    mc.likelihood = trial % 2 == 0 ? Likelihood::kGaussianUnitVariance
                                   : Likelihood::kBernoulli;
    auto params = ModelParams::Init(mc, rng.Next());
    Perturb(params.tensors(), rng, 0.2);

    const std::size_t batch = 1 + rng.Below(3);
    const std::size_t samples = 1 + rng.Below(2);
    std::vector<std::vector<double>> images(batch, std::vector<double>(mc.pixel_count()));
    for (auto &img : images) {
      for (double &v : img) v = rng.Uniform(0.05, 0.95);
    }
    std::vector<std::span<const double>> spans(images.begin(), images.end());
    std::vector<std::vector<double>> noise(batch, std::vector<double>(samples * mc.latent_dim));
    for (auto &n : noise) {
      for (double &v : n) v = rng.Normal();
    }

    auto result = ComputeLossAndGrads(params, spans, noise);
    std::vector<double> analytic = Flatten(result.grads);
    if (cfg.corrupt && trial == 0) analytic[0] += 1e-3 * (1.0 + std::abs(analytic[0]));

    auto scratch = params;
    const auto numeric = FiniteDiffGradient(
        [&](std::span<const double> v) {
          Unflatten(v, scratch.tensors());
          return ComputeLossAndGrads(scratch, spans, noise).loss;
        },
        Flatten(params.tensors()), cfg.step);
    Record(suite, trial, analytic, numeric);
  }
  suite.trials = cfg.trials;
  suite.passed = suite.worst_relative_error < cfg.tolerance;
  return suite;
}

}  // namespace

void GradcheckConfig::Validate() const {
  if (trials == 0) Fail(ErrorCode::kConfig, "gradcheck trials must be >= 1");
  if (!(step > 0.0)) Fail(ErrorCode::kConfig, "gradcheck step must be > 0");
  if (!(tolerance > 0.0)) Fail(ErrorCode::kConfig, "gradcheck tolerance must be > 0");
}

std::vector<GradcheckSuite> RunGradcheck(const GradcheckConfig &cfg) {
  cfg.Validate();
  return {NumericsSuite(cfg), VaeSuite(cfg)};
}

}  // namespace latentnav
