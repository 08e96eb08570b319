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

#include "numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "error.hpp"

namespace latentnav {

namespace {

std::size_t ShapeProduct(const std::vector<std::size_t> &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void CheckShape(const std::vector<std::size_t> &shape) {
  if (shape.empty()) Fail(ErrorCode::kConfig, "tensor shape must be non-empty");
  for (auto extent : shape) {
    if (extent == 0) Fail(ErrorCode::kConfig, "tensor extents must be positive");
  }
}

void CheckParams(const MlpSpec &spec, std::span<const Tensor> params) {
  if (params.size() != 2 * spec.num_layers()) {
    Fail(ErrorCode::kConfig, "expected " + std::to_string(2 * spec.num_layers()) +
                                 " parameter tensors, got " +
                                 std::to_string(params.size()));
  }
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const auto in = spec.layer_sizes[l];
    const auto out = spec.layer_sizes[l + 1];
    const auto &w = params[2 * l];
    const auto &b = params[2 * l + 1];
    if (w.shape() != std::vector<std::size_t>{out, in} ||
        b.shape() != std::vector<std::size_t>{out}) {
      Fail(ErrorCode::kConfig, "parameter shape mismatch at layer " +
                                   std::to_string(l) + " (expected " +
                                   std::to_string(out) + "x" +
                                   std::to_string(in) + " weights)");
    }
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  CheckShape(shape_);
  data_.assign(ShapeProduct(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckShape(shape_);
  if (ShapeProduct(shape_) != data_.size()) {
    Fail(ErrorCode::kConfig, "tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape product " +
                                 std::to_string(ShapeProduct(shape_)));
  }
}

Tensor Tensor::FromVector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

void Tensor::SetZero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

const char *ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

Activation ParseActivation(const std::string &name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  Fail(ErrorCode::kConfig, "unknown activation '" + name + "'");
}

double Activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double ActivationDerivative(Activation a, double x, double y) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

void MlpSpec::Validate() const {
  if (layer_sizes.size() < 2) {
    Fail(ErrorCode::kConfig, "network needs at least 2 layer sizes");
  }
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] == 0) {
      Fail(ErrorCode::kConfig, "layer " + std::to_string(i) + " has size 0");
    }
  }
  if (hidden_activation == Activation::kIdentity) {
    Fail(ErrorCode::kConfig, "hidden activation must be tanh, relu or sigmoid");
  }
}

std::vector<Tensor> ZeroMlpParams(const MlpSpec &spec) {
  spec.Validate();
  std::vector<Tensor> params;
  params.reserve(2 * spec.num_layers());
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    params.emplace_back(std::vector<std::size_t>{spec.layer_sizes[l + 1],
                                                 spec.layer_sizes[l]});
    params.emplace_back(std::vector<std::size_t>{spec.layer_sizes[l + 1]});
  }
  return params;
}

std::vector<Tensor> InitMlpParams(const MlpSpec &spec, SplitMix64 &rng) {
  auto params = ZeroMlpParams(spec);
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double fan_in = static_cast<double>(spec.layer_sizes[l]);
    const double fan_out = static_cast<double>(spec.layer_sizes[l + 1]);
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    for (double &w : params[2 * l].data()) w = rng.Uniform(-s, s);
  }
  return params;
}

std::size_t CountParams(std::span<const Tensor> params) {
  std::size_t n = 0;
  for (const auto &t : params) n += t.size();
  return n;
}

std::uint64_t Fingerprint(std::span<const Tensor> params) {
  // FNV-1a style over the raw bit patterns, four interleaved lanes.
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t lane[4] = {0xcbf29ce484222325ULL, 0x84222325cbf29ce4ULL,
                           0x9e3779b97f4a7c15ULL, 0xbf58476d1ce4e5b9ULL};
  for (const auto &t : params) {
    lane[0] = (lane[0] ^ t.size()) * kPrime;
    const auto d = t.data();
    std::size_t i = 0;
    for (; i + 4 <= d.size(); i += 4) {
      for (int k = 0; k < 4; ++k) {
        lane[k] = (lane[k] ^ std::bit_cast<std::uint64_t>(d[i + k])) * kPrime;
      }
    }
    for (; i < d.size(); ++i) {
      lane[0] = (lane[0] ^ std::bit_cast<std::uint64_t>(d[i])) * kPrime;
    }
  }
  std::uint64_t h = lane[0];
  for (int k = 1; k < 4; ++k) h = (h ^ lane[k]) * kPrime;
  return h;
}

namespace {

void ForwardImpl(const MlpSpec &spec, std::span<const Tensor> params,
                 std::span<const double> input, MlpCache &cache, bool verified) {
  spec.Validate();
  CheckParams(spec, params);
  if (input.size() != spec.input_size()) {
    Fail(ErrorCode::kConfig, "input length " + std::to_string(input.size()) +
                                 " does not match layer 0 size " +
                                 std::to_string(spec.input_size()));
  }
  const std::size_t layers = spec.num_layers();
  cache.activations.resize(layers + 1);
  cache.pre_activations.resize(layers);
  cache.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = spec.layer_sizes[l];
    const auto out = spec.layer_sizes[l + 1];
    const auto w = params[2 * l].data();
    const auto b = params[2 * l + 1].data();
    const auto &a = cache.activations[l];
    auto &z = cache.pre_activations[l];
    auto &y = cache.activations[l + 1];
    z.resize(out);
    y.resize(out);
    const Activation act = spec.activation_for(l);
    for (std::size_t i = 0; i < out; ++i) {
      const double *row = w.data() + i * in;
      double acc[4] = {0.0, 0.0, 0.0, 0.0};
      std::size_t j = 0;
      for (; j + 4 <= in; j += 4) {
        for (int k = 0; k < 4; ++k) acc[k] += row[j + k] * a[j + k];
      }
      for (; j < in; ++j) acc[0] += row[j] * a[j];
      const double sum = b[i] + ((acc[0] + acc[1]) + (acc[2] + acc[3]));
      z[i] = sum;
      y[i] = Activate(act, sum);
    }
  }
  cache.params_fingerprint = verified ? Fingerprint(params) : 0;
}

void BackwardImpl(const MlpSpec &spec, std::span<const Tensor> params,
                  const MlpCache &cache, std::span<const double> output_gradient,
                  std::span<Tensor> param_grads, std::span<double> input_grad,
                  bool verified) {
  spec.Validate();
  CheckParams(spec, params);
  const std::size_t layers = spec.num_layers();
  if (cache.activations.size() != layers + 1 ||
      cache.pre_activations.size() != layers ||
      (verified && cache.params_fingerprint != Fingerprint(params))) {
    Fail(ErrorCode::kContract,
         "backward pass cache does not belong to these parameters");
  }
  for (std::size_t l = 0; l <= layers; ++l) {
    if (cache.activations[l].size() != spec.layer_sizes[l]) {
      Fail(ErrorCode::kContract, "backward pass cache has wrong size at layer " +
                                     std::to_string(l));
    }
  }
  if (output_gradient.size() != spec.output_size()) {
    Fail(ErrorCode::kConfig, "output gradient length mismatch");
  }
  if (!param_grads.empty()) CheckParams(spec, param_grads);
  if (!input_grad.empty() && input_grad.size() != spec.input_size()) {
    Fail(ErrorCode::kConfig, "input gradient length mismatch");
  }

  std::vector<double> delta(output_gradient.begin(), output_gradient.end());
  std::vector<double> upstream;
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = spec.layer_sizes[l];
    const auto out = spec.layer_sizes[l + 1];
    const Activation act = spec.activation_for(l);
    const auto &z = cache.pre_activations[l];
    const auto &y = cache.activations[l + 1];
    const auto &a = cache.activations[l];
    for (std::size_t i = 0; i < out; ++i) {
      delta[i] *= ActivationDerivative(act, z[i], y[i]);
    }
    if (!param_grads.empty()) {
      auto dw = param_grads[2 * l].data();
      auto db = param_grads[2 * l + 1].data();
      for (std::size_t i = 0; i < out; ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        double *row = dw.data() + i * in;
        for (std::size_t j = 0; j < in; ++j) row[j] += d * a[j];
        db[i] += d;
      }
    }
    if (l == 0 && input_grad.empty()) break;
    const auto w = params[2 * l].data();
    upstream.assign(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      if (d == 0.0) continue;
      const double *row = w.data() + i * in;
      for (std::size_t j = 0; j < in; ++j) upstream[j] += row[j] * d;
    }
    delta.swap(upstream);
  }
  if (!input_grad.empty()) std::copy(delta.begin(), delta.end(), input_grad.begin());
}

}  // namespace

void MlpForwardInto(const MlpSpec &spec, std::span<const Tensor> params,
                    std::span<const double> input, MlpCache &cache) {
  ForwardImpl(spec, params, input, cache, true);
}

MlpForwardResult MlpForward(const MlpSpec &spec, std::span<const Tensor> params,
                            const Tensor &input) {
  MlpForwardResult result;
  MlpForwardInto(spec, params, input.data(), result.cache);
  result.output = Tensor::FromVector(result.cache.activations.back());
  return result;
}

void MlpForwardTrusted(const MlpSpec &spec, std::span<const Tensor> params,
                       std::span<const double> input, MlpCache &cache) {
  ForwardImpl(spec, params, input, cache, false);
}

void MlpBackwardAccumulate(const MlpSpec &spec, std::span<const Tensor> params,
                           const MlpCache &cache,
                           std::span<const double> output_gradient,
                           std::span<Tensor> param_grads,
                           std::span<double> input_grad) {
  BackwardImpl(spec, params, cache, output_gradient, param_grads, input_grad, true);
}

void MlpBackwardTrusted(const MlpSpec &spec, std::span<const Tensor> params,
                        const MlpCache &cache, std::span<const double> output_gradient,
                        std::span<Tensor> param_grads, std::span<double> input_grad) {
  BackwardImpl(spec, params, cache, output_gradient, param_grads, input_grad, false);
}

MlpGradients MlpBackward(const MlpSpec &spec, std::span<const Tensor> params,
                         const MlpCache &cache, const Tensor &output_gradient) {
  MlpGradients grads;
  grads.params = ZeroMlpParams(spec);
  grads.input = Tensor({spec.input_size()});
  MlpBackwardAccumulate(spec, params, cache, output_gradient.data(),
                        grads.params, grads.input.data());
  return grads;
}

std::vector<double> FiniteDiffGradient(const ScalarFunction &f,
                                       std::span<const double> params,
                                       double h) {
  if (!(h > 0.0)) Fail(ErrorCode::kArgument, "finite-difference step must be > 0");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double plus = f(p);
    p[i] = saved - h;
    const double minus = f(p);
    p[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      Fail(ErrorCode::kEvaluation,
           "non-finite function value at coordinate " + std::to_string(i));
    }
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

double RelativeError(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

std::vector<double> Flatten(std::span<const Tensor> tensors) {
  std::vector<double> flat;
  flat.reserve(CountParams(tensors));
  for (const auto &t : tensors) {
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  return flat;
}

void Unflatten(std::span<const double> flat, std::span<Tensor> tensors) {
  if (flat.size() != CountParams(tensors)) {
    Fail(ErrorCode::kConfig, "flat parameter length mismatch");
  }
  std::size_t offset = 0;
  for (auto &t : tensors) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), t.size(),
                t.data().begin());
    offset += t.size();
  }
}

void RmspropSettings::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorCode::kConfig, "learning_rate must be finite and >= 0");
  }
  if (!(decay > 0.0 && decay < 1.0)) {
    Fail(ErrorCode::kConfig, "decay must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) Fail(ErrorCode::kConfig, "epsilon must be > 0");
}

void RmspropStep(std::span<Tensor> params, std::span<const Tensor> grads,
                 RmspropState &state) {
  state.settings.Validate();
  if (params.size() != grads.size()) {
    Fail(ErrorCode::kConfig, "parameter/gradient count mismatch");
  }
  if (state.accumulator.empty()) {
    for (const auto &p : params) state.accumulator.emplace_back(p.shape());
  }
  if (state.accumulator.size() != params.size()) {
    Fail(ErrorCode::kConfig, "optimizer state does not match parameters");
  }
  const double rho = state.settings.decay;
  const double lr = state.settings.learning_rate;
  const double eps = state.settings.epsilon;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k].SameShape(grads[k]) ||
        !params[k].SameShape(state.accumulator[k])) {
      Fail(ErrorCode::kConfig, "shape mismatch in optimizer tensor " +
                                   std::to_string(k));
    }
    auto p = params[k].data();
    auto g = grads[k].data();
    auto s = state.accumulator[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      s[i] = rho * s[i] + (1.0 - rho) * g[i] * g[i];
      p[i] -= lr * g[i] / (std::sqrt(s[i]) + eps);
    }
  }
}

}  // namespace latentnav
