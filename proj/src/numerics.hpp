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

#ifndef LATENTNAV_NUMERICS_HPP
#define LATENTNAV_NUMERICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rng.hpp"

namespace latentnav {

/// Dense row-major double tensor.
class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor FromVector(std::vector<double> values);

  const std::vector<std::size_t> &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double> &values() const { return data_; }

  double &operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  void SetZero();
  bool SameShape(const Tensor &other) const { return shape_ == other.shape_; }

  /// Bitwise-exact element comparison (NaN never appears, so == suffices).
  friend bool operator==(const Tensor &a, const Tensor &b) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

bool AllFinite(std::span<const double> values);

enum class Activation { kIdentity, kTanh, kRelu, kSigmoid };

const char *ActivationName(Activation a);
Activation ParseActivation(const std::string &name);

double Activate(Activation a, double x);
/// Derivative expressed through the pre-activation x and the activation
/// value y = Activate(a, x). ReLU'(0) is 0.
double ActivationDerivative(Activation a, double x, double y);

/// A fully connected network: layer_sizes[0] inputs, layer_sizes.back()
/// outputs. Hidden layers use hidden_activation, the last layer
/// output_activation. Heads are normally identity or sigmoid; a tanh output
/// is allowed so an encoder trunk can be expressed as its own network.
struct MlpSpec {
  std::vector<std::size_t> layer_sizes;
  Activation hidden_activation = Activation::kTanh;
  Activation output_activation = Activation::kIdentity;

  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  Activation activation_for(std::size_t layer) const {
    return layer + 1 == num_layers() ? output_activation : hidden_activation;
  }

  /// Throws a configuration error if the spec is malformed.
  void Validate() const;
};

/// Parameter layout is [W_0, b_0, W_1, b_1, ...] with W_l of shape
/// {out, in} (row-major) and b_l of shape {out}.
std::vector<Tensor> ZeroMlpParams(const MlpSpec &spec);

/// Glorot-uniform weights, zero biases.
std::vector<Tensor> InitMlpParams(const MlpSpec &spec, SplitMix64 &rng);

std::size_t CountParams(std::span<const Tensor> params);

/// Cheap content hash used to detect a cache that does not belong to the
/// parameters handed to the backward pass.
std::uint64_t Fingerprint(std::span<const Tensor> params);

struct MlpCache {
  /// activations[0] is the input, activations[l + 1] the output of layer l.
  std::vector<std::vector<double>> activations;
  /// pre_activations[l] is W_l a_l + b_l.
  std::vector<std::vector<double>> pre_activations;
  std::uint64_t params_fingerprint = 0;

  std::span<const double> output() const { return activations.back(); }
};

struct MlpForwardResult {
  Tensor output;
  MlpCache cache;
};

MlpForwardResult MlpForward(const MlpSpec &spec, std::span<const Tensor> params,
                            const Tensor &input);

/// Forward pass that reuses `cache` storage; the output is cache.output().
void MlpForwardInto(const MlpSpec &spec, std::span<const Tensor> params,
                    std::span<const double> input, MlpCache &cache);

struct MlpGradients {
  std::vector<Tensor> params;
  Tensor input;
};

MlpGradients MlpBackward(const MlpSpec &spec, std::span<const Tensor> params,
                         const MlpCache &cache, const Tensor &output_gradient);

/// Reverse pass adding dL/dparams into `param_grads` (skipped when empty)
/// and writing dL/dinput into `input_grad` (skipped when empty).
void MlpBackwardAccumulate(const MlpSpec &spec, std::span<const Tensor> params,
                           const MlpCache &cache,
                           std::span<const double> output_gradient,
                           std::span<Tensor> param_grads,
                           std::span<double> input_grad);

/// Variants that skip the parameter fingerprint. Only valid when the
/// backward pass directly follows the forward pass on unchanged parameters.
void MlpForwardTrusted(const MlpSpec &spec, std::span<const Tensor> params,
                       std::span<const double> input, MlpCache &cache);
void MlpBackwardTrusted(const MlpSpec &spec, std::span<const Tensor> params,
                        const MlpCache &cache, std::span<const double> output_gradient,
                        std::span<Tensor> param_grads, std::span<double> input_grad);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h per coordinate.
std::vector<double> FiniteDiffGradient(const ScalarFunction &f,
                                       std::span<const double> params,
                                       double h);

/// max(|a|, |b|, 1e-8) relative error, the gradient-check convention.
double RelativeError(double analytic, double numeric);

std::vector<double> Flatten(std::span<const Tensor> tensors);
void Unflatten(std::span<const double> flat, std::span<Tensor> tensors);

struct RmspropSettings {
  double learning_rate = 1e-3;
  double decay = 0.9;
  double epsilon = 1e-8;

  void Validate() const;
};

struct RmspropState {
  RmspropSettings settings;
  /// Running mean of squared gradients. Shaped like the parameters on the
  /// first step.
  std::vector<Tensor> accumulator;
};

/// s <- rho s + (1 - rho) g^2;  p <- p - lr g / (sqrt(s) + eps).
void RmspropStep(std::span<Tensor> params, std::span<const Tensor> grads,
                 RmspropState &state);

}  // namespace latentnav

#endif
