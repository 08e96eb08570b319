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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "gradcheck.hpp"
#include "numerics.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace latentnav;
using testutil::CodeOf;

namespace {

std::vector<Tensor> RandomParams(const MlpSpec &spec, SplitMix64 &rng, double scale) {
  auto params = ZeroMlpParams(spec);
  for (auto &t : params) {
    for (auto &v : t.data()) v = rng.Uniform(-scale, scale);
  }
  return params;
}

Tensor RandomInput(std::size_t n, SplitMix64 &rng) {
  std::vector<double> v(n);
  for (auto &x : v) x = rng.Uniform(-1.0, 1.0);
  return Tensor::FromVector(v);
}

std::vector<std::pair<oracle::Vec, oracle::Vec>> Layers(const std::vector<Tensor> &p) {
  std::vector<std::pair<oracle::Vec, oracle::Vec>> out;
  for (std::size_t i = 0; i < p.size(); i += 2) out.push_back({p[i].values(), p[i + 1].values()});
  return out;
}

}  // namespace

TEST_CASE("zero params map any input to zero") {
  SplitMix64 rng(3);
  for (auto act : {Activation::kTanh, Activation::kRelu, Activation::kSigmoid}) {
    MlpSpec spec{{5, 6, 4}, act, Activation::kIdentity};
    const auto out = MlpForward(spec, ZeroMlpParams(spec), RandomInput(5, rng)).output;
    for (double v : out.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("identity layer passes the input through") {
  MlpSpec spec{{3, 3}, Activation::kTanh, Activation::kIdentity};
  auto params = ZeroMlpParams(spec);
  for (std::size_t i = 0; i < 3; ++i) params[0][i * 3 + i] = 1.0;
  const Tensor v = Tensor::FromVector({0.25, -1.5, 7.0});
  CHECK(MlpForward(spec, params, v).output == v);
}

TEST_CASE("random 4-8-3 network matches the straight-line oracle") {
  SplitMix64 rng(11);
  for (auto hidden : {Activation::kTanh, Activation::kRelu, Activation::kSigmoid}) {
    for (auto out : {Activation::kIdentity, Activation::kSigmoid}) {
      MlpSpec spec{{4, 8, 3}, hidden, out};
      const auto params = RandomParams(spec, rng, 1.0);
      const Tensor x = RandomInput(4, rng);
      const auto got = MlpForward(spec, params, x).output;
      const auto want = oracle::Mlp(Layers(params), x.values(), ActivationName(hidden),
                                    ActivationName(out));
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
    }
  }
}

TEST_CASE("forward pass is pure") {
  SplitMix64 rng(5);
  MlpSpec spec{{6, 9, 4}, Activation::kTanh, Activation::kSigmoid};
  const auto params = RandomParams(spec, rng, 1.0);
  const Tensor x = RandomInput(6, rng);
  CHECK(MlpForward(spec, params, x).output == MlpForward(spec, params, x).output);
}

TEST_CASE("input size and parameter shape mismatches are configuration errors") {
  MlpSpec spec{{4, 5, 2}, Activation::kTanh, Activation::kIdentity};
  auto params = ZeroMlpParams(spec);
  CHECK(CodeOf([&] { MlpForward(spec, params, Tensor::FromVector({1, 2, 3})); }) ==
        ErrorCode::kConfig);
  params[2] = Tensor({2, 4});
  try {
    MlpForward(spec, params, Tensor::FromVector({1, 2, 3, 4}));
    FAIL("expected a shape error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(testutil::Contains(e.what(), "layer 1"));
  }
}

TEST_CASE("spec validation") {
  CHECK(CodeOf([] { MlpSpec{{4}}.Validate(); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { MlpSpec{{4, 0, 2}}.Validate(); }) == ErrorCode::kConfig);
  CHECK_NOTHROW(MlpSpec{{1, 1}}.Validate());
}

TEST_CASE("zero output gradient gives exactly zero gradients") {
  SplitMix64 rng(8);
  MlpSpec spec{{5, 7, 2}, Activation::kTanh, Activation::kIdentity};
  const auto params = RandomParams(spec, rng, 1.0);
  const auto fwd = MlpForward(spec, params, RandomInput(5, rng));
  const auto g = MlpBackward(spec, params, fwd.cache, Tensor({2}));
  for (const auto &t : g.params) {
    for (double v : t.values()) CHECK(v == 0.0);
  }
  for (double v : g.input.values()) CHECK(v == 0.0);
}

TEST_CASE("single linear layer backward follows the chain rule") {
  MlpSpec spec{{3, 2}, Activation::kTanh, Activation::kIdentity};
  std::vector<Tensor> params{Tensor({2, 3}, {1, 2, 3, 4, 5, 6}), Tensor({2}, {0.5, -0.5})};
  const Tensor x = Tensor::FromVector({0.1, -0.2, 0.3});
  const Tensor g = Tensor::FromVector({2.0, -1.0});
  const auto fwd = MlpForward(spec, params, x);
  const auto grads = MlpBackward(spec, params, fwd.cache, g);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(grads.params[0][i * 3 + j] == g[i] * x[j]);
    CHECK(grads.params[1][i] == g[i]);
  }
  const double dx[3] = {1 * 2.0 + 4 * -1.0, 2 * 2.0 + 5 * -1.0, 3 * 2.0 + 6 * -1.0};
  for (std::size_t j = 0; j < 3; ++j) CHECK(grads.input[j] == doctest::Approx(dx[j]));
}

TEST_CASE("random 5-7-2 tanh network gradients match central differences") {
  SplitMix64 rng(21);
  MlpSpec spec{{5, 7, 2}, Activation::kTanh, Activation::kIdentity};
  auto params = RandomParams(spec, rng, 0.8);
  const Tensor x = RandomInput(5, rng);
  const oracle::Vec t{0.3, -0.7};
  // loss = sum t * y + y^2 / 2, so dL/dy = t + y.
  auto loss = [&](const std::vector<Tensor> &p, const Tensor &in) {
    const auto y = oracle::Mlp(Layers(p), in.values(), "tanh", "identity");
    return t[0] * y[0] + t[1] * y[1] + 0.5 * (y[0] * y[0] + y[1] * y[1]);
  };
  const auto fwd = MlpForward(spec, params, x);
  Tensor dy({2});
  for (std::size_t i = 0; i < 2; ++i) dy[i] = t[i] + fwd.output[i];
  const auto grads = MlpBackward(spec, params, fwd.cache, dy);

  const auto analytic = Flatten(grads.params);
  const auto numeric = oracle::CentralDiff(
      [&](const oracle::Vec &flat) {
        auto p = params;
        Unflatten(flat, p);
        return loss(p, x);
      },
      Flatten(params), 1e-5);
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, oracle::RelErr(analytic[i], numeric[i]));
  }
  const auto dx_num = oracle::CentralDiff(
      [&](const oracle::Vec &in) { return loss(params, Tensor::FromVector(in)); },
      x.values(), 1e-5);
  for (std::size_t i = 0; i < 5; ++i) {
    worst = std::max(worst, oracle::RelErr(grads.input[i], dx_num[i]));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("stale cache is a contract violation") {
  SplitMix64 rng(4);
  MlpSpec spec{{3, 4, 2}, Activation::kTanh, Activation::kIdentity};
  auto params = RandomParams(spec, rng, 1.0);
  const auto fwd = MlpForward(spec, params, RandomInput(3, rng));
  params[0][0] += 0.5;
  CHECK(CodeOf([&] { MlpBackward(spec, params, fwd.cache, Tensor({2})); }) ==
        ErrorCode::kContract);
  MlpCache empty;
  CHECK(CodeOf([&] { MlpBackward(spec, params, empty, Tensor({2})); }) ==
        ErrorCode::kContract);
}

TEST_CASE("relu derivative at zero is zero") {
  CHECK(ActivationDerivative(Activation::kRelu, 0.0, 0.0) == 0.0);
  CHECK(ActivationDerivative(Activation::kRelu, 1e-300, 1e-300) == 1.0);
  CHECK(ActivationDerivative(Activation::kRelu, -1.0, 0.0) == 0.0);
}

TEST_CASE("finite differences") {
  SUBCASE("constant function has zero gradient") {
    const auto g = FiniteDiffGradient([](std::span<const double>) { return 4.2; },
                                      std::vector<double>{1.0, -3.0, 2.0}, 1e-5);
    for (double v : g) CHECK(v == 0.0);
  }
  SUBCASE("half squared norm is exact") {
    const auto g = FiniteDiffGradient(
        [](std::span<const double> p) { return 0.5 * (p[0] * p[0] + p[1] * p[1]); },
        std::vector<double>{1.0, 2.0}, 1e-5);
    CHECK(std::abs(g[0] - 1.0) < 1e-9);
    CHECK(std::abs(g[1] - 2.0) < 1e-9);
  }
  SUBCASE("non-finite value names the coordinate") {
    try {
      FiniteDiffGradient(
          [](std::span<const double> p) { return p[1] > 0.5 ? std::log(-1.0) : 0.0; },
          std::vector<double>{0.0, 0.5}, 1e-5);
      FAIL("expected an evaluation error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kEvaluation);
      CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
  }
  SUBCASE("step must be positive") {
    CHECK(CodeOf([] {
            FiniteDiffGradient([](std::span<const double>) { return 0.0; },
                               std::vector<double>{0.0}, 0.0);
          }) == ErrorCode::kArgument);
  }
}

TEST_CASE("relative error uses the max(|a|, |b|, 1e-8) denominator") {
  CHECK(RelativeError(1.0, 1.0) == 0.0);
  CHECK(RelativeError(2.0, 1.0) == doctest::Approx(0.5));
  CHECK(RelativeError(0.0, 1e-10) == doctest::Approx(1e-2));
}

TEST_CASE("rmsprop") {
  SUBCASE("zero gradients leave params unchanged") {
    std::vector<Tensor> p{Tensor::FromVector({1.0, -2.0})};
    const auto before = p;
    RmspropState state;
    RmspropStep(p, std::vector<Tensor>{Tensor({2})}, state);
    CHECK(p == before);
  }
  SUBCASE("zero learning rate still updates the accumulator") {
    std::vector<Tensor> p{Tensor::FromVector({1.0})};
    RmspropState state;
    state.settings.learning_rate = 0.0;
    RmspropStep(p, std::vector<Tensor>{Tensor::FromVector({3.0})}, state);
    CHECK(p[0][0] == 1.0);
    CHECK(state.accumulator[0][0] == doctest::Approx(0.9));
  }
  SUBCASE("hand-evaluated first step") {
    std::vector<Tensor> p{Tensor::FromVector({0.0})};
    RmspropState state;
    state.settings = {0.01, 0.9, 1e-8};
    RmspropStep(p, std::vector<Tensor>{Tensor::FromVector({2.0})}, state);
    CHECK(state.accumulator[0][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p[0][0] == doctest::Approx(-0.01 * 2.0 / (std::sqrt(0.4) + 1e-8)).epsilon(1e-15));
    CHECK(std::abs(p[0][0] - (-0.0316227756)) < 1e-9);
  }
  SUBCASE("accumulator stays nonnegative") {
    SplitMix64 rng(9);
    std::vector<Tensor> p{Tensor({3, 4})};
    RmspropState state;
    for (int step = 0; step < 200; ++step) {
      Tensor g({3, 4});
      for (auto &v : g.data()) v = rng.Normal() * std::exp(rng.Uniform(-20, 5));
      RmspropStep(p, std::vector<Tensor>{g}, state);
      for (double s : state.accumulator[0].values()) REQUIRE(s >= 0.0);
    }
  }
  SUBCASE("settings validation") {
    CHECK(CodeOf([] { RmspropSettings{-1.0, 0.9, 1e-8}.Validate(); }) == ErrorCode::kConfig);
    CHECK(CodeOf([] { RmspropSettings{1e-3, 1.0, 1e-8}.Validate(); }) == ErrorCode::kConfig);
    CHECK(CodeOf([] { RmspropSettings{1e-3, 0.9, 0.0}.Validate(); }) == ErrorCode::kConfig);
  }
}

TEST_CASE("random networks pass the gradient check") {
  // Sizes up to 10 per layer and every hidden/output activation pairing.
  const auto suites = RunGradcheck({});
  REQUIRE(suites.size() == 2);
  for (const auto &s : suites) {
    CHECK_MESSAGE(s.passed, s.name << " worst " << s.worst_relative_error);
    CHECK(s.trials >= 20);
    CHECK(s.worst_relative_error < 1e-5);
  }
}

TEST_CASE("a corrupted analytic gradient fails the gradient check") {
  GradcheckConfig cfg;
  cfg.corrupt = true;
  for (const auto &s : RunGradcheck(cfg)) CHECK_FALSE(s.passed);
}

TEST_CASE("flatten and unflatten round trip") {
  SplitMix64 rng(2);
  MlpSpec spec{{2, 3, 1}, Activation::kTanh, Activation::kIdentity};
  const auto params = RandomParams(spec, rng, 1.0);
  auto copy = ZeroMlpParams(spec);
  Unflatten(Flatten(params), copy);
  CHECK(copy == params);
}
