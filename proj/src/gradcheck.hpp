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

#ifndef LATENTNAV_GRADCHECK_HPP
#define LATENTNAV_GRADCHECK_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace latentnav {

struct GradcheckConfig {
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double tolerance = 1e-5;
  /// Test hook: perturbs one analytic gradient entry per suite so the check
  /// must fail.
  bool corrupt = false;

  void Validate() const;
};

struct GradcheckSuite {
  std::string name;
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  double worst_relative_error = 0.0;
  /// Trial and coordinate of the worst entry.
  std::size_t worst_trial = 0;
  std::size_t worst_coordinate = 0;
  bool passed = false;
};

/// "numerics": random fully connected networks under a random quadratic
/// loss, parameter and input gradients. "vae": negative ELBO of random small
/// models with frozen noise, both likelihoods.
std::vector<GradcheckSuite> RunGradcheck(const GradcheckConfig &cfg);

}  // namespace latentnav

#endif
