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

#ifndef LATENTNAV_RNG_HPP
#define LATENTNAV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace latentnav {

/// splitmix64 stream. Every random draw in the library comes from one of
/// these so that runs are reproducible bit for bit across platforms with
/// IEEE doubles.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return Mix(state_);
  }

  /// Uniform in [0, 1) with 53 bits.
  double Uniform() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  /// Uniform integer in [0, n). Plain modulo reduction; the bias is below
  /// 2^-40 for every n this library uses.
  std::uint64_t Below(std::uint64_t n) { return Next() % n; }

  /// Standard normal via Box-Muller. Draws come in pairs: the cosine branch
  /// is returned first and the sine branch is cached for the next call.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a tag.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag) {
  return SplitMix64::Mix(seed ^ SplitMix64::Mix(tag + 0x9E3779B97F4A7C15ULL));
}

}  // namespace latentnav

#endif
