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

// Synthetic tour world: a closed walk around a ring of K rooms, one frame
// per equally spaced position p in [0, 1), with ground-truth positions.
//
// Rendering, with x = p * K, room r = floor(x), local offset t = x - r:
//
//   room(r, t)[row, col, c] = base[c] + tint_r[c]
//       + A * sin(2 pi (f * col / W + phase + chphase[c] + t * drift))
//       + shade * ((row + 0.5) / H - 0.5)
//
// (base, chphase, A, f, phase, drift, shade) form the room's texture and
// are drawn from splitmix64(DeriveSeed(seed, 100 + s)) where s is the
// smallest room index in r's alias group, in this order:
//   base[c]    = 0.2 + 0.6 u        for each channel c
//   chphase[c] = 0.25 u             for each channel c
//   A          = 0.8 + 0.7 u
//   f          = 1 + (next % 3)
//   phase      = u
//   drift      = 0.3 + 0.4 u
//   shade      = -0.6 + 1.2 u
// tint_r[c] = 0.03 (2u - 1) is drawn per room from
// splitmix64(DeriveSeed(seed, 10000 + r)) and is never shared, so aliased
// rooms are near-duplicates rather than exact copies.
//
// Within transition_width w of a room boundary the frame cross-fades with
// the adjacent room evaluated at the continued offset (t + 1 or t - 1); the
// neighbor weight is 0.5 (1 - d / w) at boundary distance d. The blended
// value is clamped to [0, 1].

#ifndef LATENTNAV_WORLDGEN_HPP
#define LATENTNAV_WORLDGEN_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "image.hpp"

namespace latentnav {

struct WorldConfig {
  std::size_t num_rooms = 4;
  std::size_t frames = 1000;
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t channels = 3;
  double transition_width = 0.02;
  std::vector<std::pair<std::size_t, std::size_t>> alias_pairs;
  std::uint64_t seed = 1;

  void Validate() const;
  friend bool operator==(const WorldConfig &, const WorldConfig &) = default;
};

enum class Provenance { kGenerated, kIngested };

const char *ProvenanceName(Provenance p);

struct TourFrame {
  std::size_t index = 0;
  double position = 0.0;
  Image image;

  friend bool operator==(const TourFrame &, const TourFrame &) = default;
};

struct TourDataset {
  /// For ingested data only frames and the image dims are meaningful.
  WorldConfig config;
  Provenance provenance = Provenance::kGenerated;
  std::vector<TourFrame> frames;

  std::size_t size() const { return frames.size(); }
  std::size_t pixel_count() const {
    return config.height * config.width * config.channels;
  }
  bool has_ground_truth() const { return provenance == Provenance::kGenerated; }
  std::vector<std::span<const double>> FrameSpans() const;

  friend bool operator==(const TourDataset &, const TourDataset &) = default;
};

/// Index of the smallest room aliased with `room` (itself if none).
std::size_t AliasSource(const WorldConfig &cfg, std::size_t room);

Image RenderFrame(const WorldConfig &cfg, double position);

/// Frames at positions i / N.
TourDataset GenerateTour(const WorldConfig &cfg);

/// Half-pixel-center bilinear resampling, channels independent, output
/// clamped to [0, 1].
Image ResizeBilinear(const Image &image, std::size_t height, std::size_t width);

/// Reads every *.ppm / *.pgm in `directory` in lexicographic filename order
/// and resizes to height x width. Positions are ordinal (i / N).
TourDataset IngestFrames(const std::string &directory, std::size_t height,
                         std::size_t width);

/// Manifest (JSON) at `manifest_path` plus raw f64 little-endian pixels in a
/// sibling file with the extension replaced by ".raw".
void SaveDataset(const TourDataset &ds, const std::string &manifest_path);
TourDataset LoadDataset(const std::string &manifest_path);

/// Manifest text and raw bytes, for callers batching several outputs.
std::pair<std::string, std::string> EncodeDataset(const TourDataset &ds,
                                                  const std::string &raw_name);
std::string RawPathFor(const std::string &manifest_path);

/// FNV-1a 64 of the raw pixel bytes.
std::uint64_t DatasetChecksum(const TourDataset &ds);

/// min(|a - b|, 1 - |a - b|).
double RingDistance(double a, double b);

}  // namespace latentnav

#endif
