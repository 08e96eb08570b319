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

#ifndef LATENTNAV_IMAGE_HPP
#define LATENTNAV_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace latentnav {

/// Pixel grid with values nominally in [0, 1], row-major with interleaved
/// channels: index = (row * width + col) * channels + ch.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), pixels(h * w * c, fill) {}

  std::size_t size() const { return pixels.size(); }
  double &at(std::size_t row, std::size_t col, std::size_t ch) {
    return pixels[(row * width + col) * channels + ch];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch) const {
    return pixels[(row * width + col) * channels + ch];
  }

  friend bool operator==(const Image &, const Image &) = default;
};

/// 8-bit quantization used for every image written to disk:
/// floor(clamp(v, 0, 1) * 255 + 0.5).
std::uint8_t QuantizePixel(double v);

/// Binary PGM (P5) for one channel, PPM (P6) for three; maxval 255.
std::string EncodePnm(const Image &image);
Image DecodePnm(const std::string &bytes, const std::string &origin = "<memory>");
void WritePnm(const std::string &path, const Image &image);
Image ReadPnm(const std::string &path);

/// Lays `tiles` (all the same shape) out in a rows x cols grid, row-major.
Image TileImages(std::span<const Image> tiles, std::size_t rows,
                 std::size_t cols);

double SquaredDistance(std::span<const double> a, std::span<const double> b);
double EuclideanDistance(std::span<const double> a, std::span<const double> b);

}  // namespace latentnav

#endif
