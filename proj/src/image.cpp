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

#include "image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "error.hpp"
#include "io_util.hpp"

namespace latentnav {

std::uint8_t QuantizePixel(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::string EncodePnm(const Image &image) {
  if (image.channels != 1 && image.channels != 3) {
    Fail(ErrorCode::kArgument, "PNM output needs 1 or 3 channels, got " +
                                   std::to_string(image.channels));
  }
  if (image.pixels.size() != image.height * image.width * image.channels) {
    Fail(ErrorCode::kArgument, "image buffer does not match its dimensions");
  }
  std::string out = (image.channels == 1 ? "P5\n" : "P6\n") +
                    std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size());
  for (double v : image.pixels) out.push_back(static_cast<char>(QuantizePixel(v)));
  return out;
}

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::string &bytes, const std::string &origin)
      : bytes_(bytes), origin_(origin) {}

  std::size_t NextNumber() {
    SkipSpaceAndComments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) {
      Fail(ErrorCode::kFormat, "malformed PNM header in " + origin_);
    }
    return std::stoul(bytes_.substr(start, pos_ - start));
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t RasterStart() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      Fail(ErrorCode::kFormat, "malformed PNM header in " + origin_);
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string &bytes_;
  const std::string &origin_;
  std::size_t pos_ = 2;
};

}  // namespace

Image DecodePnm(const std::string &bytes, const std::string &origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    Fail(ErrorCode::kFormat, origin + " is not a binary PGM/PPM (P5/P6)");
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes, origin);
  const std::size_t width = reader.NextNumber();
  const std::size_t height = reader.NextNumber();
  const std::size_t maxval = reader.NextNumber();
  if (width == 0 || height == 0) {
    Fail(ErrorCode::kFormat, origin + " has zero width or height");
  }
  if (maxval != 255) {
    Fail(ErrorCode::kFormat, origin + " is not 8-bit (maxval " +
                                 std::to_string(maxval) + ")");
  }
  const std::size_t start = reader.RasterStart();
  const std::size_t expected = width * height * channels;
  if (bytes.size() - start < expected) {
    Fail(ErrorCode::kTruncated, origin + " raster truncated: expected " +
                                    std::to_string(expected) + " bytes, got " +
                                    std::to_string(bytes.size() - start));
  }
  Image image(height, width, channels);
  for (std::size_t i = 0; i < expected; ++i) {
    image.pixels[i] = static_cast<unsigned char>(bytes[start + i]) / 255.0;
  }
  return image;
}

void WritePnm(const std::string &path, const Image &image) {
  WriteFileAtomic(path, EncodePnm(image));
}

Image ReadPnm(const std::string &path) {
  return DecodePnm(ReadFileBytes(path), path);
}

Image TileImages(std::span<const Image> tiles, std::size_t rows,
                 std::size_t cols) {
  if (tiles.size() != rows * cols || tiles.empty()) {
    Fail(ErrorCode::kArgument, "tile count does not match grid");
  }
  const std::size_t h = tiles[0].height;
  const std::size_t w = tiles[0].width;
  const std::size_t c = tiles[0].channels;
  Image out(rows * h, cols * w, c);
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const Image &tile = tiles[t];
    if (tile.height != h || tile.width != w || tile.channels != c) {
      Fail(ErrorCode::kArgument, "tiles differ in shape");
    }
    const std::size_t r0 = (t / cols) * h;
    const std::size_t c0 = (t % cols) * w;
    for (std::size_t r = 0; r < h; ++r) {
      std::copy_n(tile.pixels.begin() + static_cast<std::ptrdiff_t>(r * w * c),
                  w * c,
                  out.pixels.begin() +
                      static_cast<std::ptrdiff_t>(((r0 + r) * out.width + c0) * c));
    }
  }
  return out;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double EuclideanDistance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(SquaredDistance(a, b));
}

}  // namespace latentnav
