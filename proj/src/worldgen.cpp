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

#include "worldgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "error.hpp"
#include "io_util.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace latentnav {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RoomTexture {
  std::vector<double> base;
  std::vector<double> channel_phase;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double drift = 0.0;
  double shade = 0.0;
  std::vector<double> tint;
};

RoomTexture MakeTexture(const WorldConfig &cfg, std::size_t room) {
  RoomTexture tex;
  SplitMix64 rng(DeriveSeed(cfg.seed, 100 + AliasSource(cfg, room)));
  for (std::size_t c = 0; c < cfg.channels; ++c) tex.base.push_back(0.2 + 0.6 * rng.Uniform());
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    tex.channel_phase.push_back(0.25 * rng.Uniform());
  }
  tex.amplitude = 0.8 + 0.7 * rng.Uniform();
  tex.frequency = 1.0 + static_cast<double>(rng.Next() % 3);
  tex.phase = rng.Uniform();
  tex.drift = 0.3 + 0.4 * rng.Uniform();
  tex.shade = -0.6 + 1.2 * rng.Uniform();
  SplitMix64 own(DeriveSeed(cfg.seed, 10000 + room));
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    tex.tint.push_back(0.03 * (2.0 * own.Uniform() - 1.0));
  }
  return tex;
}

double TexturePixel(const RoomTexture &tex, const WorldConfig &cfg, double t,
                    std::size_t row, std::size_t col, std::size_t ch) {
  const double h = static_cast<double>(cfg.height);
  const double w = static_cast<double>(cfg.width);
  const double wave = std::sin(
      2.0 * std::numbers::pi *
      (tex.frequency * static_cast<double>(col) / w + tex.phase +
       tex.channel_phase[ch] + t * tex.drift));
  return tex.base[ch] + tex.tint[ch] + tex.amplitude * wave +
         tex.shade * ((static_cast<double>(row) + 0.5) / h - 0.5);
}

bool HasExtension(const fs::path &p, std::initializer_list<const char *> exts) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const char *e : exts) {
    if (ext == e) return true;
  }
  return false;
}

}  // namespace

void WorldConfig::Validate() const {
  if (num_rooms == 0) Fail(ErrorCode::kConfig, "num_rooms must be >= 1");
  if (frames < 2) Fail(ErrorCode::kConfig, "frames must be >= 2");
  if (height == 0 || width == 0 || channels == 0) {
    Fail(ErrorCode::kConfig, "height, width and channels must be >= 1");
  }
  const double limit = 0.5 / static_cast<double>(num_rooms);
  if (!(transition_width >= 0.0 && transition_width < limit)) {
    Fail(ErrorCode::kConfig, "transition_width must lie in [0, 0.5 / num_rooms)");
  }
  for (const auto &[a, b] : alias_pairs) {
    if (a >= num_rooms || b >= num_rooms || a == b) {
      Fail(ErrorCode::kConfig, "alias_pairs entries must be distinct room indices");
    }
  }
}

const char *ProvenanceName(Provenance p) {
  return p == Provenance::kGenerated ? "generated" : "ingested";
}

std::vector<std::span<const double>> TourDataset::FrameSpans() const {
  std::vector<std::span<const double>> spans;
  spans.reserve(frames.size());
  for (const auto &f : frames) spans.emplace_back(f.image.pixels);
  return spans;
}

std::size_t AliasSource(const WorldConfig &cfg, std::size_t room) {
  // Smallest index in the connected component of the alias graph.
  std::vector<std::size_t> parent(cfg.num_rooms);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto &[a, b] : cfg.alias_pairs) {
    const auto ra = find(a);
    const auto rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  return find(room);
}

Image RenderFrame(const WorldConfig &cfg, double position) {
  cfg.Validate();
  if (!std::isfinite(position) || position < 0.0 || position >= 1.0) {
    Fail(ErrorCode::kArgument, "position must lie in [0, 1)");
  }
  const std::size_t k = cfg.num_rooms;
  const double kd = static_cast<double>(k);
  const double x = position * kd;
  const std::size_t room = std::min(k - 1, static_cast<std::size_t>(x));
  const double t = x - static_cast<double>(room);
  const double w = cfg.transition_width;

  std::size_t neighbor = room;
  double neighbor_t = t;
  double neighbor_weight = 0.0;
  if (w > 0.0) {
    const double lower = t / kd;
    const double upper = (1.0 - t) / kd;
    if (lower < w) {
      neighbor = (room + k - 1) % k;
      neighbor_t = t + 1.0;
      neighbor_weight = 0.5 * (1.0 - lower / w);
    } else if (upper < w) {
      neighbor = (room + 1) % k;
      neighbor_t = t - 1.0;
      neighbor_weight = 0.5 * (1.0 - upper / w);
    }
  }

  const RoomTexture own = MakeTexture(cfg, room);
  const RoomTexture other =
      neighbor_weight > 0.0 ? MakeTexture(cfg, neighbor) : RoomTexture{};
  Image image(cfg.height, cfg.width, cfg.channels);
  for (std::size_t r = 0; r < cfg.height; ++r) {
    for (std::size_t c = 0; c < cfg.width; ++c) {
      for (std::size_t ch = 0; ch < cfg.channels; ++ch) {
        double v = TexturePixel(own, cfg, t, r, c, ch);
        if (neighbor_weight > 0.0) {
          v = (1.0 - neighbor_weight) * v +
              neighbor_weight * TexturePixel(other, cfg, neighbor_t, r, c, ch);
        }
        image.at(r, c, ch) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return image;
}

TourDataset GenerateTour(const WorldConfig &cfg) {
  cfg.Validate();
  TourDataset ds;
  ds.config = cfg;
  ds.provenance = Provenance::kGenerated;
  ds.frames.reserve(cfg.frames);
  for (std::size_t i = 0; i < cfg.frames; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(cfg.frames);
    ds.frames.push_back({i, p, RenderFrame(cfg, p)});
  }
  return ds;
}

Image ResizeBilinear(const Image &image, std::size_t height, std::size_t width) {
  if (image.height == 0 || image.width == 0 || image.channels == 0 ||
      height == 0 || width == 0) {
    Fail(ErrorCode::kArgument, "resize dimensions must be >= 1");
  }
  Image out(height, width, image.channels);
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  auto coord = [](std::size_t dst, double scale, std::size_t src_extent,
                  std::size_t &i0, std::size_t &i1, double &frac) {
    double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_extent - 1));
    i0 = static_cast<std::size_t>(std::floor(s));
    i1 = std::min(i0 + 1, src_extent - 1);
    frac = s - static_cast<double>(i0);
  };
  for (std::size_t r = 0; r < height; ++r) {
    std::size_t y0, y1;
    double fy;
    coord(r, sy, image.height, y0, y1, fy);
    for (std::size_t c = 0; c < width; ++c) {
      std::size_t x0, x1;
      double fx;
      coord(c, sx, image.width, x0, x1, fx);
      for (std::size_t ch = 0; ch < image.channels; ++ch) {
        const double top = (1.0 - fx) * image.at(y0, x0, ch) + fx * image.at(y0, x1, ch);
        const double bottom =
            (1.0 - fx) * image.at(y1, x0, ch) + fx * image.at(y1, x1, ch);
        out.at(r, c, ch) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
      }
    }
  }
  return out;
}

TourDataset IngestFrames(const std::string &directory, std::size_t height,
                         std::size_t width) {
  if (height == 0 || width == 0) {
    Fail(ErrorCode::kConfig, "target height and width must be >= 1");
  }
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    Fail(ErrorCode::kIo, "'" + directory + "' is not a readable directory");
  }
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && HasExtension(entry.path(), {".ppm", ".pgm"})) {
      files.push_back(entry.path());
    }
  }
  if (ec) Fail(ErrorCode::kIo, "cannot list '" + directory + "'");
  std::sort(files.begin(), files.end(), [](const fs::path &a, const fs::path &b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.size() < 2) {
    Fail(ErrorCode::kIo, "'" + directory + "' holds fewer than 2 PPM/PGM frames");
  }
  TourDataset ds;
  ds.provenance = Provenance::kIngested;
  std::size_t channels = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Image src = ReadPnm(files[i].string());
    if (i == 0) {
      channels = src.channels;
    } else if (src.channels != channels) {
      Fail(ErrorCode::kFormat, "inconsistent source formats: " +
                                   files[i].filename().string() +
                                   " differs from " + files[0].filename().string());
    }
    const double p = static_cast<double>(i) / static_cast<double>(files.size());
    ds.frames.push_back({i, p, ResizeBilinear(src, height, width)});
  }
  ds.config.num_rooms = 1;
  ds.config.frames = files.size();
  ds.config.height = height;
  ds.config.width = width;
  ds.config.channels = channels;
  ds.config.transition_width = 0.0;
  ds.config.seed = 0;
  return ds;
}

std::string RawPathFor(const std::string &manifest_path) {
  return fs::path(manifest_path).replace_extension(".raw").string();
}

std::pair<std::string, std::string> EncodeDataset(const TourDataset &ds,
                                                  const std::string &raw_name) {
  json manifest;
  manifest["format"] = "latentnav-dataset";
  manifest["version"] = 1;
  manifest["height"] = ds.config.height;
  manifest["width"] = ds.config.width;
  manifest["channels"] = ds.config.channels;
  manifest["frames"] = ds.frames.size();
  manifest["seed"] = ds.config.seed;
  manifest["provenance"] = ProvenanceName(ds.provenance);
  manifest["num_rooms"] = ds.config.num_rooms;
  manifest["transition_width"] = ds.config.transition_width;
  json pairs = json::array();
  for (const auto &[a, b] : ds.config.alias_pairs) pairs.push_back({a, b});
  manifest["alias_pairs"] = pairs;
  manifest["raw_file"] = raw_name;
  json positions = json::array();
  for (const auto &f : ds.frames) positions.push_back(f.position);
  manifest["positions"] = positions;

  std::string raw;
  raw.reserve(ds.frames.size() * ds.pixel_count() * 8);
  for (const auto &f : ds.frames) {
    for (double v : f.image.pixels) AppendF64(raw, v);
  }
  return {manifest.dump(2) + "\n", std::move(raw)};
}

void SaveDataset(const TourDataset &ds, const std::string &manifest_path) {
  const std::string raw_path = RawPathFor(manifest_path);
  auto [manifest, raw] =
      EncodeDataset(ds, fs::path(raw_path).filename().string());
  OutputBatch batch;
  batch.Add(raw_path, std::move(raw));
  batch.Add(manifest_path, std::move(manifest));
  batch.Commit();
}

TourDataset LoadDataset(const std::string &manifest_path) {
  json m;
  try {
    m = json::parse(ReadFileBytes(manifest_path));
  } catch (const json::exception &e) {
    Fail(ErrorCode::kFormat, "manifest '" + manifest_path + "' is not JSON: " + e.what());
  }
  TourDataset ds;
  std::string raw_name;
  try {
    if (m.at("format").get<std::string>() != "latentnav-dataset") {
      Fail(ErrorCode::kFormat, "not a latentnav dataset manifest");
    }
    if (m.at("version").get<int>() != 1) {
      Fail(ErrorCode::kBadVersion, "unsupported dataset manifest version");
    }
    ds.config.height = m.at("height").get<std::size_t>();
    ds.config.width = m.at("width").get<std::size_t>();
    ds.config.channels = m.at("channels").get<std::size_t>();
    ds.config.frames = m.at("frames").get<std::size_t>();
    ds.config.seed = m.at("seed").get<std::uint64_t>();
    ds.config.num_rooms = m.at("num_rooms").get<std::size_t>();
    ds.config.transition_width = m.at("transition_width").get<double>();
    for (const auto &pair : m.at("alias_pairs")) {
      ds.config.alias_pairs.emplace_back(pair.at(0).get<std::size_t>(),
                                         pair.at(1).get<std::size_t>());
    }
    const auto prov = m.at("provenance").get<std::string>();
    if (prov == "generated") {
      ds.provenance = Provenance::kGenerated;
    } else if (prov == "ingested") {
      ds.provenance = Provenance::kIngested;
    } else {
      Fail(ErrorCode::kFormat, "unknown provenance '" + prov + "'");
    }
    raw_name = m.at("raw_file").get<std::string>();
    const auto &positions = m.at("positions");
    if (positions.size() != ds.config.frames) {
      Fail(ErrorCode::kFormat, "manifest lists " + std::to_string(positions.size()) +
                                   " positions for " +
                                   std::to_string(ds.config.frames) + " frames");
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
      ds.frames.push_back({i, positions[i].get<double>(), Image{}});
    }
  } catch (const json::exception &e) {
    Fail(ErrorCode::kFormat, "manifest '" + manifest_path + "' is malformed: " + e.what());
  }
  const std::size_t per_frame = ds.pixel_count();
  if (per_frame == 0) Fail(ErrorCode::kFormat, "manifest has empty image dims");
  const auto raw_path = (fs::path(manifest_path).parent_path() / raw_name).string();
  const std::string raw = ReadFileBytes(raw_path);
  const std::size_t expected = ds.frames.size() * per_frame * 8;
  if (raw.size() != expected) {
    Fail(ErrorCode::kFormat, "raw file holds " + std::to_string(raw.size()) +
                                 " bytes but the manifest's " +
                                 std::to_string(ds.frames.size()) +
                                 " frames need " + std::to_string(expected));
  }
  std::size_t pos = 0;
  for (auto &f : ds.frames) {
    f.image = Image(ds.config.height, ds.config.width, ds.config.channels);
    for (double &v : f.image.pixels) {
      v = ReadF64(raw, pos);
      pos += 8;
    }
  }
  return ds;
}

std::uint64_t DatasetChecksum(const TourDataset &ds) {
  return Fnv1a64(EncodeDataset(ds, "").second);
}

double RingDistance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace latentnav
