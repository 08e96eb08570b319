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

#include "planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "error.hpp"
#include "image.hpp"
#include "io_util.hpp"

namespace latentnav {

void IdentityDecoder::Decode(std::span<const double> z,
                             std::vector<double> &out) const {
  out.assign(z.begin(), z.end());
}

void IdentityDecoder::Pullback(std::span<const double>, std::span<const double> v,
                               std::vector<double> &grad) const {
  grad.assign(v.begin(), v.end());
}

VaeDecoder::VaeDecoder(const ModelParams &params)
    : params_(params), spec_(params.config().DecoderSpec()) {}

void VaeDecoder::Decode(std::span<const double> z, std::vector<double> &out) const {
  MlpCache cache;
  MlpForwardTrusted(spec_, params_.decoder(), z, cache);
  out = std::move(cache.activations.back());
}

void VaeDecoder::Pullback(std::span<const double> z, std::span<const double> v,
                          std::vector<double> &grad) const {
  MlpCache cache;
  MlpForwardTrusted(spec_, params_.decoder(), z, cache);
  grad.assign(z.size(), 0.0);
  MlpBackwardTrusted(spec_, params_.decoder(), cache, v, {}, grad);
}

void PlannerConfig::Validate() const {
  if (points < 2) Fail(ErrorCode::kConfig, "points must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    Fail(ErrorCode::kConfig, "alpha must be > 0");
  }
  if (!(tol >= 0.0)) Fail(ErrorCode::kConfig, "tol must be >= 0");
  if (!(norm_eps > 0.0)) Fail(ErrorCode::kConfig, "norm_eps must be > 0");
}

namespace {

double SegmentCost(std::span<const double> a, std::span<const double> b,
                   bool squared) {
  const double sq = SquaredDistance(a, b);
  return squared ? sq : std::sqrt(sq);
}

double DecodedLength(const std::vector<std::vector<double>> &decoded, bool squared) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < decoded.size(); ++i) {
    total += SegmentCost(decoded[i], decoded[i + 1], squared);
  }
  return total;
}

// Gradient of the two-segment objective given g at the neighbors and at z.
void LocalGradientFromImages(std::span<const double> g_prev,
                             std::span<const double> g_z,
                             std::span<const double> g_next,
                             std::span<const double> z,
                             const LatentDecoder &decoder, double norm_eps,
                             bool squared, std::vector<double> &v,
                             std::vector<double> &grad) {
  v.assign(g_z.size(), 0.0);
  for (const auto neighbor : {g_prev, g_next}) {
    double scale = 2.0;
    if (!squared) {
      const double norm = EuclideanDistance(g_z, neighbor);
      if (norm < norm_eps) continue;
      scale = 1.0 / norm;
    }
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += scale * (g_z[k] - neighbor[k]);
  }
  decoder.Pullback(z, v, grad);
}

void CheckDims(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    Fail(ErrorCode::kConfig, "latent points must share a non-zero dimension");
  }
}

}  // namespace

LatentPath InitStraightPath(std::span<const double> z_start,
                            std::span<const double> z_end, std::size_t n) {
  CheckDims(z_start, z_end);
  if (n < 2) Fail(ErrorCode::kConfig, "a path needs at least 2 points");
  LatentPath path;
  path.points.resize(n);
  path.points.front().assign(z_start.begin(), z_start.end());
  path.points.back().assign(z_end.begin(), z_end.end());
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double t = static_cast<double>(i) / denom;
    auto &p = path.points[i];
    p.resize(z_start.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = z_start[j] + t * (z_end[j] - z_start[j]);
    }
  }
  return path;
}

double PathLength(const LatentPath &path, const LatentDecoder &decoder,
                  bool squared) {
  std::vector<std::vector<double>> decoded;
  decoded.reserve(path.points.size());
  for (const auto &p : path.points) decoded.push_back(decoder.Decode(p));
  return DecodedLength(decoded, squared);
}

std::vector<double> LocalGradient(std::span<const double> z_prev,
                                  std::span<const double> z,
                                  std::span<const double> z_next,
                                  const LatentDecoder &decoder, double norm_eps,
                                  bool squared) {
  CheckDims(z_prev, z);
  CheckDims(z, z_next);
  const auto g_prev = decoder.Decode(z_prev);
  const auto g_z = decoder.Decode(z);
  const auto g_next = decoder.Decode(z_next);
  std::vector<double> v, grad;
  LocalGradientFromImages(g_prev, g_z, g_next, z, decoder, norm_eps, squared, v,
                          grad);
  return grad;
}

LatentPath PlanGeodesic(std::span<const double> z_start,
                        std::span<const double> z_end,
                        const LatentDecoder &decoder, const PlannerConfig &cfg) {
  cfg.Validate();
  if (z_start.size() != decoder.latent_dim()) {
    Fail(ErrorCode::kConfig, "endpoint dimension does not match the decoder");
  }
  LatentPath path = InitStraightPath(z_start, z_end, cfg.points);
  const std::size_t n = path.points.size();
  std::vector<std::vector<double>> decoded(n);
  for (std::size_t i = 0; i < n; ++i) decoder.Decode(path.points[i], decoded[i]);
  path.initial_length = DecodedLength(decoded, cfg.squared_norm);

  double previous = path.initial_length;
  std::vector<double> v, grad;
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      auto &z = path.points[i];
      LocalGradientFromImages(decoded[i - 1], decoded[i], decoded[i + 1], z,
                              decoder, cfg.norm_eps, cfg.squared_norm, v, grad);
      for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] -= cfg.alpha * grad[j];
        if (!std::isfinite(z[j])) {
          Fail(ErrorCode::kPlanning, "non-finite point at sweep " +
                                         std::to_string(sweep) + ", index " +
                                         std::to_string(i));
        }
      }
      decoder.Decode(z, decoded[i]);
    }
    const double length = DecodedLength(decoded, cfg.squared_norm);
    path.length_history.push_back(length);
    if (length > previous + kMonotoneSlack) path.alpha_too_large = true;
    if (previous - length < cfg.tol) {
      path.converged = !path.alpha_too_large;
      break;
    }
    previous = length;
  }
  return path;
}

std::string EncodePathFile(const LatentPath &path) {
  std::string out = "# latentpath v1 N=" + std::to_string(path.size()) +
                    " J=" + std::to_string(path.dim()) + "\n";
  char buf[40];
  for (const auto &p : path.points) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
      if (j) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

LatentPath DecodePathFile(const std::string &text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  std::size_t n = 0, j = 0;
  if (std::sscanf(header.c_str(), "# latentpath v1 N=%zu J=%zu", &n, &j) != 2 ||
      n == 0 || j == 0) {
    Fail(ErrorCode::kFormat, "missing or malformed latentpath v1 header");
  }
  LatentPath path;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> p;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception &) {
        Fail(ErrorCode::kFormat, "bad number '" + tok + "' in path file");
      }
    }
    if (p.size() != j) {
      Fail(ErrorCode::kFormat, "path point " + std::to_string(path.points.size()) +
                                   " has " + std::to_string(p.size()) +
                                   " values, expected " + std::to_string(j));
    }
    path.points.push_back(std::move(p));
  }
  if (path.points.size() != n) {
    Fail(ErrorCode::kFormat, "path file declares " + std::to_string(n) +
                                 " points but holds " +
                                 std::to_string(path.points.size()));
  }
  return path;
}

void SavePath(const LatentPath &path, const std::string &file) {
  WriteFileAtomic(file, EncodePathFile(path));
}

LatentPath LoadPath(const std::string &file) {
  return DecodePathFile(ReadFileBytes(file));
}

double FrameGraph::EdgeWeight(std::size_t a, std::size_t b) const {
  for (const auto &e : adjacency.at(a)) {
    if (e.to == b) return e.weight;
  }
  return -1.0;
}

FrameGraph BuildFrameGraph(std::span<const std::vector<double>> latent_means,
                           std::span<const std::span<const double>> images,
                           std::size_t k) {
  const std::size_t n = latent_means.size();
  if (images.size() != n) {
    Fail(ErrorCode::kConfig, "one image per latent mean is required");
  }
  if (k < 1 || k >= n) {
    Fail(ErrorCode::kConfig, "k must satisfy 1 <= k < node count (" +
                                 std::to_string(n) + ")");
  }
  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(SquaredDistance(latent_means[i], latent_means[j]), j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                      order.end());
    for (std::size_t r = 0; r < k; ++r) {
      const auto j = order[r].second;
      linked[i][j] = linked[j][i] = 1;
    }
  }
  FrameGraph graph;
  graph.latent.assign(latent_means.begin(), latent_means.end());
  graph.adjacency.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!linked[i][j]) continue;
      // Compute each weight once (i < j) so both directions are bitwise equal.
      const double w = i < j ? EuclideanDistance(images[i], images[j])
                             : graph.EdgeWeight(j, i);
      graph.adjacency[i].push_back({j, w});
    }
  }
  return graph;
}

GraphPath OracleShortestPath(const FrameGraph &graph, std::size_t start,
                             std::size_t end) {
  const std::size_t n = graph.size();
  if (start >= n || end >= n) {
    Fail(ErrorCode::kArgument, "start/end node out of range");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> pred(n, kNone);
  std::vector<char> done(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[start] = 0.0;
  queue.emplace(0.0, start);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == end) break;
    for (const auto &e : graph.adjacency[u]) {
      if (done[e.to]) continue;
      const double nd = d + e.weight;
      if (nd < dist[e.to] || (nd == dist[e.to] && u < pred[e.to])) {
        dist[e.to] = nd;
        pred[e.to] = u;
        queue.emplace(nd, e.to);
      }
    }
  }
  if (!done[end]) {
    Fail(ErrorCode::kDisconnected, "disconnected: node " + std::to_string(end) +
                                       " is unreachable from node " +
                                       std::to_string(start));
  }
  GraphPath path;
  path.weight = dist[end];
  for (std::size_t v = end; v != kNone; v = pred[v]) path.nodes.push_back(v);
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

}  // namespace latentnav
