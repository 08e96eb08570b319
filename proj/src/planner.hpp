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

#ifndef LATENTNAV_PLANNER_HPP
#define LATENTNAV_PLANNER_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vae.hpp"

namespace latentnav {

/// A differentiable map g from latent points to images.
class LatentDecoder {
 public:
  virtual ~LatentDecoder() = default;
  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual void Decode(std::span<const double> z, std::vector<double> &out) const = 0;
  /// grad = J(z)^T v, where J is the Jacobian of g at z.
  virtual void Pullback(std::span<const double> z, std::span<const double> v,
                        std::vector<double> &grad) const = 0;

  std::vector<double> Decode(std::span<const double> z) const {
    std::vector<double> out;
    Decode(z, out);
    return out;
  }
};

class IdentityDecoder final : public LatentDecoder {
 public:
  explicit IdentityDecoder(std::size_t dim) : dim_(dim) {}
  using LatentDecoder::Decode;
  std::size_t latent_dim() const override { return dim_; }
  std::size_t output_dim() const override { return dim_; }
  void Decode(std::span<const double> z, std::vector<double> &out) const override;
  void Pullback(std::span<const double> z, std::span<const double> v,
                std::vector<double> &grad) const override;

 private:
  std::size_t dim_;
};

/// The trained VAE decoder. Holds a reference; the params must outlive it.
class VaeDecoder final : public LatentDecoder {
 public:
  explicit VaeDecoder(const ModelParams &params);
  using LatentDecoder::Decode;
  std::size_t latent_dim() const override { return params_.config().latent_dim; }
  std::size_t output_dim() const override { return params_.config().pixel_count(); }
  void Decode(std::span<const double> z, std::vector<double> &out) const override;
  void Pullback(std::span<const double> z, std::span<const double> v,
                std::vector<double> &grad) const override;

 private:
  const ModelParams &params_;
  MlpSpec spec_;
};

struct PlannerConfig {
  std::size_t points = 50;
  double alpha = 0.001;
  std::size_t max_sweeps = 500;
  double tol = 1e-6;
  double norm_eps = 1e-12;
  /// Sum squared segment lengths instead of plain norms (sensitivity runs).
  bool squared_norm = false;

  void Validate() const;
};

/// Slack allowed when checking that the objective never grows.
inline constexpr double kMonotoneSlack = 1e-12;

struct LatentPath {
  std::vector<std::vector<double>> points;
  /// Objective of the initial path; length_history holds one value per sweep.
  double initial_length = 0.0;
  std::vector<double> length_history;
  bool converged = false;
  /// Set when some sweep increased the objective by more than
  /// kMonotoneSlack.
  bool alpha_too_large = false;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
};

/// z_i = z_s + (i / (N - 1)) (z_d - z_s), i = 0 .. N-1.
LatentPath InitStraightPath(std::span<const double> z_start,
                            std::span<const double> z_end, std::size_t n);

/// Sum over consecutive pairs of |g(z_i) - g(z_{i+1})| (squared if asked).
double PathLength(const LatentPath &path, const LatentDecoder &decoder,
                  bool squared = false);

/// Gradient in z of |g(z_prev) - g(z)| + |g(z) - g(z_next)|. A term whose
/// decoded segment is shorter than norm_eps contributes nothing.
std::vector<double> LocalGradient(std::span<const double> z_prev,
                                  std::span<const double> z,
                                  std::span<const double> z_next,
                                  const LatentDecoder &decoder,
                                  double norm_eps = 1e-12, bool squared = false);

/// Midpoint gradient descent from the straight line. Each sweep updates the
/// interior points in ascending order, in place, then records the total
/// objective. Stops after max_sweeps or once a sweep lowers the objective
/// by less than tol.
LatentPath PlanGeodesic(std::span<const double> z_start,
                        std::span<const double> z_end,
                        const LatentDecoder &decoder, const PlannerConfig &cfg);

// Path file: "# latentpath v1 N=<n> J=<j>" then one line per point with J
// space-separated doubles at 17 significant digits.
std::string EncodePathFile(const LatentPath &path);
LatentPath DecodePathFile(const std::string &text);
void SavePath(const LatentPath &path, const std::string &file);
LatentPath LoadPath(const std::string &file);

struct GraphEdge {
  std::size_t to = 0;
  double weight = 0.0;
};

/// Undirected kNN graph over training frames. Node i is frame i.
struct FrameGraph {
  std::vector<std::vector<double>> latent;
  /// Neighbor lists sorted by node index; symmetric.
  std::vector<std::vector<GraphEdge>> adjacency;

  std::size_t size() const { return adjacency.size(); }
  /// Weight of edge (a, b), or a negative value if absent.
  double EdgeWeight(std::size_t a, std::size_t b) const;
};

/// Connects each node to its k nearest nodes in latent Euclidean distance
/// (ties by lower index) and symmetrizes. Edge weights are the Euclidean
/// distance between the matching entries of `images`, which may be raw
/// frames or their decodings.
FrameGraph BuildFrameGraph(std::span<const std::vector<double>> latent_means,
                           std::span<const std::span<const double>> images,
                           std::size_t k);

struct GraphPath {
  std::vector<std::size_t> nodes;
  double weight = 0.0;
};

/// Dijkstra. Among equal-weight predecessors the smaller node index wins.
GraphPath OracleShortestPath(const FrameGraph &graph, std::size_t start,
                             std::size_t end);

}  // namespace latentnav

#endif
