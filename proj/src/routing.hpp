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

#ifndef LATENTNAV_ROUTING_HPP
#define LATENTNAV_ROUTING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planner.hpp"
#include "worldgen.hpp"

namespace latentnav {

enum class RouteSource { kGeodesic, kManual, kOracle };

const char *RouteSourceName(RouteSource s);
RouteSource ParseRouteSource(const std::string &name);

/// Ordered training-frame indices. Images and positions are looked up in the
/// dataset the route was built against.
struct Route {
  std::vector<std::size_t> indices;
  RouteSource source = RouteSource::kGeodesic;

  std::size_t size() const { return indices.size(); }
  void CheckAgainst(const TourDataset &ds) const;
};

/// Frame with the smallest squared pixel distance; lowest index on ties.
std::size_t NearestFrame(std::span<const double> image, const TourDataset &ds);

/// One matched frame per path point.
Route MatchRoute(const LatentPath &path, const LatentDecoder &decoder,
                 const TourDataset &ds);

/// Posterior mean of every route frame.
LatentPath PathFromRoute(const Route &route, const ModelParams &params,
                         const TourDataset &ds);

std::vector<std::vector<double>> PosteriorMeans(const ModelParams &params,
                                                const TourDataset &ds);

struct CategoryCount {
  std::size_t distinct = 0;
  std::size_t total = 0;

  /// "distinct/total".
  std::string Ratio() const;
};

CategoryCount CountCategories(const Route &route);

/// d(v_i, v_{i+1}) - d(v_i, reference[r_i]) for i = 0 .. n-2, with r_i drawn
/// uniformly and independently per i from splitmix64(seed).
std::vector<double> NeighborRandomDiffs(std::span<const std::vector<double>> sequence,
                                        std::span<const std::vector<double>> reference,
                                        std::uint64_t seed);

struct Histogram {
  /// bins + 1 edges spanning [0, max neighbor distance].
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

/// Histogram of |v_i - v_{i+1}| over uniform bins on [0, max]. A distance
/// equal to max falls in the last bin.
Histogram NeighborDistanceHistogram(std::span<const std::vector<double>> sequence,
                                    std::size_t bins);

/// Largest ring distance between consecutive route frames. Requires
/// ground-truth positions.
double ContinuityGap(const Route &route, const TourDataset &ds);

std::vector<std::vector<double>> RouteImages(const Route &route, const TourDataset &ds);

struct RouteEvaluation {
  CategoryCount categories;
  std::vector<double> image_diffs;
  std::vector<double> latent_diffs;
  Histogram route_histogram;
  Histogram path_histogram;
  std::optional<double> max_geo_gap;
};

struct EvalReport {
  RouteEvaluation geodesic;
  RouteEvaluation reference;
  RouteSource reference_source = RouteSource::kOracle;
  std::uint64_t seed = 0;
  std::size_t bins = 0;

  /// "distinct_geodesic/distinct_reference".
  std::string CategoryRatio() const;
};

/// Scores a geodesic route against a reference route. The latent statistics
/// of the geodesic use `geodesic_path` when given, else the posterior means
/// of its frames; the reference always uses posterior means. Random draws
/// use DeriveSeed(seed, tag) with tags 1..4 for (geodesic image, geodesic
/// latent, reference image, reference latent).
EvalReport Evaluate(const ModelParams &params, const TourDataset &ds,
                    const Route &geodesic, const Route &reference,
                    const LatentPath *geodesic_path, std::uint64_t seed,
                    std::size_t bins);

std::string EvalReportJson(const EvalReport &report);

// Route file: "# route v1 n=<n>" then one frame index per line.
std::string EncodeRouteFile(const Route &route);
Route DecodeRouteFile(const std::string &text);
void SaveRoute(const Route &route, const std::string &file);
Route LoadRoute(const std::string &file);

}  // namespace latentnav

#endif
