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

#include "routing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "error.hpp"
#include "image.hpp"
#include "io_util.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace latentnav {

using nlohmann::json;

const char *RouteSourceName(RouteSource s) {
  switch (s) {
    case RouteSource::kGeodesic: return "geodesic";
    case RouteSource::kManual: return "manual";
    case RouteSource::kOracle: return "oracle";
  }
  return "?";
}

RouteSource ParseRouteSource(const std::string &name) {
  if (name == "geodesic") return RouteSource::kGeodesic;
  if (name == "manual") return RouteSource::kManual;
  if (name == "oracle") return RouteSource::kOracle;
  Fail(ErrorCode::kFormat, "unknown route source '" + name + "'");
}

void Route::CheckAgainst(const TourDataset &ds) const {
  for (auto i : indices) {
    if (i >= ds.size()) {
      Fail(ErrorCode::kArgument, "route index " + std::to_string(i) +
                                     " is out of range for a dataset of " +
                                     std::to_string(ds.size()) + " frames");
    }
  }
}

std::size_t NearestFrame(std::span<const double> image, const TourDataset &ds) {
  if (ds.frames.empty()) Fail(ErrorCode::kArgument, "dataset is empty");
  if (image.size() != ds.pixel_count()) {
    Fail(ErrorCode::kConfig, "image has " + std::to_string(image.size()) +
                                 " values but dataset frames have " +
                                 std::to_string(ds.pixel_count()));
  }
  std::size_t best = 0;
  double best_d = SquaredDistance(image, ds.frames[0].image.pixels);
  for (std::size_t i = 1; i < ds.frames.size(); ++i) {
    const double d = SquaredDistance(image, ds.frames[i].image.pixels);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Route MatchRoute(const LatentPath &path, const LatentDecoder &decoder,
                 const TourDataset &ds) {
  if (decoder.output_dim() != ds.pixel_count()) {
    Fail(ErrorCode::kConfig, "decoder output does not match dataset frame size");
  }
  Route route;
  route.source = RouteSource::kGeodesic;
  std::vector<double> image;
  for (const auto &z : path.points) {
    decoder.Decode(z, image);
    route.indices.push_back(NearestFrame(image, ds));
  }
  return route;
}

LatentPath PathFromRoute(const Route &route, const ModelParams &params,
                         const TourDataset &ds) {
  if (route.indices.empty()) Fail(ErrorCode::kArgument, "route is empty");
  route.CheckAgainst(ds);
  LatentPath path;
  for (auto i : route.indices) {
    path.points.push_back(Encode(params, ds.frames[i].image.pixels).mu);
  }
  return path;
}

std::vector<std::vector<double>> PosteriorMeans(const ModelParams &params,
                                                const TourDataset &ds) {
  std::vector<std::vector<double>> means;
  means.reserve(ds.size());
  for (const auto &f : ds.frames) means.push_back(Encode(params, f.image.pixels).mu);
  return means;
}

std::string CategoryCount::Ratio() const {
  return std::to_string(distinct) + "/" + std::to_string(total);
}

CategoryCount CountCategories(const Route &route) {
  if (route.indices.empty()) Fail(ErrorCode::kArgument, "route is empty");
  const std::set<std::size_t> unique(route.indices.begin(), route.indices.end());
  return {unique.size(), route.indices.size()};
}

std::vector<double> NeighborRandomDiffs(std::span<const std::vector<double>> sequence,
                                        std::span<const std::vector<double>> reference,
                                        std::uint64_t seed) {
  if (sequence.size() < 2) Fail(ErrorCode::kArgument, "sequence needs >= 2 entries");
  if (reference.empty()) Fail(ErrorCode::kArgument, "reference collection is empty");
  SplitMix64 rng(seed);
  std::vector<double> diffs;
  diffs.reserve(sequence.size() - 1);
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    const auto &r = reference[rng.Below(reference.size())];
    diffs.push_back(EuclideanDistance(sequence[i], sequence[i + 1]) -
                    EuclideanDistance(sequence[i], r));
  }
  return diffs;
}

Histogram NeighborDistanceHistogram(std::span<const std::vector<double>> sequence,
                                    std::size_t bins) {
  if (bins < 1) Fail(ErrorCode::kArgument, "bins must be >= 1");
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    d.push_back(EuclideanDistance(sequence[i], sequence[i + 1]));
  }
  const double max = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  Histogram h;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges.push_back(max * static_cast<double>(b) / static_cast<double>(bins));
  }
  for (double v : d) {
    std::size_t b = 0;
    if (max > 0.0) {
      b = std::min(bins - 1,
                   static_cast<std::size_t>(v / max * static_cast<double>(bins)));
    }
    ++h.counts[b];
  }
  return h;
}

double ContinuityGap(const Route &route, const TourDataset &ds) {
  if (!ds.has_ground_truth()) {
    Fail(ErrorCode::kNoGroundTruth,
         "no ground truth: dataset positions are ordinal, not measured");
  }
  route.CheckAgainst(ds);
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < route.indices.size(); ++i) {
    gap = std::max(gap, RingDistance(ds.frames[route.indices[i]].position,
                                     ds.frames[route.indices[i + 1]].position));
  }
  return gap;
}

std::vector<std::vector<double>> RouteImages(const Route &route,
                                             const TourDataset &ds) {
  route.CheckAgainst(ds);
  std::vector<std::vector<double>> images;
  for (auto i : route.indices) images.push_back(ds.frames[i].image.pixels);
  return images;
}

namespace {

RouteEvaluation EvaluateRoute(const Route &route, const LatentPath &path,
                              const TourDataset &ds,
                              const std::vector<std::vector<double>> &frame_images,
                              const std::vector<std::vector<double>> &means,
                              std::uint64_t image_seed, std::uint64_t latent_seed,
                              std::size_t bins) {
  RouteEvaluation ev;
  ev.categories = CountCategories(route);
  const auto images = RouteImages(route, ds);
  if (images.size() >= 2) {
    ev.image_diffs = NeighborRandomDiffs(images, frame_images, image_seed);
  }
  if (path.points.size() >= 2) {
    ev.latent_diffs = NeighborRandomDiffs(path.points, means, latent_seed);
  }
  ev.route_histogram = NeighborDistanceHistogram(images, bins);
  ev.path_histogram = NeighborDistanceHistogram(path.points, bins);
  if (ds.has_ground_truth()) ev.max_geo_gap = ContinuityGap(route, ds);
  return ev;
}

json HistogramJson(const Histogram &h) {
  return {{"edges", h.edges}, {"counts", h.counts}};
}

json RouteEvaluationJson(const RouteEvaluation &ev) {
  json j;
  j["distinct"] = ev.categories.distinct;
  j["total"] = ev.categories.total;
  j["category_ratio"] = ev.categories.Ratio();
  j["image_neighbor_random_diffs"] = ev.image_diffs;
  j["latent_neighbor_random_diffs"] = ev.latent_diffs;
  j["route_neighbor_histogram"] = HistogramJson(ev.route_histogram);
  j["path_neighbor_histogram"] = HistogramJson(ev.path_histogram);
  j["max_geo_gap"] = ev.max_geo_gap ? json(*ev.max_geo_gap) : json(nullptr);
  return j;
}

}  // namespace

std::string EvalReport::CategoryRatio() const {
  return std::to_string(geodesic.categories.distinct) + "/" +
         std::to_string(reference.categories.distinct);
}

EvalReport Evaluate(const ModelParams &params, const TourDataset &ds,
                    const Route &geodesic, const Route &reference,
                    const LatentPath *geodesic_path, std::uint64_t seed,
                    std::size_t bins) {
  if (params.config().pixel_count() != ds.pixel_count()) {
    Fail(ErrorCode::kConfig, "model and dataset image sizes differ");
  }
  geodesic.CheckAgainst(ds);
  reference.CheckAgainst(ds);
  std::vector<std::vector<double>> frame_images;
  for (const auto &f : ds.frames) frame_images.push_back(f.image.pixels);
  const auto means = PosteriorMeans(params, ds);

  const LatentPath geo_path =
      geodesic_path ? *geodesic_path : PathFromRoute(geodesic, params, ds);
  const LatentPath ref_path = PathFromRoute(reference, params, ds);

  EvalReport report;
  report.seed = seed;
  report.bins = bins;
  report.reference_source = reference.source;
  report.geodesic = EvaluateRoute(geodesic, geo_path, ds, frame_images, means,
                                  DeriveSeed(seed, 1), DeriveSeed(seed, 2), bins);
  report.reference = EvaluateRoute(reference, ref_path, ds, frame_images, means,
                                   DeriveSeed(seed, 3), DeriveSeed(seed, 4), bins);
  return report;
}

std::string EvalReportJson(const EvalReport &report) {
  json j;
  j["format"] = "latentnav-eval";
  j["version"] = 1;
  j["seed"] = report.seed;
  j["bins"] = report.bins;
  j["category_ratio"] = report.CategoryRatio();
  j["geodesic"] = RouteEvaluationJson(report.geodesic);
  j["reference"] = RouteEvaluationJson(report.reference);
  j["reference"]["source"] = RouteSourceName(report.reference_source);
  return j.dump(2) + "\n";
}

std::string EncodeRouteFile(const Route &route) {
  std::string out = "# route v1 n=" + std::to_string(route.size()) +
                    " source=" + RouteSourceName(route.source) + "\n";
  for (auto i : route.indices) out += std::to_string(i) + "\n";
  return out;
}

Route DecodeRouteFile(const std::string &text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  std::size_t n = 0;
  if (std::sscanf(header.c_str(), "# route v1 n=%zu", &n) != 1) {
    Fail(ErrorCode::kFormat, "missing or malformed route v1 header");
  }
  Route route;
  if (const auto pos = header.find(" source="); pos != std::string::npos) {
    route.source = ParseRouteSource(header.substr(pos + 8));
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(line, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != line.size() || line[0] == '-') {
      Fail(ErrorCode::kFormat, "bad frame index '" + line + "' in route file");
    }
    route.indices.push_back(static_cast<std::size_t>(v));
  }
  if (route.indices.size() != n) {
    Fail(ErrorCode::kFormat, "route file declares " + std::to_string(n) +
                                 " frames but holds " +
                                 std::to_string(route.indices.size()));
  }
  return route;
}

void SaveRoute(const Route &route, const std::string &file) {
  WriteFileAtomic(file, EncodeRouteFile(route));
}

Route LoadRoute(const std::string &file) {
  return DecodeRouteFile(ReadFileBytes(file));
}

}  // namespace latentnav
