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

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "planner.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace latentnav;
using testutil::CodeOf;

namespace {

/// g(z) = (z0, z1, 5 sin z0).
class WavyDecoder final : public LatentDecoder {
 public:
  using LatentDecoder::Decode;
  std::size_t latent_dim() const override { return 2; }
  std::size_t output_dim() const override { return 3; }
  void Decode(std::span<const double> z, std::vector<double> &out) const override {
    out = {z[0], z[1], 5.0 * std::sin(z[0])};
  }
  void Pullback(std::span<const double> z, std::span<const double> v,
                std::vector<double> &grad) const override {
    grad = {v[0] + 5.0 * std::cos(z[0]) * v[2], v[1]};
  }
};

/// Reports a NaN Jacobian so the planner sees a non-finite step.
class BrokenDecoder final : public LatentDecoder {
 public:
  using LatentDecoder::Decode;
  std::size_t latent_dim() const override { return 2; }
  std::size_t output_dim() const override { return 2; }
  void Decode(std::span<const double> z, std::vector<double> &out) const override {
    out.assign(z.begin(), z.end());
  }
  void Pullback(std::span<const double>, std::span<const double>,
                std::vector<double> &grad) const override {
    grad.assign(2, std::numeric_limits<double>::quiet_NaN());
  }
};

ModelParams SmallModel(std::uint64_t seed) {
  ModelConfig c;
  c.latent_dim = 3;
  c.height = 3;
  c.width = 2;
  c.channels = 1;
  c.encoder_hidden = {4};
  c.decoder_hidden = {5};
  auto p = ModelParams::Zero(c);
  SplitMix64 rng(seed);
  for (auto &t : p.tensors()) {
    for (auto &v : t.data()) v = rng.Uniform(-1.5, 1.5);
  }
  return p;
}

std::vector<double> RandomVec(std::size_t n, SplitMix64 &rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto &x : v) x = rng.Uniform(-scale, scale);
  return v;
}

double OracleLength(const std::vector<std::vector<double>> &pts,
                    const std::function<oracle::Vec(const oracle::Vec &)> &g) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += oracle::Distance(g(pts[i]), g(pts[i + 1]));
  return total;
}

FrameGraph GraphFromMatrix(const std::vector<oracle::Vec> &w) {
  FrameGraph g;
  g.adjacency.resize(w.size());
  g.latent.assign(w.size(), {0.0});
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (i != j && w[i][j] >= 0.0) g.adjacency[i].push_back({j, w[i][j]});
    }
  }
  return g;
}

}  // namespace

TEST_CASE("straight-line initialization") {
  const std::vector<double> a{1.0, -2.0}, b{3.0, 4.0};
  const auto two = InitStraightPath(a, b, 2);
  REQUIRE(two.size() == 2);
  CHECK(two.points[0] == a);
  CHECK(two.points[1] == b);
  const auto three = InitStraightPath(a, b, 3);
  CHECK(three.points[1] == std::vector<double>{2.0, 1.0});
  CHECK(PlannerConfig{}.points == 50);
  const auto fifty = InitStraightPath(a, b, 50);
  CHECK(fifty.points.back() == b);
  CHECK(fifty.points[7][0] == doctest::Approx(1.0 + 7.0 / 49.0 * 2.0));
  CHECK(CodeOf([&] { InitStraightPath(a, b, 1); }) == ErrorCode::kConfig);
  CHECK(CodeOf([&] { InitStraightPath(a, std::vector<double>{1.0}, 3); }) ==
        ErrorCode::kConfig);
}

TEST_CASE("path length") {
  IdentityDecoder id(3);
  const std::vector<double> a{0.0, 1.0, -1.0}, b{2.0, -1.0, 0.5};
  CHECK(PathLength(InitStraightPath(a, b, 11), id) ==
        doctest::Approx(oracle::Distance(a, b)).epsilon(1e-14));
  WavyDecoder wavy;
  const std::vector<double> p{0.3, 0.1}, q{-1.0, 2.0};
  CHECK(PathLength(InitStraightPath(p, q, 2), wavy) ==
        oracle::Distance(wavy.Decode(p), wavy.Decode(q)));

  SUBCASE("random decoder matches re-summation") {
    const auto model = SmallModel(3);
    VaeDecoder dec(model);
    SplitMix64 rng(4);
    LatentPath path;
    for (int i = 0; i < 5; ++i) path.points.push_back(RandomVec(3, rng, 2.0));
    const double want = OracleLength(path.points, [&](const oracle::Vec &z) { return Decode(model, z); });
    CHECK(std::abs(PathLength(path, dec) - want) < 1e-12);
    double sq = 0.0;
    for (int i = 0; i < 4; ++i) {
      sq += oracle::SquaredDistance(Decode(model, path.points[i]), Decode(model, path.points[i + 1]));
    }
    CHECK(PathLength(path, dec, true) == doctest::Approx(sq).epsilon(1e-13));
  }
}

TEST_CASE("vae decoder pullback is the Jacobian transpose") {
  const auto model = SmallModel(8);
  VaeDecoder dec(model);
  SplitMix64 rng(9);
  const auto z = RandomVec(3, rng);
  const auto v = RandomVec(6, rng);
  std::vector<double> grad;
  dec.Pullback(z, v, grad);
  const auto fd = oracle::CentralDiff(
      [&](const oracle::Vec &zz) {
        const auto y = Decode(model, zz);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += v[i] * y[i];
        return s;
      },
      z, 1e-5);
  for (std::size_t j = 0; j < 3; ++j) CHECK(oracle::RelErr(grad[j], fd[j]) < 1e-7);
}

TEST_CASE("local gradient") {
  IdentityDecoder id2(2);
  SUBCASE("point on the segment has zero gradient") {
    const auto g = LocalGradient(std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.0},
                                 std::vector<double>{2.0, 0.0}, id2);
    CHECK(std::abs(g[0]) < 1e-15);
    CHECK(std::abs(g[1]) < 1e-15);
  }
  SUBCASE("hand-evaluated unit vector sum") {
    const auto g = LocalGradient(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0},
                                 std::vector<double>{2.0, 0.0}, id2);
    CHECK(std::abs(g[0]) < 1e-15);
    CHECK(g[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("coincident images contribute nothing") {
    const auto g = LocalGradient(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0},
                                 std::vector<double>{4.0, 5.0}, id2);
    CHECK(g[0] == doctest::Approx(-0.6));
    CHECK(g[1] == doctest::Approx(-0.8));
  }
  SUBCASE("matches finite differences on random decoders") {
    SplitMix64 rng(13);
    int cases = 0;
    for (std::uint64_t s = 0; cases < 20; ++s) {
      const auto model = SmallModel(100 + s);
      VaeDecoder dec(model);
      const auto zp = RandomVec(3, rng, 2.0), z = RandomVec(3, rng, 2.0), zn = RandomVec(3, rng, 2.0);
      const auto gp = Decode(model, zp), gz = Decode(model, z), gn = Decode(model, zn);
      if (oracle::Distance(gp, gz) <= 1e-3 || oracle::Distance(gz, gn) <= 1e-3) continue;
      ++cases;
      const auto g = LocalGradient(zp, z, zn, dec);
      const auto fd = oracle::CentralDiff(
          [&](const oracle::Vec &zz) {
            const auto y = Decode(model, zz);
            return oracle::Distance(gp, y) + oracle::Distance(y, gn);
          },
          z, 1e-5);
      for (std::size_t j = 0; j < 3; ++j) CHECK(oracle::RelErr(g[j], fd[j]) < 1e-4);
    }
  }
}

TEST_CASE("identity decoder geodesic is the straight line") {
  IdentityDecoder id(4);
  const std::vector<double> a{0.5, -1.0, 2.0, 0.0}, b{-1.5, 0.25, 1.0, 3.0};
  PlannerConfig one;
  one.max_sweeps = 1;
  const auto straight = InitStraightPath(a, b, one.points);
  const auto first = PlanGeodesic(a, b, id, one);
  double moved = 0.0;
  for (std::size_t i = 0; i < straight.size(); ++i) {
    moved = std::max(moved, oracle::Distance(straight.points[i], first.points[i]));
  }
  CHECK(moved < 1e-8);

  const auto path = PlanGeodesic(a, b, id, PlannerConfig{});
  CHECK(path.converged);
  CHECK_FALSE(path.alpha_too_large);
  CHECK(path.points.front() == a);
  CHECK(path.points.back() == b);
  double deviation = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    deviation = std::max(deviation, oracle::Distance(straight.points[i], path.points[i]));
  }
  CHECK(deviation < 1e-6);
  CHECK(std::abs(path.length_history.back() - oracle::Distance(a, b)) < 1e-6);
}

TEST_CASE("coincident endpoints stop after one sweep") {
  const auto model = SmallModel(2);
  VaeDecoder dec(model);
  const std::vector<double> z{0.3, -0.2, 0.9};
  const auto path = PlanGeodesic(z, z, dec, PlannerConfig{});
  CHECK(path.length_history.size() == 1);
  CHECK(path.length_history[0] == 0.0);
  CHECK(path.initial_length == 0.0);
  for (const auto &p : path.points) CHECK(p == z);
}

TEST_CASE("toy decoder geodesic beats random search") {
  WavyDecoder wavy;
  const std::vector<double> a{-1.0, -1.5}, b{2.0, 1.5};
  PlannerConfig cfg;
  cfg.points = 8;
  cfg.max_sweeps = 20000;
  const auto path = PlanGeodesic(a, b, wavy, cfg);
  const double planned = PathLength(path, wavy);
  CHECK(planned <= path.initial_length);
  bool rose = false;
  double prev = path.initial_length;
  for (double l : path.length_history) {
    rose = rose || l > prev + kMonotoneSlack;
    prev = l;
  }
  CHECK(rose == path.alpha_too_large);

  const std::function<oracle::Vec(const oracle::Vec &)> g = [&](const oracle::Vec &z) {
    return wavy.Decode(z);
  };
  const auto straight = InitStraightPath(a, b, cfg.points);
  SplitMix64 rng(99);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100000; ++t) {
    auto pts = straight.points;
    const double scale = rng.Uniform(0.0, 1.0);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      for (auto &v : pts[i]) v += scale * rng.Normal();
    }
    best = std::min(best, OracleLength(pts, g));
  }
  MESSAGE("planned " << planned << " best random " << best);
  CHECK(planned <= 1.02 * best);
}

TEST_CASE("sweeps never lengthen the path at stable step sizes") {
  IdentityDecoder id(3);
  SplitMix64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const auto a = RandomVec(3, rng, 3.0), b = RandomVec(3, rng, 3.0);
    PlannerConfig cfg;
    cfg.points = 12;
    // Start from a bent path so the sweeps have work to do.
    auto path = PlanGeodesic(a, b, id, cfg);
    double prev = path.initial_length;
    for (double l : path.length_history) {
      CHECK(l <= prev + kMonotoneSlack);
      prev = l;
    }
    CHECK_FALSE(path.alpha_too_large);
  }
  SUBCASE("an oversized step is flagged") {
    WavyDecoder wavy;
    PlannerConfig cfg;
    cfg.points = 10;
    cfg.alpha = 5.0;
    cfg.max_sweeps = 50;
    const auto path = PlanGeodesic(std::vector<double>{-1.0, -1.5}, std::vector<double>{2.0, 1.5},
                                   wavy, cfg);
    CHECK(path.alpha_too_large);
    CHECK_FALSE(path.converged);
  }
}

TEST_CASE("planner errors") {
  BrokenDecoder broken;
  const std::string msg = testutil::MessageOf([&] {
    PlanGeodesic(std::vector<double>{0, 0}, std::vector<double>{1, 1}, broken, PlannerConfig{});
  });
  CHECK(testutil::Contains(msg, "sweep 0"));
  CHECK(testutil::Contains(msg, "index 1"));
  IdentityDecoder id(3);
  CHECK(CodeOf([&] {
          PlanGeodesic(std::vector<double>{0, 0}, std::vector<double>{1, 1}, id, PlannerConfig{});
        }) == ErrorCode::kConfig);
  PlannerConfig bad;
  bad.alpha = 0.0;
  CHECK(CodeOf([&] { bad.Validate(); }) == ErrorCode::kConfig);
  bad = PlannerConfig{};
  bad.points = 1;
  CHECK(CodeOf([&] { bad.Validate(); }) == ErrorCode::kConfig);
}

TEST_CASE("path file round trip") {
  SplitMix64 rng(5);
  LatentPath path;
  for (int i = 0; i < 6; ++i) path.points.push_back(RandomVec(4, rng, 1e3));
  path.points[2][1] = 1.0 / 3.0;
  const auto text = EncodePathFile(path);
  CHECK(text.rfind("# latentpath v1 N=6 J=4\n", 0) == 0);
  CHECK(DecodePathFile(text).points == path.points);
  CHECK(CodeOf([&] { DecodePathFile("# route v1 n=1\n0\n"); }) == ErrorCode::kFormat);
  CHECK(CodeOf([&] { DecodePathFile("# latentpath v1 N=2 J=1\n0.5\n"); }) == ErrorCode::kFormat);
  CHECK(CodeOf([&] { DecodePathFile("# latentpath v1 N=1 J=2\n0.5\n"); }) == ErrorCode::kFormat);
  CHECK(CodeOf([&] { DecodePathFile("# latentpath v1 N=1 J=1\nabc\n"); }) == ErrorCode::kFormat);
}

TEST_CASE("frame graph") {
  SUBCASE("three nodes with k = 2 form a triangle") {
    std::vector<std::vector<double>> lat{{0.0}, {1.0}, {5.0}};
    std::vector<std::vector<double>> img{{0.0, 0.0}, {3.0, 4.0}, {6.0, 8.0}};
    std::vector<std::span<const double>> spans(img.begin(), img.end());
    const auto g = BuildFrameGraph(lat, spans, 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(g.adjacency[i].size() == 2);
    CHECK(g.EdgeWeight(0, 1) == 5.0);
    CHECK(g.EdgeWeight(0, 2) == 10.0);
    CHECK(g.EdgeWeight(2, 0) == 10.0);
  }
  SUBCASE("neighbor sets match an all-pairs sort") {
    SplitMix64 rng(17);
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 5 + rng.Below(30);
      const std::size_t k = 1 + rng.Below(std::min<std::size_t>(n - 1, 6));
      std::vector<std::vector<double>> lat, img;
      for (std::size_t i = 0; i < n; ++i) {
        lat.push_back(RandomVec(2, rng));
        if (i % 4 == 3) lat.back() = lat[i - 1];  // exercise ties
        img.push_back(RandomVec(3, rng));
      }
      std::vector<std::span<const double>> spans(img.begin(), img.end());
      const auto g = BuildFrameGraph(lat, spans, k);
      std::vector<std::set<std::size_t>> want(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) idx.push_back(j);
        }
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
          return oracle::SquaredDistance(lat[i], lat[x]) < oracle::SquaredDistance(lat[i], lat[y]);
        });
        for (std::size_t r = 0; r < k; ++r) {
          want[i].insert(idx[r]);
          want[idx[r]].insert(i);
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        std::set<std::size_t> got;
        for (const auto &e : g.adjacency[i]) {
          got.insert(e.to);
          CHECK(e.weight == g.EdgeWeight(e.to, i));
          CHECK(e.weight == doctest::Approx(oracle::Distance(img[i], img[e.to])));
          CHECK(e.weight >= 0.0);
        }
        CHECK(got == want[i]);
      }
    }
  }
  SUBCASE("k must be in range") {
    std::vector<std::vector<double>> lat{{0.0}, {1.0}};
    std::vector<std::span<const double>> spans(lat.begin(), lat.end());
    CHECK(CodeOf([&] { BuildFrameGraph(lat, spans, 2); }) == ErrorCode::kConfig);
    CHECK(CodeOf([&] { BuildFrameGraph(lat, spans, 0); }) == ErrorCode::kConfig);
  }
}

TEST_CASE("oracle shortest path") {
  SUBCASE("start equals end") {
    const auto g = GraphFromMatrix({{-1, 1}, {1, -1}});
    const auto p = OracleShortestPath(g, 1, 1);
    CHECK(p.nodes == std::vector<std::size_t>{1});
    CHECK(p.weight == 0.0);
  }
  SUBCASE("hand-enumerated triangle") {
    // s = 0, m = 1, d = 2.
    const auto g = GraphFromMatrix({{-1, 3, 10}, {3, -1, 3}, {10, 3, -1}});
    const auto p = OracleShortestPath(g, 0, 2);
    CHECK(p.nodes == std::vector<std::size_t>{0, 1, 2});
    CHECK(p.weight == 6.0);
  }
  SUBCASE("ties prefer the smaller predecessor") {
    const auto g = GraphFromMatrix(
        {{-1, 1, 1, -1}, {1, -1, -1, 1}, {1, -1, -1, 1}, {-1, 1, 1, -1}});
    CHECK(OracleShortestPath(g, 0, 3).nodes == std::vector<std::size_t>{0, 1, 3});
  }
  SUBCASE("unreachable destination") {
    const auto g = GraphFromMatrix({{-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}});
    CHECK(CodeOf([&] { OracleShortestPath(g, 0, 2); }) == ErrorCode::kDisconnected);
    CHECK(testutil::Contains(testutil::MessageOf([&] { OracleShortestPath(g, 0, 2); }),
                             "disconnected"));
    CHECK(CodeOf([&] { OracleShortestPath(g, 0, 3); }) == ErrorCode::kArgument);
  }
  SUBCASE("small random graphs match exhaustive enumeration") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      SplitMix64 rng(seed);
      const std::size_t n = 2 + rng.Below(7);
      std::vector<oracle::Vec> w(n, oracle::Vec(n, -1.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (rng.Uniform() < 0.5) w[i][j] = w[j][i] = rng.Uniform(0.0, 10.0);
        }
      }
      const auto g = GraphFromMatrix(w);
      const std::size_t s = rng.Below(n), d = rng.Below(n);
      const double best = oracle::BestSimplePath(w, s, d);
      if (std::isinf(best)) {
        CHECK(CodeOf([&] { OracleShortestPath(g, s, d); }) == ErrorCode::kDisconnected);
        continue;
      }
      const auto p = OracleShortestPath(g, s, d);
      CHECK(std::abs(p.weight - best) <= 1e-12 * std::max(1.0, best));
      double along = 0.0;
      for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) along += g.EdgeWeight(p.nodes[i], p.nodes[i + 1]);
      CHECK(along == p.weight);
    }
  }
}
