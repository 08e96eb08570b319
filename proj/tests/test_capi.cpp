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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "latentnav.h"

namespace fs = std::filesystem;

namespace {

std::string LastError() { return lnav_last_error(); }

bool Contains(const std::string &hay, const std::string &needle) {
  return hay.find(needle) != std::string::npos;
}

struct TempDir {
  fs::path path;
  TempDir() {
    char tmpl[] = "/tmp/lnav-capi-XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string &name) const { return (path / name).string(); }
};

lnav_world_config SmallWorld() {
  lnav_world_config w;
  lnav_world_config_default(&w);
  w.frames = 40;
  w.height = 4;
  w.width = 3;
  return w;
}

lnav_model_config SmallModelConfig(const std::vector<uint64_t> &hidden) {
  lnav_model_config m;
  lnav_model_config_default(&m);
  m.latent_dim = 2;
  m.height = 4;
  m.width = 3;
  m.channels = 3;
  m.encoder_hidden = hidden.data();
  m.num_encoder_hidden = hidden.size();
  m.decoder_hidden = hidden.data();
  m.num_decoder_hidden = hidden.size();
  return m;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(lnav_version()) == "1.0.0");
  CHECK(std::string(lnav_status_name(LNAV_OK)) == "ok");
  CHECK(std::string(lnav_status_name(LNAV_ERR_CONFIG)) == "configuration error");
  CHECK(std::string(lnav_status_name(LNAV_ERR_NO_GROUND_TRUTH)) == "no ground truth");
  CHECK(std::string(lnav_status_name(static_cast<lnav_status>(55))) == "unknown status");
}

TEST_CASE("configuration errors report the field") {
  auto w = SmallWorld();
  w.num_rooms = 0;
  lnav_dataset *ds = nullptr;
  CHECK(lnav_dataset_generate(&w, &ds) == LNAV_ERR_CONFIG);
  CHECK(ds == nullptr);
  CHECK(Contains(LastError(), "num_rooms"));

  CHECK(lnav_dataset_generate(nullptr, &ds) == LNAV_ERR_ARGUMENT);
  w = SmallWorld();
  CHECK(lnav_dataset_generate(&w, nullptr) == LNAV_ERR_ARGUMENT);

  const uint64_t bad_pair[] = {0, 9};
  w.alias_pairs = bad_pair;
  w.num_alias_pairs = 1;
  CHECK(lnav_dataset_generate(&w, &ds) == LNAV_ERR_CONFIG);
}

TEST_CASE("dataset lifecycle") {
  TempDir tmp;
  const auto w = SmallWorld();
  lnav_dataset *ds = nullptr;
  REQUIRE(lnav_dataset_generate(&w, &ds) == LNAV_OK);
  lnav_dataset_info info;
  REQUIRE(lnav_dataset_info_get(ds, &info) == LNAV_OK);
  CHECK(info.frames == 40);
  CHECK(info.height == 4);
  CHECK(info.width == 3);
  CHECK(info.channels == 3);
  CHECK(info.has_ground_truth == 1);

  std::vector<double> px(36);
  double pos = -1.0;
  REQUIRE(lnav_dataset_frame(ds, 10, px.data(), px.size(), &pos) == LNAV_OK);
  CHECK(pos == doctest::Approx(0.25));
  for (double v : px) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(lnav_dataset_frame(ds, 40, px.data(), px.size(), &pos) == LNAV_ERR_ARGUMENT);
  CHECK(lnav_dataset_frame(ds, 0, px.data(), 35, &pos) == LNAV_ERR_ARGUMENT);

  const auto manifest = tmp / "ds.json";
  REQUIRE(lnav_dataset_save(ds, manifest.c_str()) == LNAV_OK);
  lnav_dataset *back = nullptr;
  REQUIRE(lnav_dataset_load(manifest.c_str(), &back) == LNAV_OK);
  lnav_dataset_info info2;
  lnav_dataset_info_get(back, &info2);
  CHECK(info2.checksum == info.checksum);
  std::vector<double> px2(36);
  lnav_dataset_frame(back, 10, px2.data(), px2.size(), nullptr);
  CHECK(px2 == px);

  lnav_dataset *missing = nullptr;
  CHECK(lnav_dataset_load((tmp / "nope.json").c_str(), &missing) == LNAV_ERR_IO);
  CHECK(missing == nullptr);
  lnav_dataset_free(back);
  lnav_dataset_free(ds);
  lnav_dataset_free(nullptr);
}

TEST_CASE("model lifecycle, encode, decode and slice") {
  TempDir tmp;
  const std::vector<uint64_t> hidden{5};
  const auto cfg = SmallModelConfig(hidden);
  lnav_model *m = nullptr;
  REQUIRE(lnav_model_init(&cfg, 3, &m) == LNAV_OK);
  lnav_model_info info;
  REQUIRE(lnav_model_info_get(m, &info) == LNAV_OK);
  CHECK(info.latent_dim == 2);
  // encoder 36->5->(2,2), decoder 2->5->36
  CHECK(info.parameter_count == (36 * 5 + 5) + 2 * (5 * 2 + 2) + (2 * 5 + 5) + (5 * 36 + 36));

  std::vector<double> x(36, 0.5), mu(2), lv(2);
  REQUIRE(lnav_model_encode(m, x.data(), x.size(), mu.data(), lv.data(), 2) == LNAV_OK);
  CHECK(lnav_model_encode(m, x.data(), x.size(), mu.data(), nullptr, 2) == LNAV_OK);
  CHECK(lnav_model_encode(m, x.data(), 35, mu.data(), lv.data(), 2) != LNAV_OK);

  std::vector<double> img(36);
  REQUIRE(lnav_model_decode(m, mu.data(), 2, img.data(), img.size()) == LNAV_OK);
  CHECK(lnav_model_decode(m, mu.data(), 3, img.data(), img.size()) != LNAV_OK);

  const uint64_t g = 3;
  std::vector<double> slice(g * 4 * g * 3 * 3);
  REQUIRE(lnav_model_slice(m, 0, 1, g, -1.0, 1.0, 0.0, slice.data(), slice.size()) == LNAV_OK);
  // tile (2, 1): z = (1, 0)
  const double z[2] = {1.0, 0.0};
  lnav_model_decode(m, z, 2, img.data(), img.size());
  for (uint64_t r = 0; r < 4; ++r) {
    for (uint64_t c = 0; c < 3; ++c) {
      for (uint64_t ch = 0; ch < 3; ++ch) {
        const uint64_t row = 2 * 4 + r, col = 1 * 3 + c;
        CHECK(slice[(row * g * 3 + col) * 3 + ch] == img[(r * 3 + c) * 3 + ch]);
      }
    }
  }
  CHECK(lnav_model_slice(m, 0, 0, g, -1.0, 1.0, 0.0, slice.data(), slice.size()) ==
        LNAV_ERR_ARGUMENT);
  CHECK(lnav_model_slice(m, 0, 1, g, -1.0, 1.0, 0.0, slice.data(), 5) == LNAV_ERR_ARGUMENT);

  const auto ckpt = tmp / "m.ckpt";
  REQUIRE(lnav_model_save(m, ckpt.c_str()) == LNAV_OK);
  lnav_model *back = nullptr;
  REQUIRE(lnav_model_load(ckpt.c_str(), &back) == LNAV_OK);
  lnav_model_info info2;
  lnav_model_info_get(back, &info2);
  CHECK(info2.checksum == info.checksum);

  {
    FILE *f = std::fopen((tmp / "junk.ckpt").c_str(), "wb");
    std::fputs("not a checkpoint at all, just text", f);
    std::fclose(f);
  }
  lnav_model *junk = nullptr;
  CHECK(lnav_model_load((tmp / "junk.ckpt").c_str(), &junk) == LNAV_ERR_BAD_MAGIC);
  CHECK(junk == nullptr);

  auto bad = cfg;
  bad.latent_dim = 0;
  lnav_model *none = nullptr;
  CHECK(lnav_model_init(&bad, 1, &none) == LNAV_ERR_CONFIG);
  lnav_model_free(back);
  lnav_model_free(m);
}

TEST_CASE("training through the C interface") {
  const auto w = SmallWorld();
  lnav_dataset *ds = nullptr;
  REQUIRE(lnav_dataset_generate(&w, &ds) == LNAV_OK);
  const std::vector<uint64_t> hidden{8};
  const auto cfg = SmallModelConfig(hidden);
  lnav_train_config tc;
  lnav_train_config_default(&tc);
  tc.epochs = 5;
  tc.batch_size = 10;
  tc.learning_rate = 1e-2;

  std::vector<double> a(5), b(5);
  struct Seen {
    uint64_t calls = 0;
    std::vector<double> losses;
  } seen;
  auto cb = [](uint64_t epoch, double loss, void *user) {
    auto *s = static_cast<Seen *>(user);
    CHECK(epoch == s->calls);
    ++s->calls;
    s->losses.push_back(loss);
  };
  lnav_model *m1 = nullptr, *m2 = nullptr;
  lnav_model_init(&cfg, 9, &m1);
  lnav_model_init(&cfg, 9, &m2);
  REQUIRE(lnav_model_train(m1, ds, &tc, a.data(), cb, &seen) == LNAV_OK);
  REQUIRE(lnav_model_train(m2, ds, &tc, b.data(), nullptr, nullptr) == LNAV_OK);
  CHECK(seen.calls == 5);
  CHECK(seen.losses == a);
  CHECK(a == b);
  lnav_model_info i1, i2;
  lnav_model_info_get(m1, &i1);
  lnav_model_info_get(m2, &i2);
  CHECK(i1.checksum == i2.checksum);

  auto wrong = SmallModelConfig(hidden);
  wrong.height = 5;
  lnav_model *m3 = nullptr;
  lnav_model_init(&wrong, 1, &m3);
  CHECK(lnav_model_train(m3, ds, &tc, nullptr, nullptr, nullptr) == LNAV_ERR_CONFIG);
  tc.batch_size = 0;
  CHECK(lnav_model_train(m1, ds, &tc, nullptr, nullptr, nullptr) == LNAV_ERR_CONFIG);
  lnav_model_free(m3);
  lnav_model_free(m2);
  lnav_model_free(m1);
  lnav_dataset_free(ds);
}

TEST_CASE("planning, routing and evaluation") {
  TempDir tmp;
  const auto w = SmallWorld();
  lnav_dataset *ds = nullptr;
  REQUIRE(lnav_dataset_generate(&w, &ds) == LNAV_OK);
  const std::vector<uint64_t> hidden{6};
  const auto cfg = SmallModelConfig(hidden);
  lnav_model *m = nullptr;
  REQUIRE(lnav_model_init(&cfg, 4, &m) == LNAV_OK);

  lnav_planner_config pc;
  lnav_planner_config_default(&pc);
  pc.points = 12;
  pc.max_sweeps = 30;
  lnav_path *p = nullptr;
  REQUIRE(lnav_plan_frames(m, ds, 2, 30, &pc, &p) == LNAV_OK);
  lnav_path_info pi;
  REQUIRE(lnav_path_info_get(p, &pi) == LNAV_OK);
  CHECK(pi.points == 12);
  CHECK(pi.dim == 2);
  CHECK(pi.sweeps >= 1);
  CHECK(pi.sweeps <= 30);

  std::vector<double> z0(2), mu(2), px(36);
  lnav_path_point(p, 0, z0.data(), 2);
  lnav_dataset_frame(ds, 2, px.data(), px.size(), nullptr);
  lnav_model_encode(m, px.data(), px.size(), mu.data(), nullptr, 2);
  CHECK(z0 == mu);
  CHECK(lnav_path_point(p, 12, z0.data(), 2) == LNAV_ERR_ARGUMENT);

  std::vector<double> hist(pi.sweeps);
  REQUIRE(lnav_path_length_history(p, hist.data(), hist.size()) == LNAV_OK);
  double len = 0.0;
  REQUIRE(lnav_path_length(m, p, 0, &len) == LNAV_OK);
  CHECK(len == doctest::Approx(hist.back()).epsilon(1e-12));
  if (!pi.alpha_too_large) CHECK(hist.back() <= pi.initial_length);

  const auto path_file = tmp / "path.txt";
  REQUIRE(lnav_path_save(p, path_file.c_str()) == LNAV_OK);
  lnav_path *p2 = nullptr;
  REQUIRE(lnav_path_load(path_file.c_str(), &p2) == LNAV_OK);
  double len2 = 0.0;
  lnav_path_length(m, p2, 0, &len2);
  CHECK(len2 == len);

  lnav_route *r = nullptr;
  REQUIRE(lnav_route_match(m, ds, p, &r) == LNAV_OK);
  uint64_t n = 0;
  lnav_route_size(r, &n);
  CHECK(n == 12);
  uint64_t distinct = 0, total = 0;
  REQUIRE(lnav_route_categories(r, &distinct, &total) == LNAV_OK);
  CHECK(total == 12);
  CHECK(distinct >= 1);
  CHECK(distinct <= 12);
  double gap = -1.0;
  REQUIRE(lnav_route_gap(r, ds, &gap) == LNAV_OK);
  CHECK(gap >= 0.0);
  CHECK(gap <= 0.5);

  lnav_route *oracle = nullptr;
  REQUIRE(lnav_route_oracle(m, ds, 2, 30, 6, &oracle) == LNAV_OK);
  uint64_t on = 0;
  lnav_route_size(oracle, &on);
  std::vector<uint64_t> oi(on);
  lnav_route_indices(oracle, oi.data(), on);
  CHECK(oi.front() == 2);
  CHECK(oi.back() == 30);
  lnav_route *bad = nullptr;
  CHECK(lnav_route_oracle(m, ds, 2, 30, 0, &bad) == LNAV_ERR_CONFIG);
  CHECK(lnav_route_oracle(m, ds, 2, 40, 5, &bad) == LNAV_ERR_ARGUMENT);

  const auto strip_a = tmp / "a.ppm", strip_b = tmp / "b.ppm";
  REQUIRE(lnav_route_write_strips(m, ds, p, r, strip_a.c_str(), strip_b.c_str()) == LNAV_OK);
  CHECK(fs::exists(strip_a));
  CHECK(fs::exists(strip_b));
  CHECK(lnav_route_write_strips(m, ds, nullptr, r, strip_a.c_str(), nullptr) ==
        LNAV_ERR_ARGUMENT);

  char *json = nullptr;
  REQUIRE(lnav_evaluate(m, ds, r, oracle, p, 1, 5, &json) == LNAV_OK);
  const auto j = nlohmann::json::parse(json);
  lnav_string_free(json);
  CHECK(j["category_ratio"] == std::to_string(distinct) + "/" + std::to_string(on));
  CHECK(j["reference"]["source"] == "oracle");

  const uint64_t idx[] = {1, 1, 39};
  lnav_route *manual = nullptr;
  REQUIRE(lnav_route_from_indices(idx, 3, LNAV_ROUTE_MANUAL, &manual) == LNAV_OK);
  lnav_route_categories(manual, &distinct, &total);
  CHECK(distinct == 2);
  CHECK(total == 3);
  const auto route_file = tmp / "route.txt";
  REQUIRE(lnav_route_save(manual, route_file.c_str()) == LNAV_OK);
  lnav_route *loaded = nullptr;
  REQUIRE(lnav_route_load(route_file.c_str(), &loaded) == LNAV_OK);
  std::vector<uint64_t> li(3);
  lnav_route_indices(loaded, li.data(), 3);
  CHECK(li == std::vector<uint64_t>{1, 1, 39});
  const uint64_t out_of_range[] = {1, 40};
  lnav_route *oor = nullptr;
  REQUIRE(lnav_route_from_indices(out_of_range, 2, LNAV_ROUTE_MANUAL, &oor) == LNAV_OK);
  CHECK(lnav_route_gap(oor, ds, &gap) == LNAV_ERR_ARGUMENT);

  for (auto *x : {r, oracle, manual, loaded, oor}) lnav_route_free(x);
  lnav_path_free(p2);
  lnav_path_free(p);
  lnav_model_free(m);
  lnav_dataset_free(ds);
}

TEST_CASE("ingested datasets have no ground truth") {
  TempDir tmp;
  fs::create_directories(tmp.path / "frames");
  for (int i = 0; i < 10; ++i) {
    std::vector<double> px(2 * 2 * 3, 0.1 * i);
    char name[32];
    std::snprintf(name, sizeof(name), "f%02d.ppm", i);
    REQUIRE(lnav_image_write((tmp.path / "frames" / name).c_str(), px.data(), 2, 2, 3) ==
            LNAV_OK);
  }
  lnav_dataset *ds = nullptr;
  REQUIRE(lnav_dataset_ingest((tmp.path / "frames").c_str(), 4, 3, &ds) == LNAV_OK);
  lnav_dataset_info info;
  lnav_dataset_info_get(ds, &info);
  CHECK(info.frames == 10);
  CHECK(info.height == 4);
  CHECK(info.has_ground_truth == 0);
  const uint64_t idx[] = {0, 1};
  lnav_route *r = nullptr;
  lnav_route_from_indices(idx, 2, LNAV_ROUTE_MANUAL, &r);
  double gap = 0.0;
  CHECK(lnav_route_gap(r, ds, &gap) == LNAV_ERR_NO_GROUND_TRUTH);
  CHECK(Contains(LastError(), "no ground truth"));
  lnav_route_free(r);
  lnav_dataset_free(ds);
}

TEST_CASE("gradient check through the C interface") {
  lnav_gradcheck_config gc;
  lnav_gradcheck_config_default(&gc);
  gc.trials = 2;
  lnav_gradcheck_suite suites[8];
  uint64_t count = 0;
  REQUIRE(lnav_gradcheck(&gc, suites, 8, &count) == LNAV_OK);
  REQUIRE(count >= 1);
  REQUIRE(count <= 8);
  for (uint64_t i = 0; i < count; ++i) {
    CHECK(suites[i].passed == 1);
    CHECK(suites[i].trials == 2);
    CHECK(suites[i].worst_relative_error < 1e-5);
  }
  gc.corrupt = 1;
  REQUIRE(lnav_gradcheck(&gc, suites, 8, &count) == LNAV_OK);
  bool any_failed = false;
  for (uint64_t i = 0; i < count; ++i) any_failed = any_failed || !suites[i].passed;
  CHECK(any_failed);
  uint64_t probe = 0;
  CHECK(lnav_gradcheck(&gc, nullptr, 0, &probe) == LNAV_OK);
  CHECK(probe == count);
}
