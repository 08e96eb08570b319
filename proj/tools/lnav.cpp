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

// Command-line driver for the latentnav pipeline. Talks to the library only
// through the C interface.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latentnav.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad configuration or arguments. Exits with status 2.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Any other failed library call. Exits with status 1.
class LibraryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void Check(lnav_status status) {
  if (status == LNAV_OK) return;
  if (status == LNAV_ERR_CONFIG || status == LNAV_ERR_ARGUMENT) {
    throw UsageError(std::string(lnav_status_name(status)) + ": " + lnav_last_error());
  }
  throw LibraryError(std::string(lnav_status_name(status)) + ": " + lnav_last_error());
}

template <typename T, void (*Free)(T *)>
struct Handle {
  T *ptr = nullptr;
  Handle() = default;
  Handle(const Handle &) = delete;
  Handle &operator=(const Handle &) = delete;
  ~Handle() { Free(ptr); }
  T **out() { return &ptr; }
  T *get() const { return ptr; }
};

using Dataset = Handle<lnav_dataset, lnav_dataset_free>;
using Model = Handle<lnav_model, lnav_model_free>;
using Path = Handle<lnav_path, lnav_path_free>;
using Route = Handle<lnav_route, lnav_route_free>;

struct SliceSettings {
  std::uint64_t dim_a = 0;
  std::uint64_t dim_b = 1;
  std::uint64_t grid = 10;
  double lo = 0.05;
  double hi = 0.95;
  double fixed = 0.0;
};

struct Paths {
  std::string dataset;
  std::string checkpoint;
  std::string path;
  std::string route;
  std::string reference;
  std::string frames_dir;
  std::string out = ".";
};

/// Every setting a command can read. Defaults come from the library.
struct RunConfig {
  lnav_world_config world{};
  std::vector<std::uint64_t> alias_pairs;
  lnav_model_config model{};
  std::vector<std::uint64_t> encoder_hidden{64};
  std::vector<std::uint64_t> decoder_hidden{64};
  lnav_train_config train{};
  lnav_planner_config planner{};
  SliceSettings slice;
  std::uint64_t oracle_k = 10;
  std::uint64_t eval_bins = 20;
  std::uint64_t eval_seed = 1;
  std::uint64_t ingest_height = 16;
  std::uint64_t ingest_width = 16;
  lnav_gradcheck_config gradcheck{};
  Paths paths;

  RunConfig() {
    lnav_world_config_default(&world);
    lnav_model_config_default(&model);
    lnav_train_config_default(&train);
    lnav_planner_config_default(&planner);
    lnav_gradcheck_config_default(&gradcheck);
  }

  /// Points the C structs at the owned vectors.
  void Bind() {
    world.alias_pairs = alias_pairs.data();
    world.num_alias_pairs = alias_pairs.size() / 2;
    model.encoder_hidden = encoder_hidden.data();
    model.num_encoder_hidden = encoder_hidden.size();
    model.decoder_hidden = decoder_hidden.data();
    model.num_decoder_hidden = decoder_hidden.size();
  }
};

// ---- config file ----

using Setter = std::function<void(const json &, const std::string &)>;

std::uint64_t AsUnsigned(const json &v, const std::string &key) {
  if (!v.is_number_unsigned()) {
    throw UsageError("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double AsReal(const json &v, const std::string &key) {
  if (!v.is_number()) throw UsageError("config key '" + key + "' must be a number");
  return v.get<double>();
}

bool AsBool(const json &v, const std::string &key) {
  if (!v.is_boolean()) throw UsageError("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string AsString(const json &v, const std::string &key) {
  if (!v.is_string()) throw UsageError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::uint64_t> AsSizes(const json &v, const std::string &key) {
  if (!v.is_array()) throw UsageError("config key '" + key + "' must be a list");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(AsUnsigned(v[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

lnav_likelihood ParseLikelihood(const std::string &name, const std::string &key) {
  if (name == "gaussian_unit_variance" || name == "gaussian") return LNAV_LIKELIHOOD_GAUSSIAN;
  if (name == "bernoulli") return LNAV_LIKELIHOOD_BERNOULLI;
  throw UsageError("config key '" + key +
                   "' must be \"gaussian_unit_variance\" or \"bernoulli\"");
}

template <typename T>
Setter Unsigned(T &field) {
  return [&field](const json &v, const std::string &k) {
    field = static_cast<T>(AsUnsigned(v, k));
  };
}

Setter Real(double &field) {
  return [&field](const json &v, const std::string &k) { field = AsReal(v, k); };
}

Setter Flag(int &field) {
  return [&field](const json &v, const std::string &k) { field = AsBool(v, k) ? 1 : 0; };
}

Setter Text(std::string &field) {
  return [&field](const json &v, const std::string &k) { field = AsString(v, k); };
}

std::map<std::string, std::map<std::string, Setter>> Schema(RunConfig &c) {
  return {
      {"world",
       {{"num_rooms", Unsigned(c.world.num_rooms)},
        {"frames", Unsigned(c.world.frames)},
        {"height", Unsigned(c.world.height)},
        {"width", Unsigned(c.world.width)},
        {"channels", Unsigned(c.world.channels)},
        {"transition_width", Real(c.world.transition_width)},
        {"seed", Unsigned(c.world.seed)},
        {"alias_pairs",
         [&c](const json &v, const std::string &k) {
           if (!v.is_array()) throw UsageError("config key '" + k + "' must be a list");
           c.alias_pairs.clear();
           for (std::size_t i = 0; i < v.size(); ++i) {
             const std::string item = k + "[" + std::to_string(i) + "]";
             const auto pair = AsSizes(v[i], item);
             if (pair.size() != 2) {
               throw UsageError("config key '" + item + "' must hold two room indices");
             }
             c.alias_pairs.insert(c.alias_pairs.end(), pair.begin(), pair.end());
           }
         }}}},
      {"model",
       {{"latent_dim", Unsigned(c.model.latent_dim)},
        {"encoder_hidden",
         [&c](const json &v, const std::string &k) { c.encoder_hidden = AsSizes(v, k); }},
        {"decoder_hidden",
         [&c](const json &v, const std::string &k) { c.decoder_hidden = AsSizes(v, k); }},
        {"likelihood",
         [&c](const json &v, const std::string &k) {
           c.model.likelihood = ParseLikelihood(AsString(v, k), k);
         }}}},
      {"train",
       {{"batch_size", Unsigned(c.train.batch_size)},
        {"epochs", Unsigned(c.train.epochs)},
        {"mc_samples", Unsigned(c.train.mc_samples)},
        {"seed", Unsigned(c.train.seed)},
        {"learning_rate", Real(c.train.learning_rate)},
        {"decay", Real(c.train.decay)},
        {"epsilon", Real(c.train.epsilon)},
        {"shuffle", Flag(c.train.shuffle)}}},
      {"planner",
       {{"points", Unsigned(c.planner.points)},
        {"alpha", Real(c.planner.alpha)},
        {"max_sweeps", Unsigned(c.planner.max_sweeps)},
        {"tol", Real(c.planner.tol)},
        {"norm_eps", Real(c.planner.norm_eps)},
        {"squared_norm", Flag(c.planner.squared_norm)}}},
      {"slice",
       {{"dim_a", Unsigned(c.slice.dim_a)},
        {"dim_b", Unsigned(c.slice.dim_b)},
        {"grid", Unsigned(c.slice.grid)},
        {"lo", Real(c.slice.lo)},
        {"hi", Real(c.slice.hi)},
        {"fixed", Real(c.slice.fixed)}}},
      {"oracle", {{"k", Unsigned(c.oracle_k)}}},
      {"eval", {{"bins", Unsigned(c.eval_bins)}, {"seed", Unsigned(c.eval_seed)}}},
      {"ingest",
       {{"height", Unsigned(c.ingest_height)}, {"width", Unsigned(c.ingest_width)}}},
      {"gradcheck",
       {{"trials", Unsigned(c.gradcheck.trials)},
        {"seed", Unsigned(c.gradcheck.seed)},
        {"step", Real(c.gradcheck.step)},
        {"tolerance", Real(c.gradcheck.tolerance)}}},
      {"paths",
       {{"dataset", Text(c.paths.dataset)},
        {"checkpoint", Text(c.paths.checkpoint)},
        {"path", Text(c.paths.path)},
        {"route", Text(c.paths.route)},
        {"reference", Text(c.paths.reference)},
        {"frames_dir", Text(c.paths.frames_dir)},
        {"out", Text(c.paths.out)}}},
  };
}

void LoadConfigFile(const std::string &file, RunConfig &c) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + file + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw UsageError("config file '" + file + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file '" + file + "' must hold an object");
  auto schema = Schema(c);
  for (const auto &[section, body] : doc.items()) {
    const auto s = schema.find(section);
    if (s == schema.end()) throw UsageError("unknown config key '" + section + "'");
    if (!body.is_object()) {
      throw UsageError("config key '" + section + "' must hold an object");
    }
    for (const auto &[key, value] : body.items()) {
      const std::string full = section + "." + key;
      const auto setter = s->second.find(key);
      if (setter == s->second.end()) throw UsageError("unknown config key '" + full + "'");
      setter->second(value, full);
    }
  }
}

// ---- output staging ----

/// Collects a command's outputs in a private directory and moves them into
/// place only when the whole command succeeded.
class Staging {
 public:
  explicit Staging(const std::string &out_dir) : out_(out_dir) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw LibraryError("cannot create output directory '" + out_ + "'");
    dir_ = fs::path(out_) / (".lnav-staging-" + std::to_string(::getpid()));
    fs::remove_all(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw LibraryError("cannot create staging directory in '" + out_ + "'");
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  /// Where a command writes output `name` before Commit.
  std::string Stage(const std::string &name) {
    names_.push_back(name);
    return (dir_ / name).string();
  }

  void WriteText(const std::string &name, const std::string &text) {
    std::ofstream f(Stage(name), std::ios::binary);
    f << text;
    if (!f.flush()) throw LibraryError("cannot write '" + name + "'");
  }

  std::string Final(const std::string &name) const {
    return (fs::path(out_) / name).string();
  }

  void Commit() {
    for (const auto &name : names_) {
      std::error_code ec;
      fs::rename(dir_ / name, fs::path(out_) / name, ec);
      if (ec) throw LibraryError("cannot move '" + name + "' into '" + out_ + "'");
    }
    names_.clear();
  }

 private:
  std::string out_;
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string Require(const std::string &value, const char *flag) {
  if (value.empty()) throw UsageError(std::string("missing required input ") + flag);
  return value;
}

std::string Real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

const char *ImageExtension(std::uint64_t channels) {
  return channels == 1 ? ".pgm" : ".ppm";
}

// ---- commands ----

void CmdGenData(RunConfig &c) {
  c.Bind();
  Dataset ds;
  Check(lnav_dataset_generate(&c.world, ds.out()));
  lnav_dataset_info info{};
  Check(lnav_dataset_info_get(ds.get(), &info));
  Staging out(c.paths.out);
  Check(lnav_dataset_save(ds.get(), out.Stage("dataset.json").c_str()));
  out.Stage("dataset.raw");
  out.Commit();
  std::printf("frames: %" PRIu64 "\nchecksum: %s\nmanifest: %s\n", info.frames,
              Hex(info.checksum).c_str(), out.Final("dataset.json").c_str());
}

void CmdIngest(RunConfig &c) {
  Dataset ds;
  Check(lnav_dataset_ingest(Require(c.paths.frames_dir, "--frames-dir").c_str(),
                            c.ingest_height, c.ingest_width, ds.out()));
  lnav_dataset_info info{};
  Check(lnav_dataset_info_get(ds.get(), &info));
  Staging out(c.paths.out);
  Check(lnav_dataset_save(ds.get(), out.Stage("dataset.json").c_str()));
  out.Stage("dataset.raw");
  out.Commit();
  std::printf("frames: %" PRIu64 "\nchecksum: %s\nmanifest: %s\n", info.frames,
              Hex(info.checksum).c_str(), out.Final("dataset.json").c_str());
}

void CmdTrain(RunConfig &c, bool progress) {
  c.Bind();
  Dataset ds;
  Check(lnav_dataset_load(Require(c.paths.dataset, "--dataset").c_str(), ds.out()));
  lnav_dataset_info info{};
  Check(lnav_dataset_info_get(ds.get(), &info));
  c.model.height = info.height;
  c.model.width = info.width;
  c.model.channels = info.channels;
  Model model;
  Check(lnav_model_init(&c.model, c.train.seed, model.out()));
  std::vector<double> history(c.train.epochs);
  auto report = [](std::uint64_t epoch, double loss, void *) {
    std::fprintf(stderr, "epoch %" PRIu64 " mean_loss %.6f\n", epoch + 1, loss);
  };
  Check(lnav_model_train(model.get(), ds.get(), &c.train, history.data(),
                         progress ? +report : nullptr, nullptr));
  std::string loss = "# epoch mean_loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    loss += std::to_string(e + 1) + " " + Real17(history[e]) + "\n";
  }
  lnav_model_info mi{};
  Check(lnav_model_info_get(model.get(), &mi));
  Staging out(c.paths.out);
  Check(lnav_model_save(model.get(), out.Stage("model.ckpt").c_str()));
  out.WriteText("loss.txt", loss);
  out.Commit();
  std::printf("parameters: %" PRIu64 "\nchecksum: %s\n", mi.parameter_count,
              Hex(mi.checksum).c_str());
  if (!history.empty()) {
    std::printf("first_epoch_loss: %.6f\nfinal_epoch_loss: %.6f\n", history.front(),
                history.back());
  }
  std::printf("checkpoint: %s\n", out.Final("model.ckpt").c_str());
}

void CmdSlice(RunConfig &c) {
  Model model;
  Check(lnav_model_load(Require(c.paths.checkpoint, "--checkpoint").c_str(), model.out()));
  lnav_model_info mi{};
  Check(lnav_model_info_get(model.get(), &mi));
  const auto &s = c.slice;
  if (!(s.dim_a < s.dim_b && s.dim_b < mi.latent_dim)) {
    throw UsageError("slice dims need 0 <= dim_a < dim_b < latent_dim (" +
                     std::to_string(mi.latent_dim) + ")");
  }
  if (s.grid < 2) throw UsageError("slice grid must be >= 2");
  const std::uint64_t h = s.grid * mi.height;
  const std::uint64_t w = s.grid * mi.width;
  std::vector<double> pixels(h * w * mi.channels);
  Check(lnav_model_slice(model.get(), s.dim_a, s.dim_b, s.grid, s.lo, s.hi, s.fixed,
                         pixels.data(), pixels.size()));
  Staging out(c.paths.out);
  const std::string name = std::string("slice") + ImageExtension(mi.channels);
  Check(lnav_image_write(out.Stage(name).c_str(), pixels.data(), h, w, mi.channels));
  out.Commit();
  std::printf("tiles: %" PRIu64 "x%" PRIu64 "\nimage: %s\n", s.grid, s.grid,
              out.Final(name).c_str());
}

void CmdPlan(RunConfig &c, std::uint64_t start, std::uint64_t end) {
  Model model;
  Check(lnav_model_load(Require(c.paths.checkpoint, "--checkpoint").c_str(), model.out()));
  Dataset ds;
  Check(lnav_dataset_load(Require(c.paths.dataset, "--dataset").c_str(), ds.out()));
  Path path;
  Check(lnav_plan_frames(model.get(), ds.get(), start, end, &c.planner, path.out()));
  lnav_path_info pi{};
  Check(lnav_path_info_get(path.get(), &pi));
  std::vector<double> history(pi.sweeps);
  Check(lnav_path_length_history(path.get(), history.data(), history.size()));
  std::string text = "# sweep length\n0 " + Real17(pi.initial_length) + "\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    text += std::to_string(i + 1) + " " + Real17(history[i]) + "\n";
  }
  Staging out(c.paths.out);
  Check(lnav_path_save(path.get(), out.Stage("path.txt").c_str()));
  out.WriteText("length_history.txt", text);
  out.Commit();
  const double final_length = history.empty() ? pi.initial_length : history.back();
  std::printf("points: %" PRIu64 "\nsweeps: %" PRIu64
              "\ninitial_length: %.6f\nfinal_length: %.6f\nconverged: %s\n",
              pi.points, pi.sweeps, pi.initial_length, final_length,
              pi.converged ? "yes" : "no");
  if (pi.alpha_too_large) {
    std::fprintf(stderr,
                 "warning: path length increased during a sweep; alpha is too large\n");
  }
  std::printf("path: %s\n", out.Final("path.txt").c_str());
}

void CmdRoute(RunConfig &c) {
  Model model;
  Check(lnav_model_load(Require(c.paths.checkpoint, "--checkpoint").c_str(), model.out()));
  Dataset ds;
  Check(lnav_dataset_load(Require(c.paths.dataset, "--dataset").c_str(), ds.out()));
  Path path;
  Check(lnav_path_load(Require(c.paths.path, "--path").c_str(), path.out()));
  Route route;
  Check(lnav_route_match(model.get(), ds.get(), path.get(), route.out()));
  lnav_dataset_info info{};
  Check(lnav_dataset_info_get(ds.get(), &info));
  std::uint64_t distinct = 0, total = 0;
  Check(lnav_route_categories(route.get(), &distinct, &total));
  const char *ext = ImageExtension(info.channels);
  Staging out(c.paths.out);
  Check(lnav_route_save(route.get(), out.Stage("route.txt").c_str()));
  const std::string decoded = std::string("route_decoded") + ext;
  const std::string matched = std::string("route_matched") + ext;
  Check(lnav_route_write_strips(model.get(), ds.get(), path.get(), route.get(),
                                out.Stage(decoded).c_str(), out.Stage(matched).c_str()));
  out.Commit();
  std::printf("frames: %" PRIu64 "\ncategories: %" PRIu64 "/%" PRIu64 "\n", total,
              distinct, total);
  if (info.has_ground_truth) {
    double gap = 0.0;
    Check(lnav_route_gap(route.get(), ds.get(), &gap));
    std::printf("max_geo_gap: %.6f\n", gap);
  }
  std::printf("route: %s\n", out.Final("route.txt").c_str());
}

void CmdOracle(RunConfig &c, std::uint64_t start, std::uint64_t end) {
  Model model;
  Check(lnav_model_load(Require(c.paths.checkpoint, "--checkpoint").c_str(), model.out()));
  Dataset ds;
  Check(lnav_dataset_load(Require(c.paths.dataset, "--dataset").c_str(), ds.out()));
  Route route;
  Check(lnav_route_oracle(model.get(), ds.get(), start, end, c.oracle_k, route.out()));
  lnav_dataset_info info{};
  Check(lnav_dataset_info_get(ds.get(), &info));
  std::uint64_t distinct = 0, total = 0;
  Check(lnav_route_categories(route.get(), &distinct, &total));
  Staging out(c.paths.out);
  Check(lnav_route_save(route.get(), out.Stage("oracle_route.txt").c_str()));
  const std::string matched = std::string("oracle_matched") + ImageExtension(info.channels);
  Check(lnav_route_write_strips(model.get(), ds.get(), nullptr, route.get(), nullptr,
                                out.Stage(matched).c_str()));
  out.Commit();
  std::printf("frames: %" PRIu64 "\ncategories: %" PRIu64 "/%" PRIu64 "\n", total,
              distinct, total);
  if (info.has_ground_truth) {
    double gap = 0.0;
    Check(lnav_route_gap(route.get(), ds.get(), &gap));
    std::printf("max_geo_gap: %.6f\n", gap);
  }
  std::printf("route: %s\n", out.Final("oracle_route.txt").c_str());
}

void CmdEval(RunConfig &c) {
  Model model;
  Check(lnav_model_load(Require(c.paths.checkpoint, "--checkpoint").c_str(), model.out()));
  Dataset ds;
  Check(lnav_dataset_load(Require(c.paths.dataset, "--dataset").c_str(), ds.out()));
  Route geodesic, reference;
  Check(lnav_route_load(Require(c.paths.route, "--route").c_str(), geodesic.out()));
  Check(lnav_route_load(Require(c.paths.reference, "--reference").c_str(),
                        reference.out()));
  Path path;
  if (!c.paths.path.empty()) Check(lnav_path_load(c.paths.path.c_str(), path.out()));
  char *text = nullptr;
  Check(lnav_evaluate(model.get(), ds.get(), geodesic.get(), reference.get(), path.get(),
                      c.eval_seed, c.eval_bins, &text));
  const std::string report(text);
  lnav_string_free(text);
  Staging out(c.paths.out);
  out.WriteText("report.json", report);
  out.Commit();
  const json j = json::parse(report);
  std::printf("category_ratio: %s\n", j["category_ratio"].get<std::string>().c_str());
  for (const char *which : {"geodesic", "reference"}) {
    const auto &r = j[which];
    std::printf("%s: categories %s", which, r["category_ratio"].get<std::string>().c_str());
    if (!r["max_geo_gap"].is_null()) {
      std::printf(", max_geo_gap %.6f", r["max_geo_gap"].get<double>());
    }
    std::printf("\n");
  }
  std::printf("report: %s\n", out.Final("report.json").c_str());
}

bool CmdGradcheck(RunConfig &c) {
  lnav_gradcheck_suite suites[8];
  std::uint64_t count = 0;
  Check(lnav_gradcheck(&c.gradcheck, suites, 8, &count));
  bool ok = true;
  for (std::uint64_t i = 0; i < count && i < 8; ++i) {
    const auto &s = suites[i];
    std::printf("%-9s %s  worst_rel_err %.3e  trials %" PRIu64 "  coordinates %" PRIu64
                "\n",
                s.name, s.passed ? "PASS" : "FAIL", s.worst_relative_error, s.trials,
                s.coordinates);
    ok = ok && s.passed;
  }
  return ok;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"latentnav: learned latent maps and geodesic routes over image tours"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lnav_version()));

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto common = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_file, "JSON run configuration");
    cmd->add_option("--seed", seed, "Seed for this command's randomness");
    cmd->add_option("--out", out_dir, "Output directory (default .)");
  };

  std::optional<std::string> dataset, checkpoint, path_file, route_file, reference_file,
      frames_dir;
  std::optional<std::uint64_t> frames, num_rooms, epochs, points, max_sweeps, grid, dim_a,
      dim_b, k, bins, trials, height, width;
  std::optional<double> alpha, lr, lo, hi, fixed;
  std::optional<std::string> likelihood;
  std::uint64_t start = 0, end = 0;
  bool squared = false, progress = false, corrupt = false;

  auto *gen = app.add_subcommand("gen-data", "Render a synthetic tour dataset");
  common(gen);
  gen->add_option("--frames", frames, "Number of frames");
  gen->add_option("--rooms", num_rooms, "Number of rooms");

  auto *ingest = app.add_subcommand("ingest", "Import a directory of PPM/PGM frames");
  common(ingest);
  ingest->add_option("--frames-dir", frames_dir, "Directory of frames");
  ingest->add_option("--height", height, "Target frame height");
  ingest->add_option("--width", width, "Target frame width");

  auto *train = app.add_subcommand("train", "Train a VAE on a dataset");
  common(train);
  train->add_option("--dataset", dataset, "Dataset manifest");
  train->add_option("--epochs", epochs, "Training epochs");
  train->add_option("--learning-rate", lr, "RMSprop learning rate");
  train->add_option("--likelihood", likelihood, "gaussian_unit_variance or bernoulli");
  train->add_flag("--progress", progress, "Print per-epoch loss to stderr");

  auto *slice = app.add_subcommand("slice", "Render a 2D slice of the latent space");
  common(slice);
  slice->add_option("--checkpoint", checkpoint, "Model checkpoint");
  slice->add_option("--dim-a", dim_a, "Row latent dimension");
  slice->add_option("--dim-b", dim_b, "Column latent dimension");
  slice->add_option("--grid", grid, "Grid size G");
  slice->add_option("--lo", lo, "First grid value");
  slice->add_option("--hi", hi, "Last grid value");
  slice->add_option("--fixed", fixed, "Value of the other latent dimensions");

  auto *plan = app.add_subcommand("plan", "Plan a geodesic between two frames");
  common(plan);
  plan->add_option("--checkpoint", checkpoint, "Model checkpoint");
  plan->add_option("--dataset", dataset, "Dataset manifest");
  plan->add_option("--start", start, "Start frame index")->required();
  plan->add_option("--end", end, "End frame index")->required();
  plan->add_option("--points", points, "Path points N");
  plan->add_option("--alpha", alpha, "Step size");
  plan->add_option("--max-sweeps", max_sweeps, "Sweep limit");
  plan->add_flag("--squared-norm", squared, "Sum squared segment lengths");

  auto *route = app.add_subcommand("route", "Match a latent path to dataset frames");
  common(route);
  route->add_option("--checkpoint", checkpoint, "Model checkpoint");
  route->add_option("--dataset", dataset, "Dataset manifest");
  route->add_option("--path", path_file, "Latent path file");

  auto *eval = app.add_subcommand("eval", "Score a route against a reference route");
  common(eval);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint");
  eval->add_option("--dataset", dataset, "Dataset manifest");
  eval->add_option("--route", route_file, "Geodesic route file");
  eval->add_option("--reference", reference_file, "Reference route file");
  eval->add_option("--path", path_file, "Geodesic latent path (optional)");
  eval->add_option("--bins", bins, "Histogram bins");

  auto *oracle = app.add_subcommand("oracle", "Shortest route over the frame graph");
  common(oracle);
  oracle->add_option("--checkpoint", checkpoint, "Model checkpoint");
  oracle->add_option("--dataset", dataset, "Dataset manifest");
  oracle->add_option("--start", start, "Start frame index")->required();
  oracle->add_option("--end", end, "End frame index")->required();
  oracle->add_option("--k", k, "Nearest neighbors per frame");

  auto *grad = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  common(grad);
  grad->add_option("--trials", trials, "Random cases per suite");
  grad->add_flag("--corrupt-gradient", corrupt, "Test hook: perturb one analytic entry");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c;
    if (!config_file.empty()) LoadConfigFile(config_file, c);
    auto set = [](auto &field, const auto &flag) {
      if (flag) field = *flag;
    };
    set(c.paths.out, out_dir);
    set(c.paths.dataset, dataset);
    set(c.paths.checkpoint, checkpoint);
    set(c.paths.path, path_file);
    set(c.paths.route, route_file);
    set(c.paths.reference, reference_file);
    set(c.paths.frames_dir, frames_dir);
    set(c.world.frames, frames);
    set(c.world.num_rooms, num_rooms);
    set(c.train.epochs, epochs);
    set(c.train.learning_rate, lr);
    if (likelihood) c.model.likelihood = ParseLikelihood(*likelihood, "--likelihood");
    set(c.planner.points, points);
    set(c.planner.alpha, alpha);
    set(c.planner.max_sweeps, max_sweeps);
    if (squared) c.planner.squared_norm = 1;
    set(c.slice.grid, grid);
    set(c.slice.dim_a, dim_a);
    set(c.slice.dim_b, dim_b);
    set(c.slice.lo, lo);
    set(c.slice.hi, hi);
    set(c.slice.fixed, fixed);
    set(c.oracle_k, k);
    set(c.eval_bins, bins);
    set(c.ingest_height, height);
    set(c.ingest_width, width);
    set(c.gradcheck.trials, trials);
    if (corrupt) c.gradcheck.corrupt = 1;
    if (seed) {
      c.world.seed = *seed;
      c.train.seed = *seed;
      c.eval_seed = *seed;
      c.gradcheck.seed = *seed;
    }

    if (*gen) CmdGenData(c);
    if (*ingest) CmdIngest(c);
    if (*train) CmdTrain(c, progress);
    if (*slice) CmdSlice(c);
    if (*plan) CmdPlan(c, start, end);
    if (*route) CmdRoute(c);
    if (*eval) CmdEval(c);
    if (*oracle) CmdOracle(c, start, end);
    if (*grad && !CmdGradcheck(c)) {
      std::fprintf(stderr, "error: gradient check failed\n");
      return 1;
    }
  } catch (const UsageError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
