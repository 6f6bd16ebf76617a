// Copyright 2026 The gdpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// gdpkit command-line front end.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "gdpkit/accounting/gdp_budget.h"
#include "gdpkit/common/binary_io.h"
#include "gdpkit/csbm/csbm.h"
#include "gdpkit/graph/dataset_io.h"
#include "gdpkit/graph/graph_ops.h"
#include "gdpkit/oracle/sensitivity_oracle.h"
#include "gdpkit/pipelines/pipelines.h"
#include "gdpkit/version.h"
#include "nlohmann/json.hpp"

namespace gdpkit {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInvalid = 2;

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return kExitInvalid;
}

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::Status WriteJson(const std::string& path, const json& j) {
  return WriteFileBytes(path, j.dump(2) + "\n");
}

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args)
      : command_(std::move(command)),
        args_(std::move(args)),
        start_(std::chrono::steady_clock::now()) {}

  void set_seed(uint64_t seed) { seed_ = seed; }
  void AddOutput(const std::string& path) { outputs_.insert(path); }

  absl::Status Write(const std::string& dir) const {
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    json j;
    j["command"] = command_;
    j["arguments"] = args_;
    j["seed"] = seed_.has_value() ? json(*seed_) : json(nullptr);
    j["version"] = kVersion;
    j["duration_seconds"] = seconds;
    j["outputs"] = json(std::vector<std::string>(outputs_.begin(),
                                                 outputs_.end()));
    if (absl::Status s = EnsureDir(dir); !s.ok()) return s;
    return WriteJson((fs::path(dir) / "manifest.json").string(), j);
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::optional<uint64_t> seed_;
  std::set<std::string> outputs_;
};

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string model = "dpdgc";
  std::string relation = "node";
  int k = -1;
  int D = -1;
  int hops = 1;
  double c = 1.0;
  double epsilon = 1.0;
  double delta = 1e-5;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::string out = ".";
};

absl::StatusOr<AdjacencyRelation> RelationFromArgs(const std::string& name,
                                                   int k) {
  if (name == "nk" && k < 0) {
    return absl::InvalidArgumentError("--relation nk needs --k");
  }
  return AdjacencyRelation::Parse(name, k);
}

int RunCalibrate(const CalibrateArgs& a, Manifest& manifest) {
  absl::StatusOr<ModelKind> model = ParseModelKind(a.model);
  if (!model.ok()) return Fail(model.status());
  absl::StatusOr<AdjacencyRelation> relation = RelationFromArgs(a.relation, a.k);
  if (!relation.ok()) return Fail(relation.status());
  BudgetTemplate tmpl;
  tmpl.model = *model;
  tmpl.relation = *relation;
  tmpl.params.c = a.c;
  tmpl.params.hops = a.hops;
  if (a.D > 0) tmpl.params.degree_bound = DegreeBound{a.D};
  absl::StatusOr<RdpCurve> g1 = RdpCurve::Linear(a.gamma1);
  absl::StatusOr<RdpCurve> g2 = RdpCurve::Linear(a.gamma2);
  if (!g1.ok()) return Fail(g1.status());
  if (!g2.ok()) return Fail(g2.status());
  tmpl.gamma1 = *g1;
  tmpl.gamma2 = *g2;
  absl::StatusOr<double> s = CalibrateNoise({a.epsilon, a.delta}, tmpl);
  if (!s.ok()) return Fail(s.status());
  MechanismParams params = tmpl.params;
  params.s = *s;
  absl::StatusOr<GdpReport> report = GdpBudget(
      *model, *relation, params, tmpl.gamma1, tmpl.gamma2, a.delta);
  if (!report.ok()) return Fail(report.status());
  json j = ReportToJson(*report);
  j["s"] = *s;
  if (absl::Status st = EnsureDir(a.out); !st.ok()) return Fail(st);
  const std::string path = (fs::path(a.out) / "report.json").string();
  if (absl::Status st = WriteJson(path, j); !st.ok()) return Fail(st);
  manifest.AddOutput("report.json");
  std::printf("%s\n", FormatDouble(*s).c_str());
  return kExitOk;
}

// --------------------------------------------------------------------- csbm

int RunCsbm(const CsbmParams& p, const std::string& out, Manifest& manifest) {
  absl::StatusOr<GraphDataset> g = GenerateCsbm(p);
  if (!g.ok()) return Fail(g.status());
  if (absl::Status s = WriteCsbm(*g, p, out); !s.ok()) return Fail(s);
  for (const char* f : {"meta.json", "edges.csv", "features.csv", "labels.csv"}) {
    manifest.AddOutput(f);
  }
  manifest.set_seed(p.seed);
  return kExitOk;
}

// ------------------------------------------------------------------- ingest

struct IngestArgs {
  std::string edges;
  std::string content;
  std::string out;
  bool directed = false;
  int m = -1;
};

std::vector<std::string> Tokens(absl::string_view line) {
  std::vector<std::string> out;
  for (absl::string_view t :
       absl::StrSplit(line, absl::ByAnyChar(" \t,"), absl::SkipEmpty())) {
    out.emplace_back(t);
  }
  return out;
}

// Edge lists with two id columns (any separator of space, tab or comma) and
// optional LINQS-style content files "id f_1 ... f_F label". Ids are
// renumbered in order of first appearance, content first.
int RunIngest(const IngestArgs& a, Manifest& manifest) {
  std::map<std::string, int> ids;
  std::vector<std::string> order;
  auto id_of = [&](const std::string& key) {
    auto [it, inserted] = ids.emplace(key, static_cast<int>(order.size()));
    if (inserted) order.push_back(key);
    return it->second;
  };
  std::vector<std::vector<double>> feature_rows;
  std::vector<std::string> label_names;
  if (!a.content.empty()) {
    absl::StatusOr<std::string> text = ReadFileBytes(a.content);
    if (!text.ok()) return Fail(text.status());
    for (absl::string_view line : absl::StrSplit(*text, '\n')) {
      std::vector<std::string> t = Tokens(line);
      if (t.size() < 2) continue;
      std::vector<double> row;
      for (size_t i = 1; i + 1 < t.size(); ++i) {
        double v;
        if (!absl::SimpleAtod(t[i], &v)) {
          return Fail(absl::InvalidArgumentError(
              absl::StrCat("content: bad feature '", t[i], "'")));
        }
        row.push_back(v);
      }
      if (!feature_rows.empty() && row.size() != feature_rows[0].size()) {
        return Fail(absl::InvalidArgumentError("content: ragged feature rows"));
      }
      if (ids.count(t[0])) {
        return Fail(absl::InvalidArgumentError(
            absl::StrCat("content: duplicate id ", t[0])));
      }
      id_of(t[0]);
      feature_rows.push_back(std::move(row));
      label_names.push_back(t.back());
    }
  }
  const bool have_content = !feature_rows.empty();
  absl::StatusOr<std::string> text = ReadFileBytes(a.edges);
  if (!text.ok()) return Fail(text.status());
  std::vector<std::pair<int, int>> edges;
  int64_t skipped = 0;
  for (absl::string_view line : absl::StrSplit(*text, '\n')) {
    std::vector<std::string> t = Tokens(line);
    if (t.size() < 2 || t[0] == "src") continue;
    if (have_content && (!ids.count(t[0]) || !ids.count(t[1]))) {
      ++skipped;
      continue;
    }
    const int u = id_of(t[0]);
    const int v = id_of(t[1]);
    if (u == v) continue;
    edges.emplace_back(u, v);
    if (!a.directed) edges.emplace_back(v, u);
  }
  const int n = static_cast<int>(order.size());
  if (n == 0) return Fail(absl::InvalidArgumentError("no nodes found"));
  std::vector<std::string> names(label_names);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<int> classes(n, 0);
  int num_classes = 1;
  if (have_content) {
    num_classes = std::max<int>(1, names.size());
    for (int i = 0; i < n; ++i) {
      classes[i] = static_cast<int>(
          std::lower_bound(names.begin(), names.end(), label_names[i]) -
          names.begin());
    }
  }
  Matrix features = Matrix::Zero(n, have_content ? feature_rows[0].size() : 0);
  for (int i = 0; i < static_cast<int>(feature_rows.size()); ++i) {
    for (size_t f = 0; f < feature_rows[i].size(); ++f) {
      features(i, f) = feature_rows[i][f];
    }
  }
  absl::StatusOr<GraphDataset> d =
      MakeDataset(Adjacency::FromEdges(n, edges), std::move(features),
                  std::move(classes), num_classes, a.m > 0 ? a.m : n);
  if (!d.ok()) return Fail(d.status());
  json extra;
  extra["ingest"] = {{"edges_file", fs::path(a.edges).filename().string()},
                     {"skipped_edges", skipped},
                     {"class_names", names}};
  if (absl::Status s = WriteDataset(*d, a.out, a.directed, extra); !s.ok()) {
    return Fail(s);
  }
  for (const char* f : {"meta.json", "edges.csv", "features.csv", "labels.csv"}) {
    manifest.AddOutput(f);
  }
  return kExitOk;
}

// -------------------------------------------------------------------- stats

int RunStats(const std::string& data, const std::string& out,
             Manifest& manifest) {
  absl::StatusOr<LoadedDataset> loaded = ReadDataset(data);
  if (!loaded.ok()) return Fail(loaded.status());
  const GraphDataset& d = loaded->dataset;
  json j;
  j["nodes"] = d.n();
  j["edges"] = d.adjacency.num_entries();
  j["features"] = d.num_features();
  j["classes"] = d.num_classes();
  j["max_out_degree"] = d.adjacency.MaxColumnSum();
  absl::StatusOr<double> density = EdgeDensity(d);
  j["density"] = density.ok() ? json(*density) : json(nullptr);
  absl::StatusOr<double> homophily = Homophily(d);
  j["homophily"] = homophily.ok() ? json(*homophily) : json(nullptr);
  std::cout << j.dump(2) << "\n";
  if (absl::Status s = EnsureDir(out); !s.ok()) return Fail(s);
  if (absl::Status s = WriteJson((fs::path(out) / "stats.json").string(), j);
      !s.ok()) {
    return Fail(s);
  }
  manifest.AddOutput("stats.json");
  return kExitOk;
}

// -------------------------------------------------------------- sensitivity

struct SensitivityArgs {
  std::string design = "dpdgc";
  std::string relation = "node";
  int n = 6;
  int D = -1;
  int k = -1;
  double c = 1.0;
  int h = 8;
  int r = 0;
  bool exhaustive = false;
  int64_t trials = 10000;
  std::string h_mode = "adversarial";
  bool include_row_r = false;
  uint64_t seed = 0;
  std::string out = ".";
};

int RunSensitivity(const SensitivityArgs& a, Manifest& manifest) {
  absl::StatusOr<ModelKind> design = ParseModelKind(a.design);
  if (!design.ok()) return Fail(design.status());
  absl::StatusOr<AdjacencyRelation> relation = RelationFromArgs(a.relation, a.k);
  if (!relation.ok()) return Fail(relation.status());
  OracleConfig cfg;
  cfg.n = a.n;
  cfg.relation = *relation;
  cfg.r = a.r;
  if (a.D > 0) cfg.degree_bound = DegreeBound{a.D};
  cfg.c = a.c;
  cfg.h = a.h;
  cfg.exhaustive = a.exhaustive;
  cfg.trials = a.trials;
  cfg.include_row_r = a.include_row_r;
  cfg.seed = a.seed;
  if (a.h_mode == "adversarial") {
    cfg.h_mode = GapHMode::kAdversarial;
  } else if (a.h_mode == "random") {
    cfg.h_mode = GapHMode::kRandom;
  } else if (a.h_mode == "equal") {
    cfg.h_mode = GapHMode::kEqual;
  } else {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("unknown --h-mode '", a.h_mode, "'")));
  }
  absl::StatusOr<SensitivityReport> report;
  if (*design == ModelKind::kDpdgc) {
    report = BruteforceDpdgc(cfg);
  } else if (*design == ModelKind::kGap) {
    report = BruteforceGap(cfg);
  } else {
    return Fail(absl::InvalidArgumentError("--design must be dpdgc or gap"));
  }
  if (!report.ok()) return Fail(report.status());
  json j = SensitivityReportToJson(*report);
  std::cout << j.dump(2) << "\n";
  if (absl::Status s = EnsureDir(a.out); !s.ok()) return Fail(s);
  if (absl::Status s =
          WriteJson((fs::path(a.out) / "sensitivity.json").string(), j);
      !s.ok()) {
    return Fail(s);
  }
  manifest.AddOutput("sensitivity.json");
  manifest.set_seed(a.seed);
  return report->sound() ? kExitOk : kExitVerification;
}

// ------------------------------------------------------------ train / sweep

// Keys of a run configuration that are not pipeline settings.
const std::set<std::string>& ReservedKeys() {
  static const auto* keys = new std::set<std::string>{
      "csbm", "dataset", "sweep", "overrides", "seeds"};
  return *keys;
}

absl::StatusOr<json> ParseValue(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

absl::Status ApplySet(json& config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("--set expects key=value, got '", assignment, "'"));
  }
  const std::string key = assignment.substr(0, eq);
  absl::StatusOr<json> value = ParseValue(assignment.substr(eq + 1));
  if (!value.ok()) return value.status();
  json* node = &config;
  std::vector<std::string> parts = absl::StrSplit(key, '.');
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
      (*node)[parts[i]] = json::object();
    }
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = *value;
  return absl::OkStatus();
}

absl::StatusOr<json> LoadConfig(const std::string& path,
                                const std::vector<std::string>& sets) {
  absl::StatusOr<std::string> text = ReadFileBytes(path);
  if (!text.ok()) return text.status();
  json config = json::parse(*text, nullptr, false);
  if (config.is_discarded() || !config.is_object()) {
    return absl::InvalidArgumentError(path + " is not a JSON object");
  }
  for (const std::string& s : sets) {
    if (absl::Status st = ApplySet(config, s); !st.ok()) return st;
  }
  return config;
}

json PipelinePart(const json& config) {
  json out = json::object();
  for (const auto& [key, value] : config.items()) {
    if (!ReservedKeys().count(key)) out[key] = value;
  }
  return out;
}

absl::StatusOr<CsbmParams> CsbmFromJson(const json& j, uint64_t run_seed) {
  CsbmParams p;
  p.seed = run_seed;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") {
        p.n = value.get<int>();
      } else if (key == "f") {
        p.f = value.get<int>();
      } else if (key == "d") {
        p.d = value.get<double>();
      } else if (key == "phi") {
        p.phi = value.get<double>();
      } else if (key == "eps_arc") {
        p.eps_arc = value.get<double>();
      } else if (key == "seed") {
        p.seed = value.get<uint64_t>();
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown csbm key '", key, "'"));
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad csbm value: ", e.what()));
  }
  return p;
}

// The dataset named by the configuration. A "csbm" block without a seed is
// regenerated per run seed.
absl::StatusOr<GraphDataset> LoadRunData(const json& config,
                                         uint64_t run_seed) {
  if (config.contains("dataset")) {
    if (!config["dataset"].is_string()) {
      return absl::InvalidArgumentError("dataset must be a directory path");
    }
    absl::StatusOr<LoadedDataset> d =
        ReadDataset(config["dataset"].get<std::string>());
    if (!d.ok()) return d.status();
    return d->dataset;
  }
  if (config.contains("csbm")) {
    absl::StatusOr<CsbmParams> p = CsbmFromJson(config["csbm"], run_seed);
    if (!p.ok()) return p.status();
    return GenerateCsbm(*p);
  }
  return absl::InvalidArgumentError(
      "configuration needs a \"dataset\" path or a \"csbm\" block");
}

absl::StatusOr<std::vector<uint64_t>> SeedList(const json& config,
                                               const json& pipeline) {
  std::vector<uint64_t> seeds;
  try {
    if (config.contains("seeds")) {
      for (const json& s : config["seeds"]) seeds.push_back(s.get<uint64_t>());
    } else if (pipeline.contains("seed")) {
      seeds.push_back(pipeline["seed"].get<uint64_t>());
    } else {
      seeds.push_back(0);
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad seeds: ", e.what()));
  }
  if (seeds.empty()) return absl::InvalidArgumentError("empty seed list");
  return seeds;
}

struct RunOutcome {
  double test_acc = 0.0;
};

// One pipeline run with its artifacts under `dir`.
absl::StatusOr<RunOutcome> RunOne(const json& config, const json& pipeline,
                                  uint64_t seed, const std::string& dir,
                                  const std::string& cache_root) {
  json p = pipeline;
  p["seed"] = seed;
  absl::StatusOr<PipelineConfig> pc = PipelineConfigFromJson(p);
  if (!pc.ok()) return pc.status();
  absl::StatusOr<GraphDataset> data = LoadRunData(config, seed);
  if (!data.ok()) return data.status();
  RunOptions options;
  options.cache_dir = cache_root;
  absl::StatusOr<TrainedModel> model = TrainPipeline(*data, *pc, options);
  if (!model.ok()) return model.status();
  absl::StatusOr<Evaluation> test = Evaluate(*model, *data, Split::kTest);
  if (!test.ok()) return test.status();
  const double acc = test->accuracy;
  absl::Status s = WriteRunArtifacts(dir, *model, Summarize({&acc, 1}));
  if (!s.ok()) return s;
  return RunOutcome{acc};
}

std::string CacheRoot(const std::string& out) {
  if (const char* env = std::getenv("GDPKIT_CACHE_DIR");
      env != nullptr && env[0] != '\0') {
    return env;
  }
  return (fs::path(out) / "cache").string();
}

int RunTrain(const std::string& config_path,
             const std::vector<std::string>& sets, const std::string& out,
             bool dry_run, Manifest& manifest) {
  absl::StatusOr<json> config = LoadConfig(config_path, sets);
  if (!config.ok()) return Fail(config.status());
  const json pipeline = PipelinePart(*config);
  absl::StatusOr<std::vector<uint64_t>> seeds = SeedList(*config, pipeline);
  if (!seeds.ok()) return Fail(seeds.status());
  manifest.set_seed(seeds->front());
  if (absl::Status s = EnsureDir(out); !s.ok()) return Fail(s);

  if (dry_run) {
    json p = pipeline;
    p["seed"] = seeds->front();
    absl::StatusOr<PipelineConfig> pc = PipelineConfigFromJson(p);
    if (!pc.ok()) return Fail(pc.status());
    absl::StatusOr<GraphDataset> data = LoadRunData(*config, seeds->front());
    if (!data.ok()) return Fail(data.status());
    absl::StatusOr<PipelineConfig> resolved = ResolveConfig(*pc, *data);
    if (!resolved.ok()) return Fail(resolved.status());
    absl::StatusOr<GdpReport> report = PlanReport(*resolved, *data);
    if (!report.ok()) return Fail(report.status());
    json j;
    j["config"] = PipelineConfigToJson(*resolved);
    j["report"] = ReportToJson(*report);
    std::cout << j.dump(2) << "\n";
    if (absl::Status s =
            WriteJson((fs::path(out) / "dry_run.json").string(), j);
        !s.ok()) {
      return Fail(s);
    }
    manifest.AddOutput("dry_run.json");
    return kExitOk;
  }

  const std::string cache = CacheRoot(out);
  std::vector<double> accs;
  for (uint64_t seed : *seeds) {
    const std::string dir =
        seeds->size() == 1
            ? out
            : (fs::path(out) / absl::StrCat("seed_", seed)).string();
    absl::StatusOr<RunOutcome> r = RunOne(*config, pipeline, seed, dir, cache);
    if (!r.ok()) return Fail(r.status());
    accs.push_back(r->test_acc);
    const std::string prefix =
        seeds->size() == 1 ? "" : absl::StrCat("seed_", seed, "/");
    for (const char* f : {"config.json", "report.json", "metrics.jsonl",
                          "final.json", "pretrain.gdpw"}) {
      manifest.AddOutput(prefix + f);
    }
  }
  SeedSummary summary = Summarize(accs);
  if (seeds->size() > 1) {
    json j = {{"test_acc", summary.mean},
              {"ci95", summary.ci95},
              {"seeds", summary.values}};
    if (absl::Status s = WriteJson((fs::path(out) / "final.json").string(), j);
        !s.ok()) {
      return Fail(s);
    }
    manifest.AddOutput("final.json");
  }
  std::printf("test_acc %s ci95 %s\n", FormatDouble(summary.mean).c_str(),
              FormatDouble(summary.ci95).c_str());
  return kExitOk;
}

std::string CsvNumber(double v) { return FormatDouble(v); }

int RunSweep(const std::string& config_path,
             const std::vector<std::string>& sets, const std::string& out,
             Manifest& manifest) {
  absl::StatusOr<json> config = LoadConfig(config_path, sets);
  if (!config.ok()) return Fail(config.status());
  if (!config->contains("sweep") || !(*config)["sweep"].is_object()) {
    return Fail(absl::InvalidArgumentError("sweep needs a \"sweep\" object"));
  }
  const json base = PipelinePart(*config);
  const json& grid = (*config)["sweep"];
  auto list = [&](const char* key, json fallback) {
    if (grid.contains(key)) return grid[key];
    return json::array({fallback});
  };
  const json models = list("model", base.value("model", "dpdgc"));
  const json relations = list("relation", base.value("relation", "node"));
  const json ks = list("k", nullptr);
  const json epsilons = list("epsilon", base.value("epsilon", json(nullptr)));
  json phis = json::array({nullptr});
  if (grid.contains("phi")) phis = grid["phi"];
  absl::StatusOr<std::vector<uint64_t>> seeds =
      SeedList(grid.contains("seeds") ? json{{"seeds", grid["seeds"]}} : *config,
               base);
  if (!seeds.ok()) return Fail(seeds.status());
  if (!phis[0].is_null() && !config->contains("csbm")) {
    return Fail(absl::InvalidArgumentError("a phi sweep needs a csbm block"));
  }
  manifest.set_seed(seeds->front());
  if (absl::Status s = EnsureDir(out); !s.ok()) return Fail(s);
  const std::string cache = CacheRoot(out);

  std::string results = "model,relation,k,epsilon,phi,seed,test_acc\n";
  std::string summary = "model,relation,k,epsilon,phi,seeds,mean,ci95\n";
  try {
    for (const json& model : models) {
      for (const json& relation_name : relations) {
        const std::string rel = relation_name.get<std::string>();
        const json k_values = rel == "nk" ? ks : json::array({nullptr});
        for (const json& k : k_values) {
          if (rel == "nk" && k.is_null()) {
            return Fail(absl::InvalidArgumentError(
                "relation nk in a sweep needs a k list"));
          }
          for (const json& eps : epsilons) {
            for (const json& phi : phis) {
              json pipeline = base;
              const std::string model_name = model.get<std::string>();
              if (config->contains("overrides") &&
                  (*config)["overrides"].contains(model_name)) {
                pipeline.merge_patch((*config)["overrides"][model_name]);
              }
              pipeline["model"] = model_name;
              pipeline["relation"] =
                  rel == "nk" ? absl::StrCat("nk:", k.get<int>()) : rel;
              pipeline["epsilon"] = eps;
              json cell_config = *config;
              if (!phi.is_null()) cell_config["csbm"]["phi"] = phi;
              const std::string k_text =
                  k.is_null() ? "" : std::to_string(k.get<int>());
              const std::string eps_text =
                  eps.is_null() ? "" : CsvNumber(eps.get<double>());
              std::string phi_text;
              if (cell_config.contains("csbm") &&
                  cell_config["csbm"].contains("phi")) {
                phi_text = CsvNumber(cell_config["csbm"]["phi"].get<double>());
              }
              const std::string cell = absl::StrCat(
                  model_name, "_", rel, k_text, "_eps", eps_text, "_phi",
                  phi_text);
              std::vector<double> accs;
              for (uint64_t seed : *seeds) {
                const std::string dir =
                    (fs::path(out) / "cells" / cell /
                     absl::StrCat("seed_", seed))
                        .string();
                absl::StatusOr<RunOutcome> r =
                    RunOne(cell_config, pipeline, seed, dir, cache);
                if (!r.ok()) return Fail(r.status());
                accs.push_back(r->test_acc);
                absl::StrAppend(&results, model_name, ",", rel, ",", k_text,
                                ",", eps_text, ",", phi_text, ",", seed, ",",
                                CsvNumber(r->test_acc), "\n");
                std::fprintf(stderr, "%s seed %llu test_acc %.4f\n",
                             cell.c_str(),
                             static_cast<unsigned long long>(seed),
                             r->test_acc);
              }
              SeedSummary s = Summarize(accs);
              absl::StrAppend(&summary, model_name, ",", rel, ",", k_text,
                              ",", eps_text, ",", phi_text, ",", accs.size(),
                              ",", CsvNumber(s.mean), ",", CsvNumber(s.ci95),
                              "\n");
            }
          }
        }
      }
    }
  } catch (const json::exception& e) {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("bad sweep value: ", e.what())));
  }
  if (absl::Status s =
          WriteFileBytes((fs::path(out) / "results.csv").string(), results);
      !s.ok()) {
    return Fail(s);
  }
  if (absl::Status s =
          WriteFileBytes((fs::path(out) / "summary.csv").string(), summary);
      !s.ok()) {
    return Fail(s);
  }
  manifest.AddOutput("results.csv");
  manifest.AddOutput("summary.csv");
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"gdpkit: graph differential privacy toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CalibrateArgs cal;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Smallest noise std meeting a budget");
  calibrate->add_option("--model", cal.model, "dpdgc, gap or mlp")
      ->capture_default_str();
  calibrate->add_option("--relation", cal.relation, "edge, node or nk")
      ->capture_default_str();
  calibrate->add_option("--k", cal.k, "k for --relation nk");
  calibrate->add_option("--D", cal.D, "Out-degree bound");
  calibrate->add_option("--L", cal.hops, "GAP hops")->capture_default_str();
  calibrate->add_option("--c", cal.c, "Row norm of W_A")->capture_default_str();
  calibrate->add_option("--epsilon", cal.epsilon)->required();
  calibrate->add_option("--delta", cal.delta)->capture_default_str();
  calibrate->add_option("--gamma1", cal.gamma1, "RDP slope of gamma1")
      ->capture_default_str();
  calibrate->add_option("--gamma2", cal.gamma2, "RDP slope of gamma2")
      ->capture_default_str();
  calibrate->add_option("--out", cal.out)->capture_default_str();

  CsbmParams csbm_params;
  std::string csbm_out;
  CLI::App* csbm = app.add_subcommand("csbm", "Generate a cSBM dataset");
  csbm->add_option("--n", csbm_params.n)->capture_default_str();
  csbm->add_option("--f", csbm_params.f)->capture_default_str();
  csbm->add_option("--d", csbm_params.d)->capture_default_str();
  csbm->add_option("--phi", csbm_params.phi)->capture_default_str();
  csbm->add_option("--eps-arc", csbm_params.eps_arc)->capture_default_str();
  csbm->add_option("--seed", csbm_params.seed)->capture_default_str();
  csbm->add_option("--out", csbm_out)->required();

  IngestArgs ing;
  CLI::App* ingest =
      app.add_subcommand("ingest", "Convert an edge list (and content file)");
  ingest->add_option("--edges", ing.edges)->required();
  ingest->add_option("--content", ing.content,
                     "Rows 'id features... label'");
  ingest->add_flag("--directed", ing.directed);
  ingest->add_option("--m", ing.m, "Number of labeled nodes (default all)");
  ingest->add_option("--out", ing.out)->required();

  std::string stats_data, stats_out = ".";
  CLI::App* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--data", stats_data)->required();
  stats->add_option("--out", stats_out)->capture_default_str();

  SensitivityArgs sen;
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "Brute-force sensitivity check");
  sensitivity->add_option("--design", sen.design)->capture_default_str();
  sensitivity->add_option("--relation", sen.relation)->capture_default_str();
  sensitivity->add_option("--n", sen.n)->capture_default_str();
  sensitivity->add_option("--D", sen.D);
  sensitivity->add_option("--k", sen.k);
  sensitivity->add_option("--c", sen.c)->capture_default_str();
  sensitivity->add_option("--width", sen.h, "Columns of W or H")->capture_default_str();
  sensitivity->add_option("--r", sen.r)->capture_default_str();
  sensitivity->add_flag("--exhaustive", sen.exhaustive);
  sensitivity->add_option("--trials", sen.trials)->capture_default_str();
  sensitivity->add_option("--h-mode", sen.h_mode)->capture_default_str();
  sensitivity->add_flag("--include-row-r", sen.include_row_r);
  sensitivity->add_option("--seed", sen.seed)->capture_default_str();
  sensitivity->add_option("--out", sen.out)->capture_default_str();

  std::string train_config, train_out;
  std::vector<std::string> train_sets;
  bool dry_run = false;
  CLI::App* train = app.add_subcommand("train", "Train one configuration");
  train->add_option("--config", train_config)->required();
  train->add_option("--set", train_sets, "key=value override");
  train->add_option("--out", train_out)->required();
  train->add_flag("--dry-run", dry_run);

  std::string sweep_config, sweep_out;
  std::vector<std::string> sweep_sets;
  CLI::App* sweep = app.add_subcommand("sweep", "Cross-product sweep");
  sweep->add_option("--config", sweep_config)->required();
  sweep->add_option("--set", sweep_sets, "key=value override");
  sweep->add_option("--out", sweep_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App* cmd = app.get_subcommands().front();
  Manifest manifest(cmd->get_name(), args);
  int code = kExitInvalid;
  std::string out_dir;
  if (cmd == calibrate) {
    code = RunCalibrate(cal, manifest);
    out_dir = cal.out;
  } else if (cmd == csbm) {
    code = RunCsbm(csbm_params, csbm_out, manifest);
    out_dir = csbm_out;
  } else if (cmd == ingest) {
    code = RunIngest(ing, manifest);
    out_dir = ing.out;
  } else if (cmd == stats) {
    code = RunStats(stats_data, stats_out, manifest);
    out_dir = stats_out;
  } else if (cmd == sensitivity) {
    code = RunSensitivity(sen, manifest);
    out_dir = sen.out;
  } else if (cmd == train) {
    code = RunTrain(train_config, train_sets, train_out, dry_run, manifest);
    out_dir = train_out;
  } else if (cmd == sweep) {
    code = RunSweep(sweep_config, sweep_sets, sweep_out, manifest);
    out_dir = sweep_out;
  }
  if (code != kExitInvalid) {
    if (absl::Status s = manifest.Write(out_dir); !s.ok()) return Fail(s);
  }
  return code;
}

}  // namespace
}  // namespace gdpkit

int main(int argc, char** argv) { return gdpkit::Main(argc, argv); }
