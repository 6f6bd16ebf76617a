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


#include "gdpkit/pipelines/pipelines.h"

#include <cmath>
#include <cstdlib>
#include <bit>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gdpkit/common/binary_io.h"
#include "gdpkit/common/random.h"
#include "gdpkit/graph/graph_ops.h"
#include "gdpkit/nn/checkpoint.h"

namespace gdpkit {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::vector<int> Range(int begin, int end) {
  std::vector<int> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

Matrix Rows(const Matrix& m, int begin, int end) {
  return m.middleRows(begin, end - begin);
}

bool PretrainPrivate(const PipelineConfig& c) {
  if (c.nonprivate) return false;
  return c.model == ModelKind::kDpdgc || !c.relation.is_edge();
}

bool ClassifierPrivate(const PipelineConfig& c) {
  return !c.nonprivate && c.model != ModelKind::kMlp && !c.relation.is_edge();
}

bool NeedsDegreeBound(const PipelineConfig& c) {
  if (c.model == ModelKind::kDpdgc) return c.relation.is_node();
  if (c.model == ModelKind::kGap) return !c.relation.is_edge();
  return false;
}

int PretrainGroupSize(const PipelineConfig& c) {
  if (c.model != ModelKind::kDpdgc) return 1;
  if (c.relation.is_node()) return 2 * c.params.degree_bound->D + 1;
  if (c.relation.is_kneighbor()) return c.relation.k() + 1;
  return 1;
}

// Noise multiplier giving T steps a total slope of `slope`.
double MultiplierForSlope(int epochs, double slope) {
  if (epochs == 0) return 1.0;
  // Rounded up so the composed slope never exceeds the allotment.
  return std::sqrt(epochs / (2.0 * slope)) * (1.0 + 1e-12);
}

absl::StatusOr<RdpCurve> PlannedCurve(const DpOptimizerConfig& opt) {
  if (!opt.private_mode || opt.epochs == 0) return RdpCurve::Zero();
  if (opt.noise_multiplier == 0.0) return RdpCurve::NonPrivate();
  return RdpCurve::Linear(opt.epochs /
                          (2.0 * opt.noise_multiplier * opt.noise_multiplier));
}

void PrepareOptimizer(DpOptimizerConfig& opt, bool is_private, int group,
                      double standard_dropout) {
  opt.private_mode = is_private;
  opt.group_size = group;
  opt.dropout = is_private ? 0.0 : standard_dropout;
}

absl::Status CheckConfig(const PipelineConfig& c, const GraphDataset& d) {
  if (c.hidden < 1 || c.emb_dim < 1) {
    return absl::InvalidArgumentError("hidden and emb_dim must be positive");
  }
  if (c.model == ModelKind::kGap &&
      (c.params.hops < 1 || c.params.hops > 3)) {
    return absl::InvalidArgumentError(
        absl::StrCat("GAP hops must be 1, 2 or 3, got ", c.params.hops));
  }
  if (NeedsDegreeBound(c) && !c.params.degree_bound.has_value()) {
    return absl::InvalidArgumentError(absl::StrCat(
        ModelKindName(c.model), " under ", c.relation.ToString(),
        " needs a degree bound D"));
  }
  if (c.params.degree_bound.has_value() && c.params.degree_bound->D < 1) {
    return absl::InvalidArgumentError("degree bound D must be >= 1");
  }
  if (c.relation.is_kneighbor() && c.relation.k() < 0) {
    return absl::InvalidArgumentError("k must be non-negative");
  }
  if (!(c.pretrain_share >= 0.0 && c.classifier_share >= 0.0 &&
        c.pretrain_share + c.classifier_share < 1.0)) {
    return absl::InvalidArgumentError(
        "budget shares must be non-negative and sum below 1");
  }
  if (d.num_classes() < 2) {
    return absl::InvalidArgumentError("need at least two classes");
  }
  if (d.m_labeled >= d.n()) {
    return absl::InvalidArgumentError(
        "no unlabeled nodes left for validation and test");
  }
  return absl::OkStatus();
}

// Cache key from the resolved configuration and a dataset fingerprint.
std::string CacheKey(const PipelineConfig& c, const GraphDataset& d) {
  std::string text = PipelineConfigToJson(c).dump();
  absl::StrAppend(&text, "|", d.n(), "|", d.adjacency.num_entries(), "|",
                  d.m_labeled, "|", d.num_features());
  uint64_t h = DeriveSeed(c.seed, text);
  double checksum = d.features.sum();
  h = DeriveSeed(h, "features", std::bit_cast<uint64_t>(checksum));
  for (const auto& [src, dst] : d.adjacency.Edges()) {
    h = DeriveSeed(h, "edge", static_cast<uint64_t>(src),
                   static_cast<uint64_t>(dst));
  }
  return absl::StrFormat("%s-%016x", ModelKindName(c.model), h);
}

// Writes the release and returns what the cache holds.
absl::StatusOr<EmbeddingMatrix> CacheRelease(const EmbeddingMatrix& z,
                                             const std::string& path) {
  std::error_code ec;
  fs::create_directories(fs::path(path).parent_path(), ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create cache directory for ", path));
  }
  if (absl::Status s = WriteEmbedding(path, z); !s.ok()) return s;
  return ReadEmbedding(path);
}

// Output layer starting at zero so untrained heads give the uniform
// distribution.
absl::StatusOr<Mlp> ClassifierHead(const std::vector<int>& widths,
                                   uint64_t seed) {
  absl::StatusOr<Mlp> head = Mlp::Create(widths, seed);
  if (!head.ok()) return head.status();
  head->layers().back().weight.setZero();
  head->layers().back().bias.setZero();
  return head;
}

absl::StatusOr<Mlp> Encoder(int in, int out, uint64_t seed) {
  absl::StatusOr<Mlp> enc = Mlp::Create({in, out}, seed);
  if (!enc.ok()) return enc.status();
  enc->layers()[0].activation = Activation::kSelu;
  return enc;
}

struct Prepared {
  PipelineConfig config;
  GraphDataset data;
  bool subsampled = false;
};

absl::StatusOr<Prepared> Prepare(const GraphDataset& dataset,
                                 const PipelineConfig& config,
                                 ModelKind expected) {
  if (config.model != expected) {
    return absl::InvalidArgumentError(
        absl::StrCat("configuration is for ", ModelKindName(config.model),
                     ", not ", ModelKindName(expected)));
  }
  absl::StatusOr<PipelineConfig> resolved = ResolveConfig(config, dataset);
  if (!resolved.ok()) return resolved.status();
  Prepared out{*resolved, dataset, false};
  if (NeedsDegreeBound(out.config)) {
    out.data = SubsampleOutDegree(dataset, *out.config.params.degree_bound,
                                  DeriveSeed(out.config.seed, "subsample"));
    out.subsampled = true;
  }
  return out;
}

std::function<void(int, double)> MetricsRecorder(
    TrainedModel& model, const Network& net, const ModelInput& val_input,
    std::span<const int> val_classes) {
  return [&model, &net, val_input, val_classes](int epoch, double loss) {
    EpochMetric m{epoch, loss, 0.0};
    absl::StatusOr<Matrix> p = net.Probabilities(val_input);
    if (p.ok()) {
      absl::StatusOr<Evaluation> e = ScorePredictions(*p, val_classes);
      if (e.ok()) m.val_acc = e->accuracy;
    }
    model.metrics.push_back(m);
  };
}

absl::Status Finish(TrainedModel& model, const GraphDataset& data,
                    const RdpCurve& gamma1, const RdpCurve& gamma2) {
  const PipelineConfig& c = model.config;
  DatasetCounts counts{data.n(), data.adjacency.num_entries()};
  absl::StatusOr<GdpReport> report =
      GdpBudget(c.model, c.relation, c.params, gamma1, gamma2, c.delta,
                counts);
  if (!report.ok()) return report.status();
  model.report = *std::move(report);
  absl::StatusOr<RdpCurve> total = LedgerTotal(model);
  if (!total.ok()) return total.status();
  const double a = total->slope();
  const double b = model.report.total.slope();
  if (!(a == b || std::abs(a - b) <= 1e-12 * std::max(a, b))) {
    return absl::InternalError(absl::StrCat(
        "privacy ledger slope ", a, " disagrees with report slope ", b));
  }
  return absl::OkStatus();
}

json OptimizerJson(const DpOptimizerConfig& o) {
  json j;
  j["epochs"] = o.epochs;
  j["learning_rate"] = o.learning_rate;
  j["clip_norm"] = o.clip_norm;
  j["noise_multiplier"] = o.noise_multiplier;
  j["group_size"] = o.group_size;
  j["private"] = o.private_mode;
  j["dropout"] = o.dropout;
  return j;
}

absl::Status OptimizerFromJson(const json& j, DpOptimizerConfig& o,
                               const std::string& where) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError(where + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "epochs") {
      o.epochs = value.get<int>();
    } else if (key == "learning_rate") {
      o.learning_rate = value.get<double>();
    } else if (key == "clip_norm") {
      o.clip_norm = value.get<double>();
    } else if (key == "noise_multiplier") {
      o.noise_multiplier = value.get<double>();
    } else if (key == "group_size") {
      o.group_size = value.get<int>();
    } else if (key == "private") {
      o.private_mode = value.get<bool>();
    } else if (key == "dropout") {
      o.dropout = value.get<double>();
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key ", where, ".", key));
    }
  }
  return absl::OkStatus();
}

}  // namespace

PipelineConfig DefaultPipelineConfig(ModelKind model) {
  PipelineConfig c;
  c.model = model;
  c.pretrain.epochs = 100;
  c.pretrain.learning_rate = 1.0;
  c.classifier.epochs = 100;
  c.classifier.learning_rate = 1.0;
  switch (model) {
    case ModelKind::kDpdgc:
      c.pretrain.learning_rate = 10.0;
      c.pretrain_share = 0.2;
      c.classifier_share = 0.4;
      c.emb_dim = 16;
      break;
    case ModelKind::kGap:
      c.pretrain_share = 0.5;
      c.classifier_share = 0.25;
      break;
    case ModelKind::kMlp:
      c.classifier.epochs = 0;
      break;
  }
  return c;
}

absl::StatusOr<PipelineConfig> ResolveConfig(const PipelineConfig& config,
                                             const GraphDataset& dataset) {
  if (absl::Status s = CheckConfig(config, dataset); !s.ok()) return s;
  PipelineConfig c = config;
  if (c.budget.has_value()) c.delta = c.budget->delta;
  PrepareOptimizer(c.pretrain, PretrainPrivate(c), PretrainGroupSize(c),
                   c.standard_dropout);
  PrepareOptimizer(c.classifier, ClassifierPrivate(c), 1, c.standard_dropout);
  if (c.nonprivate) {
    c.params.s = 0.0;
    return c;
  }
  if (!c.budget.has_value()) return c;

  absl::StatusOr<double> rho = SlopeForEpsilon(c.budget->epsilon, c.delta);
  if (!rho.ok()) return rho.status();
  if (c.model == ModelKind::kMlp) {
    if (c.pretrain.private_mode) {
      c.pretrain.noise_multiplier =
          MultiplierForSlope(c.pretrain.epochs, *rho * (1.0 - 1e-9));
    }
    return c;
  }
  if (c.pretrain.private_mode) {
    c.pretrain.noise_multiplier =
        MultiplierForSlope(c.pretrain.epochs, *rho * c.pretrain_share);
  }
  if (c.classifier.private_mode) {
    c.classifier.noise_multiplier =
        MultiplierForSlope(c.classifier.epochs, *rho * c.classifier_share);
  }
  BudgetTemplate tmpl{c.model, c.relation, c.params, RdpCurve::Zero(),
                      RdpCurve::Zero()};
  absl::StatusOr<RdpCurve> g1 = PlannedCurve(c.pretrain);
  absl::StatusOr<RdpCurve> g2 = PlannedCurve(c.classifier);
  if (!g1.ok()) return g1.status();
  if (!g2.ok()) return g2.status();
  if (c.pretrain.private_mode) tmpl.gamma1 = *g1;
  if (c.classifier.private_mode) tmpl.gamma2 = *g2;
  absl::StatusOr<double> s = CalibrateNoise(*c.budget, tmpl);
  if (!s.ok()) return s.status();
  c.params.s = *s;
  return c;
}

absl::StatusOr<GdpReport> PlanReport(const PipelineConfig& resolved,
                                     const GraphDataset& dataset) {
  absl::StatusOr<RdpCurve> g1 = PlannedCurve(resolved.pretrain);
  absl::StatusOr<RdpCurve> g2 = PlannedCurve(resolved.classifier);
  if (!g1.ok()) return g1.status();
  if (!g2.ok()) return g2.status();
  DatasetCounts counts{dataset.n(), dataset.adjacency.num_entries()};
  return GdpBudget(resolved.model, resolved.relation, resolved.params, *g1,
                   *g2, resolved.delta, counts);
}

json PipelineConfigToJson(const PipelineConfig& c) {
  json j;
  j["model"] = std::string(ModelKindName(c.model));
  j["relation"] = c.relation.ToString();
  j["s"] = c.params.s;
  j["c"] = c.params.c;
  j["hops"] = c.params.hops;
  j["D"] = c.params.degree_bound.has_value() ? json(c.params.degree_bound->D)
                                             : json(nullptr);
  j["epsilon"] = c.budget.has_value() ? json(c.budget->epsilon)
                                      : json(nullptr);
  j["delta"] = c.delta;
  j["pretrain"] = OptimizerJson(c.pretrain);
  j["classifier"] = OptimizerJson(c.classifier);
  j["pretrain_share"] = c.pretrain_share;
  j["classifier_share"] = c.classifier_share;
  j["hidden"] = c.hidden;
  j["emb_dim"] = c.emb_dim;
  j["standard_dropout"] = c.standard_dropout;
  j["nonprivate"] = c.nonprivate;
  j["seed"] = c.seed;
  return j;
}

absl::StatusOr<PipelineConfig> PipelineConfigFromJson(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("pipeline config must be an object");
  }
  ModelKind model = ModelKind::kDpdgc;
  if (j.contains("model")) {
    if (!j["model"].is_string()) {
      return absl::InvalidArgumentError("model must be a string");
    }
    absl::StatusOr<ModelKind> parsed =
        ParseModelKind(j["model"].get<std::string>());
    if (!parsed.ok()) return parsed.status();
    model = *parsed;
  }
  PipelineConfig c = DefaultPipelineConfig(model);
  std::optional<double> epsilon;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "model") continue;
      if (key == "relation") {
        absl::StatusOr<AdjacencyRelation> r =
            AdjacencyRelation::Parse(value.get<std::string>());
        if (!r.ok()) return r.status();
        c.relation = *r;
      } else if (key == "s") {
        c.params.s = value.get<double>();
      } else if (key == "c") {
        c.params.c = value.get<double>();
      } else if (key == "hops") {
        c.params.hops = value.get<int>();
      } else if (key == "D") {
        if (value.is_null()) {
          c.params.degree_bound.reset();
        } else {
          c.params.degree_bound = DegreeBound{value.get<int>()};
        }
      } else if (key == "epsilon") {
        if (!value.is_null()) epsilon = value.get<double>();
      } else if (key == "delta") {
        c.delta = value.get<double>();
      } else if (key == "pretrain") {
        absl::Status s = OptimizerFromJson(value, c.pretrain, "pretrain");
        if (!s.ok()) return s;
      } else if (key == "classifier") {
        absl::Status s = OptimizerFromJson(value, c.classifier, "classifier");
        if (!s.ok()) return s;
      } else if (key == "pretrain_share") {
        c.pretrain_share = value.get<double>();
      } else if (key == "classifier_share") {
        c.classifier_share = value.get<double>();
      } else if (key == "hidden") {
        c.hidden = value.get<int>();
      } else if (key == "emb_dim") {
        c.emb_dim = value.get<int>();
      } else if (key == "standard_dropout") {
        c.standard_dropout = value.get<double>();
      } else if (key == "nonprivate") {
        c.nonprivate = value.get<bool>();
      } else if (key == "seed") {
        c.seed = value.get<uint64_t>();
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown pipeline key '", key, "'"));
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad pipeline config value: ", e.what()));
  }
  if (epsilon.has_value()) c.budget = PrivacyBudget{*epsilon, c.delta};
  return c;
}

std::string ResolveCacheDir(const RunOptions& options) {
  if (!options.cache_dir.empty()) return options.cache_dir;
  if (const char* env = std::getenv("GDPKIT_CACHE_DIR");
      env != nullptr && env[0] != '\0') {
    return env;
  }
  return (fs::temp_directory_path() / "gdpkit-cache").string();
}

absl::StatusOr<TrainedModel> TrainDpdgc(const GraphDataset& dataset,
                                        const PipelineConfig& config,
                                        const RunOptions& options) {
  absl::StatusOr<Prepared> prep = Prepare(dataset, config, ModelKind::kDpdgc);
  if (!prep.ok()) return prep.status();
  const PipelineConfig& c = prep->config;
  const GraphDataset& data = prep->data;
  const int n = data.n();
  const int m = data.m_labeled;
  TrainedModel model;
  model.config = c;
  model.subsampled = prep->subsampled;
  model.m_labeled = m;

  // (1) DP-Emb through the frozen projection head.
  absl::StatusOr<Mlp> emb = Mlp::Create({n, c.emb_dim},
                                        DeriveSeed(c.seed, "emb_init"));
  if (!emb.ok()) return emb.status();
  Layer& w_a = emb->layers()[0];
  w_a.activation = Activation::kSelu;
  RowNormalizeInPlace(w_a.weight, c.params.c);
  Layer projection;
  projection.weight = ProjectionHead::Draw(c.emb_dim, data.num_classes(),
                                           DeriveSeed(c.seed, "projection"))
                          .r;
  projection.bias = RowVector::Zero(data.num_classes());
  projection.has_bias = false;
  projection.trainable = false;
  projection.activation = Activation::kIdentity;
  std::vector<Layer> emb_layers = {w_a, projection};
  model.pretrain = Network(std::nullopt, Mlp(std::move(emb_layers)));
  const double c_norm = c.params.c;
  TrainOptions pre_opts;
  pre_opts.post_step = [c_norm](Network& net) {
    RowNormalizeInPlace(net.head().layers()[0].weight, c_norm);
  };
  const std::vector<int> train_rows = Range(0, m);
  ModelInput emb_input{data.adjacency.RowsToSparse(train_rows), Matrix()};
  absl::StatusOr<TrainResult> pre =
      Train(model.pretrain, emb_input, data.labels, c.pretrain,
            DeriveSeed(c.seed, "pretrain"), pre_opts);
  if (!pre.ok()) return pre.status();
  RdpCurve gamma1 = pre->curve.value_or(RdpCurve::Zero());
  if (pre->curve.has_value()) model.ledger.push_back({"dp-emb optimizer", gamma1});

  // (2) One release of Z, read back from the cache.
  const Layer& trained = model.pretrain.head().layers()[0];
  EmbWeights weights{trained.weight, trained.bias};
  absl::StatusOr<EmbeddingMatrix> z = DpdgcRelease(
      data.adjacency, weights, c.params, DeriveSeed(c.seed, "release"));
  if (!z.ok()) return z.status();
  absl::StatusOr<RdpCurve> mech =
      MechanismCurve(ModelKind::kDpdgc, c.relation, c.params);
  if (!mech.ok()) return mech.status();
  model.ledger.push_back({"dp-emb release", *mech});
  model.z_cache_path = (fs::path(ResolveCacheDir(options)) /
                        CacheKey(c, dataset) / "z.gdpz")
                           .string();
  absl::StatusOr<EmbeddingMatrix> cached = CacheRelease(*z, model.z_cache_path);
  if (!cached.ok()) return cached.status();
  model.z = *std::move(cached);

  // (3) X encoder and Z concatenated, then a two-layer classifier.
  absl::StatusOr<Mlp> encoder =
      Encoder(data.num_features(), c.hidden, DeriveSeed(c.seed, "x_encoder"));
  if (!encoder.ok()) return encoder.status();
  absl::StatusOr<Mlp> head = ClassifierHead(
      {c.hidden + c.emb_dim, c.hidden, data.num_classes()},
      DeriveSeed(c.seed, "classifier_init"));
  if (!head.ok()) return head.status();
  model.classifier = Network(*std::move(encoder), *std::move(head));
  const NodeRange val = SplitNodes(n, m, Split::kVal);
  ModelInput val_input{Rows(data.features, val.begin, val.end),
                       Rows(model.z.values, val.begin, val.end)};
  std::span<const int> val_classes(data.classes.data() + val.begin,
                                   val.end - val.begin);
  TrainOptions cls_opts;
  cls_opts.on_epoch =
      MetricsRecorder(model, model.classifier, val_input, val_classes);
  ModelInput cls_input{Rows(data.features, 0, m), Rows(model.z.values, 0, m)};
  absl::StatusOr<TrainResult> cls =
      Train(model.classifier, cls_input, data.labels, c.classifier,
            DeriveSeed(c.seed, "classifier"), cls_opts);
  if (!cls.ok()) return cls.status();
  RdpCurve gamma2 = cls->curve.value_or(RdpCurve::Zero());
  if (cls->curve.has_value()) {
    model.ledger.push_back({"classifier optimizer", gamma2});
  }

  // (4) End-to-end guarantee.
  if (absl::Status s = Finish(model, data, gamma1, gamma2); !s.ok()) return s;
  return model;
}

absl::StatusOr<TrainedModel> TrainGap(const GraphDataset& dataset,
                                      const PipelineConfig& config,
                                      const RunOptions& options) {
  absl::StatusOr<Prepared> prep = Prepare(dataset, config, ModelKind::kGap);
  if (!prep.ok()) return prep.status();
  const PipelineConfig& c = prep->config;
  const GraphDataset& data = prep->data;
  const int n = data.n();
  const int m = data.m_labeled;
  TrainedModel model;
  model.config = c;
  model.subsampled = prep->subsampled;
  model.m_labeled = m;

  // DP-MLP_X pretrained through an auxiliary linear head.
  absl::StatusOr<Mlp> encoder =
      Encoder(data.num_features(), c.hidden, DeriveSeed(c.seed, "x_encoder"));
  if (!encoder.ok()) return encoder.status();
  absl::StatusOr<Mlp> aux = ClassifierHead(
      {c.hidden, data.num_classes()}, DeriveSeed(c.seed, "aux_head"));
  if (!aux.ok()) return aux.status();
  model.pretrain = Network(*std::move(encoder), *std::move(aux));
  absl::StatusOr<TrainResult> pre =
      Train(model.pretrain, {Rows(data.features, 0, m), Matrix()},
            data.labels, c.pretrain, DeriveSeed(c.seed, "pretrain"));
  if (!pre.ok()) return pre.status();
  RdpCurve gamma1 = RdpCurve::Zero();
  if (pre->curve.has_value()) {
    gamma1 = *pre->curve;
    model.ledger.push_back({"dp-mlp_x optimizer", gamma1});
  }

  absl::StatusOr<Matrix> h = model.pretrain.Encode(data.features);
  if (!h.ok()) return h.status();
  EmbeddingMatrix h0{*h, EmbeddingKind::kHop, 0, false};
  RowNormalizeInPlace(h0.values, 1.0);
  absl::StatusOr<EmbeddingMatrix> z = GapAggregate(
      h0, data.adjacency, c.params, DeriveSeed(c.seed, "gap_aggregate"));
  if (!z.ok()) return z.status();
  MechanismParams one_hop = c.params;
  one_hop.hops = 1;
  for (int l = 1; l <= c.params.hops; ++l) {
    absl::StatusOr<RdpCurve> hop =
        MechanismCurve(ModelKind::kGap, c.relation, one_hop);
    if (!hop.ok()) return hop.status();
    model.ledger.push_back({absl::StrCat("pma hop ", l), *hop});
  }
  model.z_cache_path = (fs::path(ResolveCacheDir(options)) /
                        CacheKey(c, dataset) / "z.gdpz")
                           .string();
  absl::StatusOr<EmbeddingMatrix> cached = CacheRelease(*z, model.z_cache_path);
  if (!cached.ok()) return cached.status();
  model.z = *std::move(cached);

  // DP-MLP_f on the aggregated embedding.
  absl::StatusOr<Mlp> head = ClassifierHead(
      {static_cast<int>(model.z.values.cols()), c.hidden, data.num_classes()},
      DeriveSeed(c.seed, "classifier_init"));
  if (!head.ok()) return head.status();
  model.classifier = Network(std::nullopt, *std::move(head));
  const NodeRange val = SplitNodes(n, m, Split::kVal);
  ModelInput val_input{Rows(model.z.values, val.begin, val.end), Matrix()};
  std::span<const int> val_classes(data.classes.data() + val.begin,
                                   val.end - val.begin);
  TrainOptions cls_opts;
  cls_opts.on_epoch =
      MetricsRecorder(model, model.classifier, val_input, val_classes);
  absl::StatusOr<TrainResult> cls =
      Train(model.classifier, {Rows(model.z.values, 0, m), Matrix()},
            data.labels, c.classifier, DeriveSeed(c.seed, "classifier"),
            cls_opts);
  if (!cls.ok()) return cls.status();
  RdpCurve gamma2 = RdpCurve::Zero();
  if (cls->curve.has_value()) {
    gamma2 = *cls->curve;
    model.ledger.push_back({"dp-mlp_f optimizer", gamma2});
  }
  if (absl::Status s = Finish(model, data, gamma1, gamma2); !s.ok()) return s;
  return model;
}

absl::StatusOr<TrainedModel> TrainMlp(const GraphDataset& dataset,
                                      const PipelineConfig& config,
                                      const RunOptions& options) {
  absl::StatusOr<Prepared> prep = Prepare(dataset, config, ModelKind::kMlp);
  if (!prep.ok()) return prep.status();
  const PipelineConfig& c = prep->config;
  const GraphDataset& data = prep->data;
  const int m = data.m_labeled;
  TrainedModel model;
  model.config = c;
  model.m_labeled = m;
  absl::StatusOr<Mlp> net =
      ClassifierHead({data.num_features(), c.hidden, data.num_classes()},
                     DeriveSeed(c.seed, "mlp_init"));
  if (!net.ok()) return net.status();
  model.pretrain = Network(std::nullopt, *std::move(net));
  const NodeRange val = SplitNodes(data.n(), m, Split::kVal);
  ModelInput val_input{Rows(data.features, val.begin, val.end), Matrix()};
  std::span<const int> val_classes(data.classes.data() + val.begin,
                                   val.end - val.begin);
  TrainOptions opts;
  opts.on_epoch = MetricsRecorder(model, model.pretrain, val_input, val_classes);
  absl::StatusOr<TrainResult> r =
      Train(model.pretrain, {Rows(data.features, 0, m), Matrix()}, data.labels,
            c.pretrain, DeriveSeed(c.seed, "pretrain"), opts);
  if (!r.ok()) return r.status();
  RdpCurve gamma1 = RdpCurve::Zero();
  if (r->curve.has_value()) {
    gamma1 = *r->curve;
    model.ledger.push_back({"dp-mlp optimizer", gamma1});
  }
  if (absl::Status s = Finish(model, data, gamma1, RdpCurve::Zero()); !s.ok()) {
    return s;
  }
  return model;
}

absl::StatusOr<TrainedModel> TrainPipeline(const GraphDataset& dataset,
                                           const PipelineConfig& config,
                                           const RunOptions& options) {
  switch (config.model) {
    case ModelKind::kDpdgc:
      return TrainDpdgc(dataset, config, options);
    case ModelKind::kGap:
      return TrainGap(dataset, config, options);
    case ModelKind::kMlp:
      return TrainMlp(dataset, config, options);
  }
  return absl::InvalidArgumentError("unknown model");
}

absl::StatusOr<RdpCurve> LedgerTotal(const TrainedModel& model) {
  if (model.ledger.empty()) return RdpCurve::Zero();
  std::vector<RdpCurve> curves;
  for (const LedgerEntry& e : model.ledger) curves.push_back(e.curve);
  return Compose(curves);
}

namespace {

absl::StatusOr<Matrix> PredictRows(const TrainedModel& model,
                                   const GraphDataset& dataset, int begin,
                                   int end) {
  if (begin < 0 || end > dataset.n() || begin > end) {
    return absl::InvalidArgumentError("node range out of bounds");
  }
  switch (model.config.model) {
    case ModelKind::kDpdgc:
      return model.classifier.Probabilities(
          {Rows(dataset.features, begin, end), Rows(model.z.values, begin, end)});
    case ModelKind::kGap:
      return model.classifier.Probabilities(
          {Rows(model.z.values, begin, end), Matrix()});
    case ModelKind::kMlp:
      return model.pretrain.Probabilities(
          {Rows(dataset.features, begin, end), Matrix()});
  }
  return absl::InvalidArgumentError("unknown model");
}

}  // namespace

absl::StatusOr<RowVector> Predict(const TrainedModel& model,
                                  const GraphDataset& dataset, int v) {
  if (v < 0 || v >= dataset.n()) {
    return absl::InvalidArgumentError(
        absl::StrCat("node ", v, " out of range [0, ", dataset.n(), ")"));
  }
  if (v < model.m_labeled) {
    return absl::InvalidArgumentError(absl::StrCat(
        "node ", v, " is labeled; predictions are only served for v >= ",
        model.m_labeled));
  }
  absl::StatusOr<Matrix> p = PredictRows(model, dataset, v, v + 1);
  if (!p.ok()) return p.status();
  return RowVector(p->row(0));
}

NodeRange SplitNodes(int n, int m_labeled, Split split) {
  const int mid = m_labeled + (n - m_labeled) / 2;
  switch (split) {
    case Split::kTrain:
      return {0, m_labeled};
    case Split::kVal:
      return {m_labeled, mid};
    case Split::kTest:
      return {mid, n};
  }
  return {0, 0};
}

absl::StatusOr<Evaluation> ScorePredictions(const Matrix& probabilities,
                                            std::span<const int> classes) {
  if (static_cast<size_t>(probabilities.rows()) != classes.size()) {
    return absl::InvalidArgumentError("one class per prediction row needed");
  }
  const int num_classes = static_cast<int>(probabilities.cols());
  std::vector<int> hits(num_classes, 0), totals(num_classes, 0);
  Evaluation out;
  int correct = 0;
  for (size_t i = 0; i < classes.size(); ++i) {
    const int y = classes[i];
    if (y < 0 || y >= num_classes) continue;
    Eigen::Index best;
    probabilities.row(i).maxCoeff(&best);
    ++out.count;
    ++totals[y];
    if (best == y) {
      ++correct;
      ++hits[y];
    }
  }
  if (out.count == 0) {
    return absl::InvalidArgumentError("empty split: no labeled rows to score");
  }
  out.accuracy = static_cast<double>(correct) / out.count;
  for (int k = 0; k < num_classes; ++k) {
    out.per_class.push_back(
        totals[k] > 0 ? static_cast<double>(hits[k]) / totals[k]
                      : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

absl::StatusOr<Evaluation> Evaluate(const TrainedModel& model,
                                    const GraphDataset& dataset, Split split) {
  const NodeRange r = SplitNodes(dataset.n(), model.m_labeled, split);
  if (r.begin == r.end) {
    return absl::InvalidArgumentError("empty split");
  }
  absl::StatusOr<Matrix> p = PredictRows(model, dataset, r.begin, r.end);
  if (!p.ok()) return p.status();
  return ScorePredictions(
      *p, std::span<const int>(dataset.classes.data() + r.begin,
                               r.end - r.begin));
}

SeedSummary Summarize(std::span<const double> values) {
  SeedSummary out;
  out.values.assign(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

json ReportWithLedger(const TrainedModel& model) {
  json j = ReportToJson(model.report);
  json ledger = json::array();
  for (const LedgerEntry& e : model.ledger) {
    std::optional<double> slope = FiniteSlope(e.curve);
    ledger.push_back({{"name", e.name},
                      {"slope", slope.has_value() ? json(*slope)
                                                  : json(nullptr)}});
  }
  j["ledger"] = ledger;
  j["noise_std"] = model.config.params.s;
  j["pretrain_noise_multiplier"] = model.config.pretrain.noise_multiplier;
  j["classifier_noise_multiplier"] = model.config.classifier.noise_multiplier;
  return j;
}

absl::Status WriteRunArtifacts(const std::string& dir,
                               const TrainedModel& model,
                               const SeedSummary& test) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(absl::StrCat("cannot create ", dir));
  }
  absl::Status s = WriteFileBytes(
      dir + "/config.json", PipelineConfigToJson(model.config).dump(2) + "\n");
  if (!s.ok()) return s;
  s = WriteFileBytes(dir + "/report.json",
                     ReportWithLedger(model).dump(2) + "\n");
  if (!s.ok()) return s;
  std::string lines;
  for (const EpochMetric& m : model.metrics) {
    json line = {{"epoch", m.epoch},
                 {"train_loss", m.train_loss},
                 {"val_acc", m.val_acc}};
    absl::StrAppend(&lines, line.dump(), "\n");
  }
  s = WriteFileBytes(dir + "/metrics.jsonl", lines);
  if (!s.ok()) return s;
  json seeds = json::array();
  for (double v : test.values) seeds.push_back(v);
  json final_json = {{"test_acc", test.mean},
                     {"ci95", test.ci95},
                     {"seeds", seeds}};
  s = WriteFileBytes(dir + "/final.json", final_json.dump(2) + "\n");
  if (!s.ok()) return s;
  s = SaveCheckpoint(dir + "/pretrain.gdpw", model.pretrain);
  if (!s.ok()) return s;
  if (model.config.model != ModelKind::kMlp) {
    s = SaveCheckpoint(dir + "/classifier.gdpw", model.classifier);
    if (!s.ok()) return s;
    s = WriteEmbedding(dir + "/z.gdpz", model.z);
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace gdpkit
