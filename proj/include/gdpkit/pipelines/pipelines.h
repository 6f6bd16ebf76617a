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


#ifndef GDPKIT_PIPELINES_PIPELINES_H_
#define GDPKIT_PIPELINES_PIPELINES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gdpkit/accounting/gdp_budget.h"
#include "gdpkit/accounting/rdp_curve.h"
#include "gdpkit/graph/graph_dataset.h"
#include "gdpkit/mechanisms/mechanism_params.h"
#include "gdpkit/mechanisms/mechanisms.h"
#include "gdpkit/nn/dp_optimizer.h"
#include "gdpkit/nn/network.h"
#include "nlohmann/json.hpp"

namespace gdpkit {

struct PipelineConfig {
  ModelKind model = ModelKind::kDpdgc;
  AdjacencyRelation relation = AdjacencyRelation::Node();
  MechanismParams params;
  // When set, noise multipliers and s are derived from it: the pretraining
  // and classifier optimizers take the given shares of the largest RDP slope
  // that converts to epsilon, and s is calibrated for the rest.
  std::optional<PrivacyBudget> budget;
  double delta = 1e-5;
  // DP-Emb (DPDGC), DP-MLP_X (GAP) or the whole network (MLP).
  DpOptimizerConfig pretrain;
  // Downstream classifier; unused by MLP.
  DpOptimizerConfig classifier;
  double pretrain_share = 0.3;
  double classifier_share = 0.3;
  int hidden = 64;
  // Width of W_A.
  int emb_dim = 64;
  // Dropout for modules trained with a standard optimizer.
  double standard_dropout = 0.5;
  // No noise anywhere; every module uses a standard optimizer.
  bool nonprivate = false;
  uint64_t seed = 0;
};

PipelineConfig DefaultPipelineConfig(ModelKind model);

// Fills group sizes, optimizer modes, dropout and, with a budget, noise
// multipliers and s.
absl::StatusOr<PipelineConfig> ResolveConfig(const PipelineConfig& config,
                                             const GraphDataset& dataset);

// Report the resolved configuration will produce, without training.
absl::StatusOr<GdpReport> PlanReport(const PipelineConfig& resolved,
                                     const GraphDataset& dataset);

nlohmann::json PipelineConfigToJson(const PipelineConfig& config);
// Missing keys keep the defaults of the model named in the object.
absl::StatusOr<PipelineConfig> PipelineConfigFromJson(const nlohmann::json& j);

struct LedgerEntry {
  std::string name;
  RdpCurve curve;
};

struct EpochMetric {
  int epoch = 0;
  double train_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainedModel {
  PipelineConfig config;
  // DP-Emb, DP-MLP_X with its auxiliary head, or the MLP baseline.
  Network pretrain;
  // Network on the released embedding. Empty for MLP.
  Network classifier;
  // Released embedding as read back from the cache. Empty for MLP.
  EmbeddingMatrix z;
  std::string z_cache_path;
  // One curve per noise injection or private optimizer run, in order.
  std::vector<LedgerEntry> ledger;
  GdpReport report;
  bool subsampled = false;
  std::vector<EpochMetric> metrics;
  int m_labeled = 0;
};

struct RunOptions {
  // Root for the embedding cache. Empty: $GDPKIT_CACHE_DIR, then a
  // directory under the system temp path.
  std::string cache_dir;
};

std::string ResolveCacheDir(const RunOptions& options);

absl::StatusOr<TrainedModel> TrainDpdgc(const GraphDataset& dataset,
                                        const PipelineConfig& config,
                                        const RunOptions& options = {});
absl::StatusOr<TrainedModel> TrainGap(const GraphDataset& dataset,
                                      const PipelineConfig& config,
                                      const RunOptions& options = {});
absl::StatusOr<TrainedModel> TrainMlp(const GraphDataset& dataset,
                                      const PipelineConfig& config,
                                      const RunOptions& options = {});
// Dispatches on config.model.
absl::StatusOr<TrainedModel> TrainPipeline(const GraphDataset& dataset,
                                           const PipelineConfig& config,
                                           const RunOptions& options = {});

// Compose of the ledger.
absl::StatusOr<RdpCurve> LedgerTotal(const TrainedModel& model);

// Class distribution for an unlabeled node v >= m. Reads the cached
// embedding row and X_v only.
absl::StatusOr<RowVector> Predict(const TrainedModel& model,
                                  const GraphDataset& dataset, int v);

enum class Split { kTrain, kVal, kTest };

struct NodeRange {
  int begin = 0;
  int end = 0;
};

// Train is [0, m); the unlabeled nodes split in half into val and test.
NodeRange SplitNodes(int n, int m_labeled, Split split);

struct Evaluation {
  double accuracy = 0.0;
  int count = 0;
  // Accuracy per class; NaN for classes absent from the split.
  std::vector<double> per_class;
};

// Top-1 accuracy of probability rows against classes. Rows with class < 0
// are skipped.
absl::StatusOr<Evaluation> ScorePredictions(const Matrix& probabilities,
                                            std::span<const int> classes);

absl::StatusOr<Evaluation> Evaluate(const TrainedModel& model,
                                    const GraphDataset& dataset, Split split);

struct SeedSummary {
  double mean = 0.0;
  // Normal-approximation 95% half-width.
  double ci95 = 0.0;
  std::vector<double> values;
};
SeedSummary Summarize(std::span<const double> values);

// config.json, report.json, metrics.jsonl, final.json, weight checkpoints
// and a copy of the embedding.
absl::Status WriteRunArtifacts(const std::string& dir,
                               const TrainedModel& model,
                               const SeedSummary& test);

nlohmann::json ReportWithLedger(const TrainedModel& model);

}  // namespace gdpkit

#endif  // GDPKIT_PIPELINES_PIPELINES_H_
