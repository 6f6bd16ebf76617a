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


#ifndef GDPKIT_NN_DP_OPTIMIZER_H_
#define GDPKIT_NN_DP_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gdpkit/accounting/rdp_curve.h"
#include "gdpkit/nn/network.h"

namespace gdpkit {

// Full-batch SGD, optionally with per-sample clipping and Gaussian noise.
struct DpOptimizerConfig {
  double clip_norm = 1.0;
  double noise_multiplier = 1.0;
  int group_size = 1;
  int epochs = 1;
  double learning_rate = 1e-3;
  // false: plain SGD, no clipping, no noise, no privacy curve.
  bool private_mode = true;
  double dropout = 0.0;
};

absl::Status ValidateConfig(const DpOptimizerConfig& config);

// Sensitivity of the clipped sum under replacement of g samples: 2 g C.
double StepSensitivity(const DpOptimizerConfig& config);

struct DpStepResult {
  // nullopt in standard mode.
  std::optional<RdpCurve> curve;
  std::vector<ParamBlock> clipped_sum;
  std::vector<ParamBlock> noise;
  std::vector<ParamBlock> noisy_sum;
  double noise_std = 0.0;
  int clipped_count = 0;
};

// One update of every trainable layer: W -= lr / B * (clipped sum + noise),
// noise N(0, (nu 2 g C)^2) per coordinate.
absl::StatusOr<DpStepResult> DpStep(Network& model,
                                    const FactoredGradients& gradients,
                                    const DpOptimizerConfig& config,
                                    uint64_t seed);

struct TrainOptions {
  // Runs after every parameter update.
  std::function<void(Network&)> post_step;
  // Mean training loss measured before the epoch's update.
  std::function<void(int epoch, double loss)> on_epoch;
};

struct TrainResult {
  // Composition of the per-step curves; nullopt in standard mode.
  std::optional<RdpCurve> curve;
  std::vector<double> losses;
};

absl::StatusOr<TrainResult> Train(Network& model, const ModelInput& input,
                                  const Matrix& targets,
                                  const DpOptimizerConfig& config,
                                  uint64_t seed,
                                  const TrainOptions& options = {});

}  // namespace gdpkit

#endif  // GDPKIT_NN_DP_OPTIMIZER_H_
