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


#include "gdpkit/nn/dp_optimizer.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "gdpkit/common/random.h"

namespace gdpkit {

absl::Status ValidateConfig(const DpOptimizerConfig& config) {
  if (config.epochs < 0) {
    return absl::InvalidArgumentError("epochs must be non-negative");
  }
  if (!(config.learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    return absl::InvalidArgumentError("dropout must lie in [0, 1)");
  }
  if (!config.private_mode) return absl::OkStatus();
  if (!(config.clip_norm > 0.0)) {
    return absl::InvalidArgumentError("clip norm must be positive");
  }
  if (std::isnan(config.noise_multiplier) || config.noise_multiplier < 0.0) {
    return absl::InvalidArgumentError("noise multiplier must be non-negative");
  }
  if (config.group_size < 1) {
    return absl::InvalidArgumentError("group size must be >= 1");
  }
  return absl::OkStatus();
}

double StepSensitivity(const DpOptimizerConfig& config) {
  return 2.0 * config.group_size * config.clip_norm;
}

absl::StatusOr<DpStepResult> DpStep(Network& model,
                                    const FactoredGradients& gradients,
                                    const DpOptimizerConfig& config,
                                    uint64_t seed) {
  if (absl::Status st = ValidateConfig(config); !st.ok()) return st;
  std::vector<Layer*> layers = model.TrainableLayers();
  if (layers.size() != gradients.layers.size()) {
    return absl::InvalidArgumentError("gradients do not match the model");
  }
  const int b = gradients.batch_size();
  DpStepResult result;
  Vector weights = Vector::Ones(b);
  if (config.private_mode) {
    const Vector norms2 = gradients.SquaredNorms();
    const double c2 = config.clip_norm * config.clip_norm;
    for (int i = 0; i < b; ++i) {
      if (norms2(i) > c2) {
        weights(i) = config.clip_norm / std::sqrt(norms2(i));
        ++result.clipped_count;
      }
    }
  }
  result.clipped_sum = gradients.WeightedSum(weights);
  result.noisy_sum = result.clipped_sum;
  if (config.private_mode) {
    result.noise_std = config.noise_multiplier * StepSensitivity(config);
    for (size_t l = 0; l < layers.size(); ++l) {
      ParamBlock n;
      n.weight = Matrix::Zero(layers[l]->in(), layers[l]->out());
      n.bias = RowVector::Zero(layers[l]->out());
      if (result.noise_std > 0.0) {
        RandomStream rng(seed, "dp_step_noise", l);
        for (Eigen::Index i = 0; i < n.weight.size(); ++i) {
          n.weight.data()[i] = result.noise_std * rng.Gaussian();
        }
        if (layers[l]->has_bias) {
          for (Eigen::Index i = 0; i < n.bias.size(); ++i) {
            n.bias(i) = result.noise_std * rng.Gaussian();
          }
        }
      }
      result.noisy_sum[l].weight += n.weight;
      result.noisy_sum[l].bias += n.bias;
      result.noise.push_back(std::move(n));
    }
    if (config.noise_multiplier > 0.0) {
      result.curve =
          RdpCurve::Linear(1.0 / (2.0 * config.noise_multiplier *
                                  config.noise_multiplier))
              ->WithProvenance(absl::StrFormat(
                  "dp step: clip %g, group %d, noise multiplier %g",
                  config.clip_norm, config.group_size,
                  config.noise_multiplier));
    } else {
      result.curve = RdpCurve::NonPrivate().WithProvenance(
          "dp step with noise multiplier 0: non-private");
    }
  }
  const double scale = b > 0 ? config.learning_rate / b : 0.0;
  for (size_t l = 0; l < layers.size(); ++l) {
    layers[l]->weight -= scale * result.noisy_sum[l].weight;
    if (layers[l]->has_bias) layers[l]->bias -= scale * result.noisy_sum[l].bias;
  }
  return result;
}

absl::StatusOr<TrainResult> Train(Network& model, const ModelInput& input,
                                  const Matrix& targets,
                                  const DpOptimizerConfig& config,
                                  uint64_t seed, const TrainOptions& options) {
  if (absl::Status st = ValidateConfig(config); !st.ok()) return st;
  TrainResult result;
  std::vector<RdpCurve> steps;
  for (int t = 0; t < config.epochs; ++t) {
    RandomStream dropout_rng(seed, "dropout", static_cast<uint64_t>(t));
    absl::StatusOr<FactoredGradients> grads = model.ComputeGradients(
        input, targets, config.dropout,
        config.dropout > 0.0 ? &dropout_rng : nullptr);
    if (!grads.ok()) return grads.status();
    absl::StatusOr<DpStepResult> step =
        DpStep(model, *grads, config,
               DeriveSeed(seed, "dp_step", static_cast<uint64_t>(t)));
    if (!step.ok()) return step.status();
    if (options.post_step) options.post_step(model);
    result.losses.push_back(grads->loss);
    if (options.on_epoch) options.on_epoch(t, grads->loss);
    if (step->curve.has_value()) steps.push_back(*step->curve);
  }
  if (config.private_mode) {
    if (steps.empty()) {
      result.curve = RdpCurve::Zero().WithProvenance("dp training: 0 steps");
    } else {
      absl::StatusOr<RdpCurve> total = Compose(steps);
      if (!total.ok()) return total.status();
      absl::StatusOr<RdpCurve> flat = RdpCurve::Linear(total->slope());
      if (!flat.ok()) return flat.status();
      result.curve = flat->WithProvenance(
          absl::StrCat("dp training: ", steps.size(), " steps, ",
                       steps.front().provenance().front()));
    }
  }
  return result;
}

}  // namespace gdpkit
