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


#ifndef GDPKIT_NN_NETWORK_H_
#define GDPKIT_NN_NETWORK_H_

#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "gdpkit/common/random.h"
#include "gdpkit/common/types.h"
#include "gdpkit/nn/mlp.h"

namespace gdpkit {

struct ModelInput {
  LayerInput x;
  // Extra columns appended after the encoder output. May have zero columns.
  Matrix side;
};

// Gradient of one layer for every sample as (input row, delta row) factors:
// sample i contributes input_i^T delta_i to the weight and delta_i to the
// bias.
struct LayerGradient {
  LayerInput input;
  Matrix delta;
  bool has_bias = true;
};

struct ParamBlock {
  Matrix weight;
  RowVector bias;
};

struct FactoredGradients {
  // One entry per trainable layer, in Network::TrainableLayers() order.
  std::vector<LayerGradient> layers;
  Matrix probabilities;
  double loss = 0.0;

  int batch_size() const;
  // Squared Frobenius norm of each sample's full gradient.
  Vector SquaredNorms() const;
  // sum_i w_i * gradient_i.
  std::vector<ParamBlock> WeightedSum(const Vector& w) const;
  // gradient_i, materialized.
  std::vector<ParamBlock> Sample(int i) const;
};

// Optional encoder on x whose output is concatenated with `side` before the
// head; without an encoder the head reads [x | side].
class Network {
 public:
  Network() = default;
  Network(std::optional<Mlp> encoder, Mlp head)
      : encoder_(std::move(encoder)), head_(std::move(head)) {}

  bool has_encoder() const { return encoder_.has_value(); }
  Mlp& encoder() { return *encoder_; }
  const Mlp& encoder() const { return *encoder_; }
  Mlp& head() { return head_; }
  const Mlp& head() const { return head_; }

  // Encoder layers first, then head layers.
  std::vector<Layer*> AllLayers();
  std::vector<const Layer*> AllLayers() const;
  std::vector<Layer*> TrainableLayers();

  absl::StatusOr<Matrix> Logits(const ModelInput& input) const;
  absl::StatusOr<Matrix> Probabilities(const ModelInput& input) const;
  // Encoder output (the head input when there is no encoder).
  absl::StatusOr<Matrix> Encode(const LayerInput& x) const;

  // Per-sample softmax cross-entropy gradients. Dropout (rate > 0) needs rng.
  absl::StatusOr<FactoredGradients> ComputeGradients(
      const ModelInput& input, const Matrix& targets, double dropout = 0.0,
      RandomStream* rng = nullptr) const;

 private:
  absl::StatusOr<LayerInput> HeadInput(const ModelInput& input,
                                       Mlp::Cache* encoder_cache,
                                       double dropout,
                                       RandomStream* rng) const;

  std::optional<Mlp> encoder_;
  Mlp head_;
};

}  // namespace gdpkit

#endif  // GDPKIT_NN_NETWORK_H_
