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


#ifndef GDPKIT_NN_MLP_H_
#define GDPKIT_NN_MLP_H_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "gdpkit/common/random.h"
#include "gdpkit/common/types.h"

namespace gdpkit {

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

double Selu(double x);
// Right derivative at 0.
double SeluGrad(double x);

enum class Activation { kIdentity, kSelu };

struct Layer {
  // in x out.
  Matrix weight;
  RowVector bias;
  bool has_bias = true;
  bool trainable = true;
  Activation activation = Activation::kSelu;

  int in() const { return static_cast<int>(weight.rows()); }
  int out() const { return static_cast<int>(weight.cols()); }
};

// Dense features or sparse adjacency rows.
using LayerInput = std::variant<Matrix, SparseMatrix>;

int Rows(const LayerInput& x);
int Cols(const LayerInput& x);

// Affine layers with per-layer activation.
class Mlp {
 public:
  struct Cache {
    std::vector<LayerInput> inputs;
    std::vector<Matrix> pre;
    // Inverted-dropout masks on layer outputs; empty when unused.
    std::vector<Matrix> masks;
  };

  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {}

  // widths = {in, hidden..., out}. SeLU between layers, identity at the
  // output. Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static absl::StatusOr<Mlp> Create(const std::vector<int>& widths,
                                    uint64_t seed);

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  int in_width() const { return layers_.front().in(); }
  int out_width() const { return layers_.back().out(); }

  // Dropout with rate `dropout` is applied to the output of every layer
  // except the last one, and to the last one too when `drop_output`.
  absl::StatusOr<Matrix> Forward(const LayerInput& x, Cache* cache = nullptr,
                                 double dropout = 0.0,
                                 RandomStream* rng = nullptr,
                                 bool drop_output = false) const;

  // Given dL/d(output), fills dL/d(pre-activation) per layer and, when
  // asked, dL/d(input) (dense inputs only).
  void Backward(const Cache& cache, const Matrix& grad_output,
                std::vector<Matrix>* deltas, Matrix* grad_input) const;

 private:
  std::vector<Layer> layers_;
};

// Softmax rows.
Matrix Softmax(const Matrix& logits);

// Mean softmax cross-entropy against (soft) target rows.
double CrossEntropy(const Matrix& probabilities, const Matrix& targets);

}  // namespace gdpkit

#endif  // GDPKIT_NN_MLP_H_
