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


#include "gdpkit/nn/mlp.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace gdpkit {
namespace {

Matrix Multiply(const LayerInput& x, const Matrix& w) {
  if (const auto* dense = std::get_if<Matrix>(&x)) return *dense * w;
  return std::get<SparseMatrix>(x) * w;
}

}  // namespace

double Selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}

double SeluGrad(double x) {
  return x >= 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

int Rows(const LayerInput& x) {
  return std::visit([](const auto& m) { return static_cast<int>(m.rows()); },
                    x);
}

int Cols(const LayerInput& x) {
  return std::visit([](const auto& m) { return static_cast<int>(m.cols()); },
                    x);
}

absl::StatusOr<Mlp> Mlp::Create(const std::vector<int>& widths,
                                uint64_t seed) {
  if (widths.size() < 2) {
    return absl::InvalidArgumentError("an MLP needs at least two widths");
  }
  std::vector<Layer> layers;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    if (in < 1 || out < 1) {
      return absl::InvalidArgumentError("layer widths must be positive");
    }
    Layer layer;
    const double limit = std::sqrt(6.0 / (in + out));
    RandomStream rng(seed, "mlp_init", l);
    layer.weight.resize(in, out);
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < out; ++j) {
        layer.weight(i, j) = limit * (2.0 * rng.Uniform() - 1.0);
      }
    }
    layer.bias = RowVector::Zero(out);
    layer.activation = l + 2 == widths.size() ? Activation::kIdentity
                                              : Activation::kSelu;
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

absl::StatusOr<Matrix> Mlp::Forward(const LayerInput& x, Cache* cache,
                                    double dropout, RandomStream* rng,
                                    bool drop_output) const {
  if (layers_.empty()) return absl::FailedPreconditionError("empty MLP");
  if (Cols(x) != in_width()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has ", Cols(x), " columns, layer expects ", in_width()));
  }
  if (dropout > 0.0 && rng == nullptr) {
    return absl::InvalidArgumentError("dropout needs a random stream");
  }
  if (cache != nullptr) *cache = Cache();
  LayerInput current = x;
  Matrix out;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Matrix pre = Multiply(current, layer.weight);
    if (layer.has_bias) pre.rowwise() += layer.bias;
    out = pre;
    if (layer.activation == Activation::kSelu) {
      out = pre.unaryExpr([](double v) { return Selu(v); });
    }
    const bool drop =
        dropout > 0.0 && (l + 1 < layers_.size() || drop_output);
    Matrix mask;
    if (drop) {
      mask.resize(out.rows(), out.cols());
      const double keep = 1.0 - dropout;
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = rng->Uniform() < keep ? 1.0 / keep : 0.0;
      }
      out = out.cwiseProduct(mask);
    }
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(current));
      cache->pre.push_back(std::move(pre));
      cache->masks.push_back(std::move(mask));
    }
    current = out;
  }
  return out;
}

void Mlp::Backward(const Cache& cache, const Matrix& grad_output,
                   std::vector<Matrix>* deltas, Matrix* grad_input) const {
  deltas->assign(layers_.size(), Matrix());
  Matrix g = grad_output;
  for (size_t idx = layers_.size(); idx-- > 0;) {
    const Layer& layer = layers_[idx];
    if (cache.masks[idx].size() > 0) g = g.cwiseProduct(cache.masks[idx]);
    Matrix delta = g;
    if (layer.activation == Activation::kSelu) {
      delta = g.cwiseProduct(
          cache.pre[idx].unaryExpr([](double v) { return SeluGrad(v); }));
    }
    if (idx > 0 || grad_input != nullptr) {
      g = delta * layer.weight.transpose();
    }
    (*deltas)[idx] = std::move(delta);
  }
  if (grad_input != nullptr) *grad_input = std::move(g);
}

Matrix Softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    RowVector e = (logits.row(i).array() - top).exp().matrix();
    out.row(i) = e / e.sum();
  }
  return out;
}

double CrossEntropy(const Matrix& probabilities, const Matrix& targets) {
  if (probabilities.rows() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    for (Eigen::Index j = 0; j < probabilities.cols(); ++j) {
      if (targets(i, j) != 0.0) {
        total -= targets(i, j) *
                 std::log(std::max(probabilities(i, j), 1e-300));
      }
    }
  }
  return total / static_cast<double>(probabilities.rows());
}

}  // namespace gdpkit
