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


#include "gdpkit/nn/network.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace gdpkit {
namespace {

double RowSquaredNorm(const LayerInput& x, int i) {
  if (const auto* dense = std::get_if<Matrix>(&x)) {
    return dense->row(i).squaredNorm();
  }
  return std::get<SparseMatrix>(x).row(i).squaredNorm();
}

Matrix TransposeTimes(const LayerInput& x, const Matrix& m) {
  if (const auto* dense = std::get_if<Matrix>(&x)) {
    return dense->transpose() * m;
  }
  return std::get<SparseMatrix>(x).transpose() * m;
}

}  // namespace

int FactoredGradients::batch_size() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().delta.rows());
}

Vector FactoredGradients::SquaredNorms() const {
  const int b = batch_size();
  Vector out = Vector::Zero(b);
  for (const LayerGradient& g : layers) {
    for (int i = 0; i < b; ++i) {
      const double d2 = g.delta.row(i).squaredNorm();
      out(i) += RowSquaredNorm(g.input, i) * d2 + (g.has_bias ? d2 : 0.0);
    }
  }
  return out;
}

std::vector<ParamBlock> FactoredGradients::WeightedSum(const Vector& w) const {
  std::vector<ParamBlock> out;
  for (const LayerGradient& g : layers) {
    const Matrix scaled = w.asDiagonal() * g.delta;
    ParamBlock block;
    block.weight = TransposeTimes(g.input, scaled);
    block.bias = g.has_bias ? RowVector(scaled.colwise().sum())
                            : RowVector::Zero(g.delta.cols());
    out.push_back(std::move(block));
  }
  return out;
}

std::vector<ParamBlock> FactoredGradients::Sample(int i) const {
  std::vector<ParamBlock> out;
  for (const LayerGradient& g : layers) {
    RowVector x;
    if (const auto* dense = std::get_if<Matrix>(&g.input)) {
      x = dense->row(i);
    } else {
      x = RowVector(std::get<SparseMatrix>(g.input).row(i));
    }
    ParamBlock block;
    block.weight = x.transpose() * g.delta.row(i);
    block.bias = g.has_bias ? RowVector(g.delta.row(i))
                            : RowVector::Zero(g.delta.cols());
    out.push_back(std::move(block));
  }
  return out;
}

std::vector<Layer*> Network::AllLayers() {
  std::vector<Layer*> out;
  if (encoder_.has_value()) {
    for (Layer& l : encoder_->layers()) out.push_back(&l);
  }
  for (Layer& l : head_.layers()) out.push_back(&l);
  return out;
}

std::vector<const Layer*> Network::AllLayers() const {
  std::vector<const Layer*> out;
  if (encoder_.has_value()) {
    for (const Layer& l : encoder_->layers()) out.push_back(&l);
  }
  for (const Layer& l : head_.layers()) out.push_back(&l);
  return out;
}

std::vector<Layer*> Network::TrainableLayers() {
  std::vector<Layer*> out;
  for (Layer* l : AllLayers()) {
    if (l->trainable) out.push_back(l);
  }
  return out;
}

absl::StatusOr<LayerInput> Network::HeadInput(const ModelInput& input,
                                              Mlp::Cache* encoder_cache,
                                              double dropout,
                                              RandomStream* rng) const {
  const int side_cols = static_cast<int>(input.side.cols());
  if (side_cols > 0 && input.side.rows() != Rows(input.x)) {
    return absl::InvalidArgumentError("side input row count mismatch");
  }
  if (encoder_.has_value()) {
    absl::StatusOr<Matrix> enc =
        encoder_->Forward(input.x, encoder_cache, dropout, rng, true);
    if (!enc.ok()) return enc.status();
    if (side_cols == 0) return LayerInput(*std::move(enc));
    Matrix joined(enc->rows(), enc->cols() + side_cols);
    joined << *enc, input.side;
    return LayerInput(std::move(joined));
  }
  if (side_cols == 0) return input.x;
  const auto* dense = std::get_if<Matrix>(&input.x);
  if (dense == nullptr) {
    return absl::InvalidArgumentError(
        "side columns need a dense primary input");
  }
  Matrix joined(dense->rows(), dense->cols() + side_cols);
  joined << *dense, input.side;
  return LayerInput(std::move(joined));
}

absl::StatusOr<Matrix> Network::Logits(const ModelInput& input) const {
  absl::StatusOr<LayerInput> head_in = HeadInput(input, nullptr, 0.0, nullptr);
  if (!head_in.ok()) return head_in.status();
  return head_.Forward(*head_in);
}

absl::StatusOr<Matrix> Network::Probabilities(const ModelInput& input) const {
  absl::StatusOr<Matrix> logits = Logits(input);
  if (!logits.ok()) return logits.status();
  return Softmax(*logits);
}

absl::StatusOr<Matrix> Network::Encode(const LayerInput& x) const {
  if (encoder_.has_value()) return encoder_->Forward(x);
  if (const auto* dense = std::get_if<Matrix>(&x)) return *dense;
  return Matrix(std::get<SparseMatrix>(x));
}

absl::StatusOr<FactoredGradients> Network::ComputeGradients(
    const ModelInput& input, const Matrix& targets, double dropout,
    RandomStream* rng) const {
  if (targets.rows() != Rows(input.x)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", targets.rows(), " target rows for ", Rows(input.x),
        " samples"));
  }
  if (targets.cols() != head_.out_width()) {
    return absl::InvalidArgumentError("target width does not match output");
  }
  Mlp::Cache encoder_cache;
  absl::StatusOr<LayerInput> head_in =
      HeadInput(input, &encoder_cache, dropout, rng);
  if (!head_in.ok()) return head_in.status();
  Mlp::Cache head_cache;
  absl::StatusOr<Matrix> logits =
      head_.Forward(*head_in, &head_cache, dropout, rng, false);
  if (!logits.ok()) return logits.status();

  FactoredGradients out;
  out.probabilities = Softmax(*logits);
  out.loss = CrossEntropy(out.probabilities, targets);
  const Matrix grad_logits = out.probabilities - targets;

  std::vector<Matrix> head_deltas;
  Matrix grad_head_in;
  head_.Backward(head_cache, grad_logits, &head_deltas,
                 encoder_.has_value() ? &grad_head_in : nullptr);
  std::vector<Matrix> encoder_deltas;
  if (encoder_.has_value()) {
    const Matrix grad_enc = grad_head_in.leftCols(encoder_->out_width());
    encoder_->Backward(encoder_cache, grad_enc, &encoder_deltas, nullptr);
    for (size_t l = 0; l < encoder_->layers().size(); ++l) {
      const Layer& layer = encoder_->layers()[l];
      if (!layer.trainable) continue;
      out.layers.push_back({encoder_cache.inputs[l],
                            std::move(encoder_deltas[l]), layer.has_bias});
    }
  }
  for (size_t l = 0; l < head_.layers().size(); ++l) {
    const Layer& layer = head_.layers()[l];
    if (!layer.trainable) continue;
    out.layers.push_back(
        {head_cache.inputs[l], std::move(head_deltas[l]), layer.has_bias});
  }
  return out;
}

}  // namespace gdpkit
