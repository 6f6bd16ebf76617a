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


#include "gdpkit/mechanisms/mechanisms.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "gdpkit/common/binary_io.h"
#include "gdpkit/common/random.h"
#include "gdpkit/graph/graph_ops.h"

namespace gdpkit {
namespace {

constexpr char kMagic[] = "GDPZ";
constexpr uint32_t kVersion = 1;

}  // namespace

Matrix GaussianPerturb(const Matrix& matrix, double s, uint64_t seed) {
  Matrix out = matrix;
  if (!(s > 0.0)) return out;
  RandomStream rng(seed, "gaussian_perturb",
                   static_cast<uint64_t>(matrix.rows()),
                   static_cast<uint64_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) += s * rng.Gaussian();
    }
  }
  return out;
}

bool IsRowNormalized(const Matrix& matrix, double tolerance) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const double norm = matrix.row(i).norm();
    if (norm != 0.0 && std::abs(norm - 1.0) > tolerance) return false;
  }
  return true;
}

absl::StatusOr<EmbeddingMatrix> PmaHop(const EmbeddingMatrix& h,
                                       const Adjacency& adjacency, double s,
                                       uint64_t seed) {
  if (h.kind != EmbeddingKind::kHop) {
    return absl::FailedPreconditionError("PMA input must be a hop embedding");
  }
  if (h.values.rows() != adjacency.n()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding has ", h.values.rows(), " rows, graph has ", adjacency.n(),
        " nodes"));
  }
  if (!IsRowNormalized(h.values)) {
    return absl::FailedPreconditionError(
        "PMA input rows must have norm 0 or 1");
  }
  EmbeddingMatrix out;
  out.values = GaussianPerturb(adjacency.Multiply(h.values), s, seed);
  RowNormalizeInPlace(out.values, 1.0);
  out.kind = EmbeddingKind::kHop;
  out.hop = h.hop + 1;
  out.released = true;
  return out;
}

absl::StatusOr<EmbeddingMatrix> GapAggregate(const EmbeddingMatrix& h0,
                                             const Adjacency& adjacency,
                                             const MechanismParams& params,
                                             uint64_t seed) {
  if (params.hops < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("hop count must be >= 1, got ", params.hops));
  }
  const Eigen::Index n = h0.values.rows();
  const Eigen::Index width = h0.values.cols();
  EmbeddingMatrix z;
  z.values.resize(n, width * (params.hops + 1));
  z.values.leftCols(width) = h0.values;
  EmbeddingMatrix current = h0;
  for (int l = 0; l < params.hops; ++l) {
    absl::StatusOr<EmbeddingMatrix> next = PmaHop(
        current, adjacency, params.s,
        DeriveSeed(seed, "pma_hop", static_cast<uint64_t>(l)));
    if (!next.ok()) return next.status();
    current = *std::move(next);
    z.values.middleCols(width * (l + 1), width) = current.values;
  }
  z.kind = EmbeddingKind::kConcat;
  z.hop = params.hops;
  z.released = true;
  return z;
}

absl::Status CheckEmbWeights(const EmbWeights& weights, double c) {
  if (!(c > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat("c must be positive, got ", c));
  }
  if (weights.b.size() != weights.w_a.cols()) {
    return absl::InvalidArgumentError("bias width does not match W_A");
  }
  for (Eigen::Index i = 0; i < weights.w_a.rows(); ++i) {
    const double norm = weights.w_a.row(i).norm();
    if (norm != 0.0 && std::abs(norm - c) > 1e-12 * c) {
      return absl::FailedPreconditionError(absl::StrCat(
          "row ", i, " of W_A has norm ", norm, ", expected ", c));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Matrix> DpdgcNoisySignal(const Adjacency& adjacency,
                                        const EmbWeights& weights,
                                        const MechanismParams& params,
                                        uint64_t seed) {
  if (absl::Status st = CheckEmbWeights(weights, params.c); !st.ok()) {
    return st;
  }
  if (weights.w_a.rows() != adjacency.n()) {
    return absl::InvalidArgumentError("W_A must have one row per node");
  }
  if (std::isnan(params.s) || params.s < 0.0) {
    return absl::InvalidArgumentError("noise std must be non-negative");
  }
  Matrix z = GaussianPerturb(adjacency.Multiply(weights.w_a),
                             params.c * params.s,
                             DeriveSeed(seed, "dpdgc_release"));
  z.rowwise() += weights.b;
  return z;
}

absl::StatusOr<EmbeddingMatrix> DpdgcRelease(const Adjacency& adjacency,
                                             const EmbWeights& weights,
                                             const MechanismParams& params,
                                             uint64_t seed) {
  absl::StatusOr<Matrix> signal =
      DpdgcNoisySignal(adjacency, weights, params, seed);
  if (!signal.ok()) return signal.status();
  EmbeddingMatrix out;
  out.values = *std::move(signal);
  RowNormalizeInPlace(out.values, 1.0);
  out.kind = EmbeddingKind::kDpdgc;
  out.released = true;
  return out;
}

ProjectionHead ProjectionHead::Draw(int h, int num_classes, uint64_t seed) {
  RandomStream rng(seed, "projection_head");
  ProjectionHead head;
  head.r.resize(h, num_classes);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < num_classes; ++j) head.r(i, j) = rng.Gaussian();
  }
  return head;
}

absl::Status WriteEmbedding(const std::string& path,
                            const EmbeddingMatrix& embedding) {
  ByteWriter w;
  w.Bytes(absl::string_view(kMagic, 4));
  w.U32(kVersion);
  w.U64(static_cast<uint64_t>(embedding.values.rows()));
  w.U64(static_cast<uint64_t>(embedding.values.cols()));
  w.U8(static_cast<uint8_t>(embedding.kind));
  w.U8(embedding.released ? 1 : 0);
  for (Eigen::Index i = 0; i < embedding.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < embedding.values.cols(); ++j) {
      w.F64(embedding.values(i, j));
    }
  }
  return WriteFileBytes(path, w.data());
}

absl::StatusOr<EmbeddingMatrix> ReadEmbedding(const std::string& path) {
  absl::StatusOr<std::string> bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  ByteReader r(*bytes);
  absl::StatusOr<absl::string_view> magic = r.Bytes(4);
  if (!magic.ok()) return magic.status();
  if (*magic != absl::string_view(kMagic, 4)) {
    return absl::DataLossError(absl::StrCat(path, ": not a GDPZ file"));
  }
  absl::StatusOr<uint32_t> version = r.U32();
  if (!version.ok()) return version.status();
  if (*version != kVersion) {
    return absl::DataLossError(
        absl::StrCat(path, ": unsupported GDPZ version ", *version));
  }
  absl::StatusOr<uint64_t> n = r.U64();
  absl::StatusOr<uint64_t> h = r.U64();
  absl::StatusOr<uint8_t> kind = r.U8();
  absl::StatusOr<uint8_t> released = r.U8();
  if (!n.ok() || !h.ok() || !kind.ok() || !released.ok()) {
    return absl::DataLossError(absl::StrCat(path, ": truncated header"));
  }
  if (*kind > 2) return absl::DataLossError(absl::StrCat(path, ": bad kind"));
  if (r.remaining() != *n * *h * 8) {
    return absl::DataLossError(absl::StrCat(
        path, ": payload has ", r.remaining(), " bytes, expected ",
        *n * *h * 8));
  }
  EmbeddingMatrix out;
  out.values.resize(static_cast<Eigen::Index>(*n),
                    static_cast<Eigen::Index>(*h));
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
      out.values(i, j) = *r.F64();
    }
  }
  out.kind = static_cast<EmbeddingKind>(*kind);
  out.released = *released != 0;
  return out;
}

}  // namespace gdpkit
