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


#ifndef GDPKIT_MECHANISMS_MECHANISMS_H_
#define GDPKIT_MECHANISMS_MECHANISMS_H_

#include <cstdint>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gdpkit/common/types.h"
#include "gdpkit/graph/adjacency.h"
#include "gdpkit/mechanisms/mechanism_params.h"

namespace gdpkit {

enum class EmbeddingKind : uint8_t { kHop = 0, kConcat = 1, kDpdgc = 2 };

struct EmbeddingMatrix {
  Matrix values;
  EmbeddingKind kind = EmbeddingKind::kHop;
  // Hop index l for kHop.
  int hop = 0;
  bool released = false;
};

// Adds i.i.d. N(0, s^2) to every entry. The stream is keyed by the seed and
// the matrix shape. s <= 0 returns the input unchanged.
Matrix GaussianPerturb(const Matrix& matrix, double s, uint64_t seed);

// Rows of norm 0 or 1 within `tolerance`.
bool IsRowNormalized(const Matrix& matrix, double tolerance = 1e-9);

// row_normalize(A H + N). Output kind kHop(l + 1), released.
absl::StatusOr<EmbeddingMatrix> PmaHop(const EmbeddingMatrix& h,
                                       const Adjacency& adjacency, double s,
                                       uint64_t seed);

// L hops with per-hop seeds derived from (seed, l), concatenated
// [H0 | H1 | ... | HL].
absl::StatusOr<EmbeddingMatrix> GapAggregate(const EmbeddingMatrix& h0,
                                             const Adjacency& adjacency,
                                             const MechanismParams& params,
                                             uint64_t seed);

struct EmbWeights {
  // n x h, nonzero rows of norm c.
  Matrix w_a;
  RowVector b;
};

absl::Status CheckEmbWeights(const EmbWeights& weights, double c);

// A W_A + N(0, (c s)^2) + b, before normalization.
absl::StatusOr<Matrix> DpdgcNoisySignal(const Adjacency& adjacency,
                                        const EmbWeights& weights,
                                        const MechanismParams& params,
                                        uint64_t seed);

// row_normalize(A W_A + N(0, (c s)^2) + b). Kind kDpdgc, released.
absl::StatusOr<EmbeddingMatrix> DpdgcRelease(const Adjacency& adjacency,
                                             const EmbWeights& weights,
                                             const MechanismParams& params,
                                             uint64_t seed);

// Frozen h x C standard-normal projection.
struct ProjectionHead {
  Matrix r;
  static ProjectionHead Draw(int h, int num_classes, uint64_t seed);
};

// GDPZ cache file.
absl::Status WriteEmbedding(const std::string& path,
                            const EmbeddingMatrix& embedding);
absl::StatusOr<EmbeddingMatrix> ReadEmbedding(const std::string& path);

}  // namespace gdpkit

#endif  // GDPKIT_MECHANISMS_MECHANISMS_H_
