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

#ifndef GDPKIT_GRAPH_GRAPH_OPS_H_
#define GDPKIT_GRAPH_GRAPH_OPS_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "gdpkit/common/types.h"
#include "gdpkit/graph/adjacency.h"
#include "gdpkit/graph/graph_dataset.h"

namespace gdpkit {

// Largest n accepted by the exhaustive enumerators.
inline constexpr int kMaxEnumerationNodes = 12;

// Drops edges uniformly without replacement from every column whose sum
// exceeds D. Other columns are untouched.
GraphDataset SubsampleOutDegree(const GraphDataset& dataset, DegreeBound bound,
                                uint64_t seed);
Adjacency SubsampleOutDegree(const Adjacency& adjacency, DegreeBound bound,
                             uint64_t seed);

// 2|E| / (n (n - 1)) with |E| the number of stored directed entries.
absl::StatusOr<double> EdgeDensity(const GraphDataset& dataset);

// Class-insensitive edge homophily over edges whose endpoints both have a
// known class. Class proportions are taken over nodes with a known class.
absl::StatusOr<double> Homophily(const GraphDataset& dataset);

// Draws a dataset adjacent to `dataset` under `relation` by replacing r.
absl::StatusOr<GraphDataset> SampleAdjacent(const GraphDataset& dataset,
                                            const AdjacencyRelation& relation,
                                            int r, uint64_t seed);

struct AdjacentEnumeration {
  std::vector<Adjacency> adjacencies;
  bool truncated = false;
};

// Every adjacency reachable from the dataset's topology under the relation.
absl::StatusOr<AdjacentEnumeration> EnumerateAdjacent(
    const GraphDataset& dataset, const AdjacencyRelation& relation, int r,
    int64_t max_count);

// Streaming form of EnumerateAdjacent. `visit` returns false to stop early.
// Returns the number of adjacencies visited.
absl::StatusOr<int64_t> ForEachAdjacent(
    const Adjacency& base, const AdjacencyRelation& relation, int r,
    const std::function<bool(const Adjacency&)>& visit);

// Number of adjacencies ForEachAdjacent would visit.
int64_t CountAdjacent(int n, const AdjacencyRelation& relation);

// Scales each nonzero row to Euclidean norm `target`; zero rows stay zero.
absl::StatusOr<Matrix> RowNormalize(const Matrix& matrix, double target);
void RowNormalizeInPlace(Matrix& matrix, double target);

}  // namespace gdpkit

#endif  // GDPKIT_GRAPH_GRAPH_OPS_H_
