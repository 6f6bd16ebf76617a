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

#ifndef GDPKIT_GRAPH_GRAPH_DATASET_H_
#define GDPKIT_GRAPH_GRAPH_DATASET_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "gdpkit/common/types.h"
#include "gdpkit/graph/adjacency.h"

namespace gdpkit {

// A(n x n), X(n x F), Y(m x C). The first m_labeled nodes are the training
// nodes. `classes` optionally holds ground truth for every node (-1 when
// unknown); it is what evaluation and graph statistics read.
struct GraphDataset {
  int m_labeled = 0;
  Adjacency adjacency;
  Matrix features;
  Matrix labels;
  std::vector<int> classes;

  int n() const { return adjacency.n(); }
  int num_features() const { return static_cast<int>(features.cols()); }
  int num_classes() const { return static_cast<int>(labels.cols()); }
  // Known class of node i or -1. Training rows come from `labels`.
  int ClassOf(int i) const;
};

// Builds one-hot labels for the first m nodes from `classes`.
absl::StatusOr<GraphDataset> MakeDataset(Adjacency adjacency, Matrix features,
                                         std::vector<int> classes,
                                         int num_classes, int m_labeled);

class AdjacencyRelation {
 public:
  enum class Kind { kEdge, kNode, kKNeighbor };

  static AdjacencyRelation Edge() { return AdjacencyRelation(Kind::kEdge, 0); }
  static AdjacencyRelation Node() { return AdjacencyRelation(Kind::kNode, 0); }
  static AdjacencyRelation KNeighbor(int k) {
    return AdjacencyRelation(Kind::kKNeighbor, k);
  }
  // Accepts "edge", "node", "nk" (with k from the second argument) and
  // "nk:<k>".
  static absl::StatusOr<AdjacencyRelation> Parse(absl::string_view name,
                                                 int k = -1);

  Kind kind() const { return kind_; }
  int k() const { return k_; }
  bool is_edge() const { return kind_ == Kind::kEdge; }
  bool is_node() const { return kind_ == Kind::kNode; }
  bool is_kneighbor() const { return kind_ == Kind::kKNeighbor; }
  // "edge", "node" or "nk:<k>".
  std::string ToString() const;
  // "edge", "node" or "nk".
  absl::string_view Name() const;

  bool operator==(const AdjacencyRelation&) const = default;

 private:
  AdjacencyRelation(Kind kind, int k) : kind_(kind), k_(k) {}
  Kind kind_;
  int k_;
};

struct DegreeBound {
  int D = 1;
};

struct Violation {
  std::string invariant;
  int index = -1;
};

std::vector<Violation> Validate(const GraphDataset& dataset);

}  // namespace gdpkit

#endif  // GDPKIT_GRAPH_GRAPH_DATASET_H_
