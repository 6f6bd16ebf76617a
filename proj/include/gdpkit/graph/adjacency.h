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

#ifndef GDPKIT_GRAPH_ADJACENCY_H_
#define GDPKIT_GRAPH_ADJACENCY_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gdpkit/common/types.h"

namespace gdpkit {

// Binary n x n matrix stored as sorted column indices per row.
//
// A(i, j) = 1 means j -> i: row i lists the in-neighbors of i and the
// column sum of j is the out-degree of j. N(r) = {i : A(i, r) = 1}.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(int n) : rows_(n) {}

  // Builds from (src, dst) pairs; sets A(dst, src) = 1. Duplicates collapse.
  static Adjacency FromEdges(int n,
                             std::span<const std::pair<int, int>> edges);
  static Adjacency FromDense(const Matrix& dense);

  int n() const { return static_cast<int>(rows_.size()); }
  bool Get(int i, int j) const;
  void Set(int i, int j, bool value);
  void Flip(int i, int j) { Set(i, j, !Get(i, j)); }

  // Sorted column indices of the ones in row i.
  std::span<const int> Row(int i) const { return rows_[i]; }
  std::vector<int> Column(int j) const;
  std::vector<int> ColumnSums() const;
  std::vector<int> RowSums() const;
  int MaxColumnSum() const;
  int64_t num_entries() const;

  // (src, dst) pairs ordered by dst then src.
  std::vector<std::pair<int, int>> Edges() const;

  Matrix Multiply(const Matrix& h) const;
  SparseMatrix ToSparse() const;
  // Sparse matrix of the selected rows, in order.
  SparseMatrix RowsToSparse(std::span<const int> rows) const;
  Matrix ToDense() const;

  bool operator==(const Adjacency& other) const = default;

 private:
  std::vector<std::vector<int>> rows_;
};

}  // namespace gdpkit

#endif  // GDPKIT_GRAPH_ADJACENCY_H_
