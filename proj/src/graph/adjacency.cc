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

#include "gdpkit/graph/adjacency.h"

#include <algorithm>

namespace gdpkit {

Adjacency Adjacency::FromEdges(int n,
                               std::span<const std::pair<int, int>> edges) {
  Adjacency a(n);
  for (const auto& [src, dst] : edges) a.rows_[dst].push_back(src);
  for (auto& row : a.rows_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return a;
}

Adjacency Adjacency::FromDense(const Matrix& dense) {
  Adjacency a(static_cast<int>(dense.rows()));
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) a.rows_[i].push_back(j);
    }
  }
  return a;
}

bool Adjacency::Get(int i, int j) const {
  const auto& row = rows_[i];
  return std::binary_search(row.begin(), row.end(), j);
}

void Adjacency::Set(int i, int j, bool value) {
  auto& row = rows_[i];
  auto it = std::lower_bound(row.begin(), row.end(), j);
  const bool present = it != row.end() && *it == j;
  if (value && !present) {
    row.insert(it, j);
  } else if (!value && present) {
    row.erase(it);
  }
}

std::vector<int> Adjacency::Column(int j) const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i) {
    if (Get(i, j)) out.push_back(i);
  }
  return out;
}

std::vector<int> Adjacency::ColumnSums() const {
  std::vector<int> sums(n(), 0);
  for (const auto& row : rows_) {
    for (int j : row) ++sums[j];
  }
  return sums;
}

std::vector<int> Adjacency::RowSums() const {
  std::vector<int> sums(n(), 0);
  for (int i = 0; i < n(); ++i) sums[i] = static_cast<int>(rows_[i].size());
  return sums;
}

int Adjacency::MaxColumnSum() const {
  std::vector<int> sums = ColumnSums();
  return sums.empty() ? 0 : *std::max_element(sums.begin(), sums.end());
}

int64_t Adjacency::num_entries() const {
  int64_t total = 0;
  for (const auto& row : rows_) total += static_cast<int64_t>(row.size());
  return total;
}

std::vector<std::pair<int, int>> Adjacency::Edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_entries());
  for (int i = 0; i < n(); ++i) {
    for (int j : rows_[i]) out.emplace_back(j, i);
  }
  return out;
}

Matrix Adjacency::Multiply(const Matrix& h) const {
  Matrix out = Matrix::Zero(n(), h.cols());
  for (int i = 0; i < n(); ++i) {
    for (int j : rows_[i]) out.row(i) += h.row(j);
  }
  return out;
}

SparseMatrix Adjacency::ToSparse() const {
  std::vector<int> all(n());
  for (int i = 0; i < n(); ++i) all[i] = i;
  return RowsToSparse(all);
}

SparseMatrix Adjacency::RowsToSparse(std::span<const int> rows) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (size_t k = 0; k < rows.size(); ++k) {
    for (int j : rows_[rows[k]]) {
      triplets.emplace_back(static_cast<int>(k), j, 1.0);
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), n());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Matrix Adjacency::ToDense() const {
  Matrix out = Matrix::Zero(n(), n());
  for (int i = 0; i < n(); ++i) {
    for (int j : rows_[i]) out(i, j) = 1.0;
  }
  return out;
}

}  // namespace gdpkit
