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

#include "gdpkit/graph/graph_ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "gdpkit/common/random.h"

namespace gdpkit {
namespace {

// Visits every subset of {0..m-1} with at most kmax elements, by size and
// then lexicographically. Stops when `visit` returns false.
bool ForEachSubset(int m, int kmax,
                   const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> idx;
  for (int size = 0; size <= std::min(kmax, m); ++size) {
    idx.resize(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      if (!visit(idx)) return false;
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == m - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return true;
}

int64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

int TopologyFlipLimit(int n, const AdjacencyRelation& relation) {
  if (relation.is_node()) return n - 1;
  return std::min(relation.k(), n - 1);
}

}  // namespace

Adjacency SubsampleOutDegree(const Adjacency& adjacency, DegreeBound bound,
                             uint64_t seed) {
  Adjacency out = adjacency;
  const int n = adjacency.n();
  std::vector<std::vector<int>> columns(n);
  for (int i = 0; i < n; ++i) {
    for (int j : adjacency.Row(i)) columns[j].push_back(i);
  }
  for (int j = 0; j < n; ++j) {
    auto& col = columns[j];
    if (static_cast<int>(col.size()) <= bound.D) continue;
    RandomStream rng(seed, "subsample_out_degree", static_cast<uint64_t>(j));
    std::vector<int> keep;
    std::sample(col.begin(), col.end(), std::back_inserter(keep), bound.D,
                rng.engine());
    std::sort(keep.begin(), keep.end());
    for (int i : col) {
      if (!std::binary_search(keep.begin(), keep.end(), i)) out.Set(i, j, false);
    }
  }
  return out;
}

GraphDataset SubsampleOutDegree(const GraphDataset& dataset, DegreeBound bound,
                                uint64_t seed) {
  GraphDataset out = dataset;
  out.adjacency = SubsampleOutDegree(dataset.adjacency, bound, seed);
  return out;
}

absl::StatusOr<double> EdgeDensity(const GraphDataset& dataset) {
  const double n = dataset.n();
  if (dataset.n() < 2) {
    return absl::InvalidArgumentError("edge density needs n >= 2");
  }
  return 2.0 * static_cast<double>(dataset.adjacency.num_entries()) /
         (n * (n - 1.0));
}

absl::StatusOr<double> Homophily(const GraphDataset& dataset) {
  const int num_classes = dataset.num_classes();
  if (num_classes < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("homophily needs C >= 2, got ", num_classes));
  }
  const int n = dataset.n();
  std::vector<int> cls(n);
  std::vector<int64_t> class_sizes(num_classes, 0);
  int64_t known = 0;
  for (int i = 0; i < n; ++i) {
    cls[i] = dataset.ClassOf(i);
    if (cls[i] >= 0 && cls[i] < num_classes) {
      ++class_sizes[cls[i]];
      ++known;
    } else {
      cls[i] = -1;
    }
  }
  std::vector<int64_t> same(num_classes, 0);
  int64_t counted = 0;
  for (int i = 0; i < n; ++i) {
    if (cls[i] < 0) continue;
    for (int j : dataset.adjacency.Row(i)) {
      if (cls[j] < 0) continue;
      ++counted;
      if (cls[i] == cls[j]) ++same[cls[i]];
    }
  }
  if (counted == 0) return 0.0;
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double h = static_cast<double>(same[c]) / counted;
    const double prior = static_cast<double>(class_sizes[c]) / known;
    total += std::max(0.0, h - prior);
  }
  return total / (num_classes - 1);
}

absl::StatusOr<GraphDataset> SampleAdjacent(const GraphDataset& dataset,
                                            const AdjacencyRelation& relation,
                                            int r, uint64_t seed) {
  const int n = dataset.n();
  if (r < 0 || r >= n) {
    return absl::InvalidArgumentError(
        absl::StrCat("node ", r, " out of range [0, ", n, ")"));
  }
  if (!relation.is_edge() && r >= dataset.m_labeled) {
    return absl::InvalidArgumentError(absl::StrCat(
        "node ", r, " is unlabeled; node replacement needs r < m"));
  }
  if (n < 2) return absl::InvalidArgumentError("need at least two nodes");
  RandomStream rng(seed, "sample_adjacent", static_cast<uint64_t>(r));
  GraphDataset out = dataset;

  if (relation.is_edge()) {
    // One off-diagonal entry of row r.
    int j = static_cast<int>(rng.UniformInt(n - 1));
    if (j >= r) ++j;
    out.adjacency.Flip(r, j);
    return out;
  }

  const double norm = dataset.features.row(r).norm();
  const double scale = norm > 0.0 ? norm : 1.0;
  RowVector fresh(dataset.num_features());
  for (int f = 0; f < fresh.size(); ++f) fresh(f) = rng.Gaussian();
  const double fresh_norm = fresh.norm();
  if (fresh_norm > 0.0) fresh *= scale / fresh_norm;
  out.features.row(r) = fresh;
  const int num_classes = dataset.num_classes();
  const int new_class = static_cast<int>(rng.UniformInt(num_classes));
  out.labels.row(r).setZero();
  out.labels(r, new_class) = 1.0;
  if (r < static_cast<int>(out.classes.size())) out.classes[r] = new_class;

  std::vector<int> others;
  for (int i = 0; i < n; ++i) {
    if (i != r) others.push_back(i);
  }
  if (relation.is_node()) {
    for (int j : others) out.adjacency.Set(r, j, rng.Bernoulli(0.5));
    for (int i : others) out.adjacency.Set(i, r, rng.Bernoulli(0.5));
    return out;
  }
  const int kmax = std::min(relation.k(), n - 1);
  for (int pass = 0; pass < 2; ++pass) {
    const int flips = static_cast<int>(rng.UniformInt(kmax + 1));
    std::vector<int> chosen;
    std::sample(others.begin(), others.end(), std::back_inserter(chosen),
                flips, rng.engine());
    for (int x : chosen) {
      if (pass == 0) {
        out.adjacency.Flip(r, x);
      } else {
        out.adjacency.Flip(x, r);
      }
    }
  }
  return out;
}

int64_t CountAdjacent(int n, const AdjacencyRelation& relation) {
  if (relation.is_edge()) return static_cast<int64_t>(n) * (n - 1);
  const int kmax = TopologyFlipLimit(n, relation);
  int64_t side = 0;
  for (int i = 0; i <= kmax; ++i) side += Binomial(n - 1, i);
  return side * side;
}

absl::StatusOr<int64_t> ForEachAdjacent(
    const Adjacency& base, const AdjacencyRelation& relation, int r,
    const std::function<bool(const Adjacency&)>& visit) {
  const int n = base.n();
  if (n > kMaxEnumerationNodes) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exhaustive enumeration refused: n = ", n, " exceeds ",
        kMaxEnumerationNodes));
  }
  if (r < 0 || r >= n) {
    return absl::InvalidArgumentError(absl::StrCat("node ", r, " out of range"));
  }
  Adjacency work = base;
  int64_t visited = 0;
  if (relation.is_edge()) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        work.Flip(i, j);
        ++visited;
        const bool go_on = visit(work);
        work.Flip(i, j);
        if (!go_on) return visited;
      }
    }
    return visited;
  }
  std::vector<int> others;
  for (int i = 0; i < n; ++i) {
    if (i != r) others.push_back(i);
  }
  const int m = static_cast<int>(others.size());
  const int kmax = TopologyFlipLimit(n, relation);
  ForEachSubset(m, kmax, [&](const std::vector<int>& row_flips) {
    for (int x : row_flips) work.Flip(r, others[x]);
    const bool go_on =
        ForEachSubset(m, kmax, [&](const std::vector<int>& col_flips) {
          for (int x : col_flips) work.Flip(others[x], r);
          ++visited;
          const bool keep = visit(work);
          for (int x : col_flips) work.Flip(others[x], r);
          return keep;
        });
    for (int x : row_flips) work.Flip(r, others[x]);
    return go_on;
  });
  return visited;
}

absl::StatusOr<AdjacentEnumeration> EnumerateAdjacent(
    const GraphDataset& dataset, const AdjacencyRelation& relation, int r,
    int64_t max_count) {
  AdjacentEnumeration out;
  absl::StatusOr<int64_t> visited = ForEachAdjacent(
      dataset.adjacency, relation, r, [&](const Adjacency& a) {
        if (static_cast<int64_t>(out.adjacencies.size()) >= max_count) {
          out.truncated = true;
          return false;
        }
        out.adjacencies.push_back(a);
        return true;
      });
  if (!visited.ok()) return visited.status();
  return out;
}

void RowNormalizeInPlace(Matrix& matrix, double target) {
  // Rows already at the target up to the rounding error of the norm itself
  // are left as they are, so a second pass is a no-op.
  const double tolerance =
      (static_cast<double>(matrix.cols()) + 4.0) *
      std::numeric_limits<double>::epsilon();
  for (int i = 0; i < matrix.rows(); ++i) {
    const double norm = matrix.row(i).norm();
    if (norm == 0.0) continue;
    if (std::abs(norm - target) <= tolerance * target) continue;
    matrix.row(i) *= target / norm;
  }
}

absl::StatusOr<Matrix> RowNormalize(const Matrix& matrix, double target) {
  if (!(target > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("row_normalize target must be positive, got ", target));
  }
  Matrix out = matrix;
  RowNormalizeInPlace(out, target);
  return out;
}

}  // namespace gdpkit
