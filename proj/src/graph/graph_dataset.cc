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

#include "gdpkit/graph/graph_dataset.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace gdpkit {

int GraphDataset::ClassOf(int i) const {
  if (i < m_labeled && i < labels.rows()) {
    for (int c = 0; c < labels.cols(); ++c) {
      if (labels(i, c) == 1.0) return c;
    }
    return -1;
  }
  if (i < static_cast<int>(classes.size())) return classes[i];
  return -1;
}

absl::StatusOr<GraphDataset> MakeDataset(Adjacency adjacency, Matrix features,
                                         std::vector<int> classes,
                                         int num_classes, int m_labeled) {
  const int n = adjacency.n();
  if (features.rows() != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("features has ", features.rows(), " rows, expected ", n));
  }
  if (static_cast<int>(classes.size()) != n) {
    return absl::InvalidArgumentError("classes must have one entry per node");
  }
  if (m_labeled <= 0 || m_labeled > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("m_labeled must be in (0, n], got ", m_labeled));
  }
  GraphDataset d;
  d.m_labeled = m_labeled;
  d.adjacency = std::move(adjacency);
  d.features = std::move(features);
  d.labels = Matrix::Zero(m_labeled, num_classes);
  for (int i = 0; i < m_labeled; ++i) {
    if (classes[i] < 0 || classes[i] >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("training node ", i, " has no valid class"));
    }
    d.labels(i, classes[i]) = 1.0;
  }
  d.classes = std::move(classes);
  return d;
}

absl::StatusOr<AdjacencyRelation> AdjacencyRelation::Parse(
    absl::string_view name, int k) {
  if (name == "edge") return Edge();
  if (name == "node") return Node();
  if (absl::StartsWith(name, "nk:")) {
    int parsed;
    if (!absl::SimpleAtoi(name.substr(3), &parsed) || parsed < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad k in relation '", name, "'"));
    }
    return KNeighbor(parsed);
  }
  if (name == "nk" || name == "kneighbor") {
    if (k < 0) {
      return absl::InvalidArgumentError("relation nk needs a non-negative k");
    }
    return KNeighbor(k);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown relation '", name, "' (edge, node, nk)"));
}

std::string AdjacencyRelation::ToString() const {
  if (kind_ == Kind::kKNeighbor) return absl::StrCat("nk:", k_);
  return std::string(Name());
}

absl::string_view AdjacencyRelation::Name() const {
  switch (kind_) {
    case Kind::kEdge:
      return "edge";
    case Kind::kNode:
      return "node";
    case Kind::kKNeighbor:
      return "nk";
  }
  return "";
}

std::vector<Violation> Validate(const GraphDataset& dataset) {
  std::vector<Violation> out;
  const int n = dataset.n();
  for (int i = 0; i < n; ++i) {
    if (dataset.adjacency.Get(i, i)) out.push_back({"zero-diagonal", i});
  }
  if (dataset.m_labeled <= 0 || dataset.m_labeled > n) {
    out.push_back({"0 < m_labeled <= n", dataset.m_labeled});
  }
  if (dataset.features.rows() != n) {
    out.push_back({"features has n rows",
                   static_cast<int>(dataset.features.rows())});
  }
  if (dataset.labels.rows() != dataset.m_labeled) {
    out.push_back({"labels has m_labeled rows",
                   static_cast<int>(dataset.labels.rows())});
  }
  for (int i = 0; i < dataset.labels.rows(); ++i) {
    int ones = 0;
    bool binary = true;
    for (int c = 0; c < dataset.labels.cols(); ++c) {
      const double v = dataset.labels(i, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        binary = false;
      }
    }
    if (!binary || ones != 1) out.push_back({"one-hot labels", i});
  }
  return out;
}

}  // namespace gdpkit
