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

#ifndef GDPKIT_GRAPH_DATASET_IO_H_
#define GDPKIT_GRAPH_DATASET_IO_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gdpkit/graph/graph_dataset.h"
#include "nlohmann/json.hpp"

namespace gdpkit {

// Directory layout: meta.json, edges.csv, features.csv, labels.csv.
// labels.csv lists every node with a known class; rows for nodes at or past
// m_labeled are evaluation labels. `extra_meta` is merged into meta.json.
absl::Status WriteDataset(const GraphDataset& dataset, const std::string& dir,
                          bool directed,
                          const nlohmann::json& extra_meta = nlohmann::json());

struct LoadedDataset {
  GraphDataset dataset;
  nlohmann::json meta;
};

// When meta.json says "directed": false the edge list is symmetrized.
absl::StatusOr<LoadedDataset> ReadDataset(const std::string& dir);

// Formats a double so that it parses back to the same value.
std::string FormatDouble(double v);

}  // namespace gdpkit

#endif  // GDPKIT_GRAPH_DATASET_IO_H_
