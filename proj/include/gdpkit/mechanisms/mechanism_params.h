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


#ifndef GDPKIT_MECHANISMS_MECHANISM_PARAMS_H_
#define GDPKIT_MECHANISMS_MECHANISM_PARAMS_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "gdpkit/graph/graph_dataset.h"

namespace gdpkit {

enum class ModelKind { kDpdgc, kGap, kMlp };

// "dpdgc", "gap" or "mlp".
absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name);
absl::string_view ModelKindName(ModelKind kind);

struct MechanismParams {
  // Gaussian std before any c scaling.
  double s = 1.0;
  // Row norm of W_A.
  double c = 1.0;
  // Number of PMA hops; GAP only.
  int hops = 1;
  std::optional<DegreeBound> degree_bound;
};

// Per-release L2 sensitivity. GAP: per hop, 1 under Edge and 2 sqrt(D) under
// Node or any KNeighbor(k). DPDGC: c under Edge, c sqrt(2D) under Node and
// c sqrt(k) under KNeighbor(k). D is required only where it appears.
absl::StatusOr<double> TheoreticalSensitivity(
    ModelKind design, const AdjacencyRelation& relation,
    std::optional<DegreeBound> bound, double c);

}  // namespace gdpkit

#endif  // GDPKIT_MECHANISMS_MECHANISM_PARAMS_H_
