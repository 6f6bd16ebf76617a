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


#include "gdpkit/mechanisms/mechanism_params.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace gdpkit {

absl::StatusOr<ModelKind> ParseModelKind(absl::string_view name) {
  if (name == "dpdgc") return ModelKind::kDpdgc;
  if (name == "gap") return ModelKind::kGap;
  if (name == "mlp") return ModelKind::kMlp;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown model '", name, "' (dpdgc, gap, mlp)"));
}

absl::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDpdgc:
      return "dpdgc";
    case ModelKind::kGap:
      return "gap";
    case ModelKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

absl::StatusOr<double> TheoreticalSensitivity(
    ModelKind design, const AdjacencyRelation& relation,
    std::optional<DegreeBound> bound, double c) {
  if (design == ModelKind::kMlp) {
    return absl::InvalidArgumentError("the MLP baseline has no graph mechanism");
  }
  if (relation.is_kneighbor() && relation.k() < 0) {
    return absl::InvalidArgumentError("k must be non-negative");
  }
  const bool needs_bound =
      design == ModelKind::kGap ? !relation.is_edge() : relation.is_node();
  if (needs_bound) {
    if (!bound.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          ModelKindName(design), " under ", relation.ToString(),
          " needs an out-degree bound D"));
    }
    if (bound->D < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("degree bound must be non-negative, got ", bound->D));
    }
  }
  if (design == ModelKind::kGap) {
    if (relation.is_edge()) return 1.0;
    return 2.0 * std::sqrt(static_cast<double>(bound->D));
  }
  if (!(c > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("c must be positive, got ", c));
  }
  if (relation.is_edge()) return c;
  if (relation.is_node()) return c * std::sqrt(2.0 * bound->D);
  return c * std::sqrt(static_cast<double>(relation.k()));
}

}  // namespace gdpkit
