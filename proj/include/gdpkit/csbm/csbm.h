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


#ifndef GDPKIT_CSBM_CSBM_H_
#define GDPKIT_CSBM_CSBM_H_

#include <cstdint>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gdpkit/graph/graph_dataset.h"
#include "nlohmann/json.hpp"

namespace gdpkit {

inline constexpr double kDefaultEpsArc = 3.25;

struct CsbmParams {
  int n = 1000;
  int f = 200;
  double d = 10.0;
  double phi = 0.0;
  double eps_arc = kDefaultEpsArc;
  uint64_t seed = 0;

  double xi() const { return static_cast<double>(n) / f; }
};

struct CsbmArc {
  double lambda;
  double mu;
};

// Angular point on the arc lambda^2 + mu^2 / xi = 1 + eps_arc:
// lambda = sqrt(1 + eps_arc) sin(phi pi / 2),
// mu = sqrt(xi (1 + eps_arc)) cos(phi pi / 2).
absl::StatusOr<CsbmArc> PhiToParams(double phi, double eps_arc, double xi);

// Intra- and inter-community edge probabilities (d +- lambda sqrt(d)) / n.
struct CsbmEdgeRates {
  double intra;
  double inter;
};
absl::StatusOr<CsbmEdgeRates> EdgeRates(const CsbmParams& params);

// Two-community cSBM. Communities are a seeded balanced assignment, edges are
// symmetric with an empty diagonal and features follow
// b_i = sqrt(mu / n) v_i u + Z_i / sqrt(f). The first half of the nodes (in
// index order) carries training labels; every node keeps its class.
absl::StatusOr<GraphDataset> GenerateCsbm(const CsbmParams& params);

// The "csbm" block recorded in meta.json.
nlohmann::json CsbmMeta(const CsbmParams& params);

absl::Status WriteCsbm(const GraphDataset& dataset, const CsbmParams& params,
                       const std::string& dir);

}  // namespace gdpkit

#endif  // GDPKIT_CSBM_CSBM_H_
