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


#include "gdpkit/csbm/csbm.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gdpkit/common/random.h"
#include "gdpkit/graph/dataset_io.h"

namespace gdpkit {

absl::StatusOr<CsbmArc> PhiToParams(double phi, double eps_arc, double xi) {
  if (!(std::abs(phi) <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("phi must lie in [-1, 1], got ", phi));
  }
  if (!(eps_arc > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps_arc must be positive, got ", eps_arc));
  }
  if (!(xi > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("xi must be positive, got ", xi));
  }
  const double angle = phi * std::numbers::pi / 2.0;
  // Exact zeros at the ends of the arc.
  const double s = std::abs(phi) == 1.0 ? std::copysign(1.0, phi)
                                         : std::sin(angle);
  const double c = std::abs(phi) == 1.0 ? 0.0 : std::cos(angle);
  return CsbmArc{std::sqrt(1.0 + eps_arc) * s,
                 std::sqrt(xi * (1.0 + eps_arc)) * c};
}

absl::StatusOr<CsbmEdgeRates> EdgeRates(const CsbmParams& params) {
  if (params.n < 2 || params.f < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "csbm needs n >= 2 and f >= 1, got n = ", params.n, ", f = ",
        params.f));
  }
  if (!(params.d >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("average degree must be non-negative, got ", params.d));
  }
  absl::StatusOr<CsbmArc> arc =
      PhiToParams(params.phi, params.eps_arc, params.xi());
  if (!arc.ok()) return arc.status();
  const double spread = arc->lambda * std::sqrt(params.d);
  CsbmEdgeRates rates{(params.d + spread) / params.n,
                      (params.d - spread) / params.n};
  for (double p : {rates.intra, rates.inter}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge probability ", p, " outside [0, 1] (d = ", params.d,
          ", lambda = ", arc->lambda, ", n = ", params.n, ")"));
    }
  }
  return rates;
}

absl::StatusOr<GraphDataset> GenerateCsbm(const CsbmParams& params) {
  absl::StatusOr<CsbmEdgeRates> rates = EdgeRates(params);
  if (!rates.ok()) return rates.status();
  const CsbmArc arc = *PhiToParams(params.phi, params.eps_arc, params.xi());
  const int n = params.n;
  const int f = params.f;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  RandomStream community_rng(params.seed, "csbm_communities");
  std::shuffle(order.begin(), order.end(), community_rng.engine());
  std::vector<int> classes(n);
  for (int i = 0; i < n; ++i) classes[order[i]] = i < n / 2 ? 0 : 1;

  RandomStream edge_rng(params.seed, "csbm_edges");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = classes[i] == classes[j] ? rates->intra : rates->inter;
      if (edge_rng.Bernoulli(p)) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
    }
  }

  RandomStream feature_rng(params.seed, "csbm_features");
  const double inv_sqrt_f = 1.0 / std::sqrt(static_cast<double>(f));
  RowVector u(f);
  for (int k = 0; k < f; ++k) u(k) = feature_rng.Gaussian() * inv_sqrt_f;
  const double signal = std::sqrt(arc.mu / n);
  Matrix features(n, f);
  for (int i = 0; i < n; ++i) {
    const double v = classes[i] == 0 ? 1.0 : -1.0;
    for (int k = 0; k < f; ++k) {
      features(i, k) = signal * v * u(k) + feature_rng.Gaussian() * inv_sqrt_f;
    }
  }
  return MakeDataset(Adjacency::FromEdges(n, edges), std::move(features),
                     std::move(classes), 2, std::max(1, n / 2));
}

nlohmann::json CsbmMeta(const CsbmParams& params) {
  const CsbmArc arc = *PhiToParams(params.phi, params.eps_arc, params.xi());
  nlohmann::json block;
  block["n"] = params.n;
  block["f"] = params.f;
  block["d"] = params.d;
  block["phi"] = params.phi;
  block["eps_arc"] = params.eps_arc;
  block["lambda"] = arc.lambda;
  block["mu"] = arc.mu;
  block["seed"] = params.seed;
  return block;
}

absl::Status WriteCsbm(const GraphDataset& dataset, const CsbmParams& params,
                       const std::string& dir) {
  if (!PhiToParams(params.phi, params.eps_arc, params.xi()).ok()) {
    return absl::InvalidArgumentError("invalid csbm parameters");
  }
  nlohmann::json meta;
  meta["csbm"] = CsbmMeta(params);
  return WriteDataset(dataset, dir, /*directed=*/false, meta);
}

}  // namespace gdpkit
