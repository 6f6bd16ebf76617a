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


#ifndef GDPKIT_ACCOUNTING_GDP_BUDGET_H_
#define GDPKIT_ACCOUNTING_GDP_BUDGET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "gdpkit/accounting/rdp_curve.h"
#include "gdpkit/graph/graph_dataset.h"
#include "gdpkit/mechanisms/mechanism_params.h"
#include "nlohmann/json.hpp"

namespace gdpkit {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 1e-5;
};

// Sizes used for the delta cap (1/#edges for Edge, 1/#nodes otherwise).
struct DatasetCounts {
  int64_t nodes = 0;
  int64_t edges = 0;
};

struct GdpReport {
  ModelKind model = ModelKind::kMlp;
  AdjacencyRelation relation = AdjacencyRelation::Node();
  RdpCurve gamma1 = RdpCurve::Zero();
  RdpCurve gamma2 = RdpCurve::Zero();
  RdpCurve mechanism = RdpCurve::Zero();
  RdpCurve total = RdpCurve::Zero();
  PrivacyBudget converted;
  // "dpdgc-edge", "dpdgc-node", "dpdgc-kneighbor", "gap-edge", "gap-node",
  // "gap-kneighbor" or "mlp".
  std::string corollary;
  std::vector<std::string> warnings;
};

// Curve of the graph mechanism alone: one Gaussian release for DPDGC, L
// composed hops for GAP, zero for MLP. s = 0 with positive sensitivity gives
// the non-private sentinel.
absl::StatusOr<RdpCurve> MechanismCurve(ModelKind model,
                                        const AdjacencyRelation& relation,
                                        const MechanismParams& params);

// Assembles the end-to-end guarantee:
//   dpdgc-edge       gamma1 + alpha / (2 s^2)
//   dpdgc-node       gamma1 + gamma2 + 2 D alpha / (2 s^2)
//   dpdgc-kneighbor  gamma1 + gamma2 + k alpha / (2 s^2)
//   gap-edge         L alpha / (2 s^2)
//   gap-node/k       gamma1 + gamma2 + 4 D L alpha / (2 s^2)
//   mlp              gamma1 + gamma2
// Under Edge, optimizer terms that the relation cannot touch must be zero.
absl::StatusOr<GdpReport> GdpBudget(
    ModelKind model, const AdjacencyRelation& relation,
    const MechanismParams& params, const RdpCurve& gamma1,
    const RdpCurve& gamma2, double delta,
    std::optional<DatasetCounts> counts = std::nullopt);

// Everything but the noise std.
struct BudgetTemplate {
  ModelKind model = ModelKind::kDpdgc;
  AdjacencyRelation relation = AdjacencyRelation::Node();
  MechanismParams params;
  RdpCurve gamma1 = RdpCurve::Zero();
  RdpCurve gamma2 = RdpCurve::Zero();
};

// Smallest s whose assembled budget converts to at most target.epsilon, with
// target.epsilon - epsilon(s) < kCalibrationSlack. Returns 0 when the
// mechanism has zero sensitivity. FailedPrecondition (message carries the
// floor epsilon) when the fixed terms alone exceed the target.
inline constexpr double kCalibrationSlack = 1e-4;
absl::StatusOr<double> CalibrateNoise(const PrivacyBudget& target,
                                      const BudgetTemplate& tmpl);

// Slope of a linear curve, or nullopt for tabulated and non-private curves.
std::optional<double> FiniteSlope(const RdpCurve& curve);

nlohmann::json ReportToJson(const GdpReport& report);

}  // namespace gdpkit

#endif  // GDPKIT_ACCOUNTING_GDP_BUDGET_H_
