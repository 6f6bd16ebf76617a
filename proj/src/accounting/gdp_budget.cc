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


#include "gdpkit/accounting/gdp_budget.h"

#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace gdpkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool IsZeroCurve(const RdpCurve& curve) {
  if (curve.is_linear()) return curve.slope() == 0.0;
  for (const auto& p : curve.grid()) {
    if (p.gamma != 0.0) return false;
  }
  return true;
}

std::string CorollaryTag(ModelKind model, const AdjacencyRelation& relation) {
  if (model == ModelKind::kMlp) return "mlp";
  std::string rel = relation.is_edge()   ? "edge"
                    : relation.is_node() ? "node"
                                         : "kneighbor";
  return absl::StrCat(ModelKindName(model), "-", rel);
}

absl::StatusOr<RdpCurve> Sum(const RdpCurve& a, const RdpCurve& b) {
  const RdpCurve pair[] = {a, b};
  return Compose(pair);
}

}  // namespace

absl::StatusOr<RdpCurve> MechanismCurve(ModelKind model,
                                        const AdjacencyRelation& relation,
                                        const MechanismParams& params) {
  if (model == ModelKind::kMlp) {
    return RdpCurve::Zero().WithProvenance("no graph mechanism");
  }
  if (params.hops < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("hop count must be >= 1, got ", params.hops));
  }
  if (model == ModelKind::kDpdgc && params.hops != 1) {
    return absl::InvalidArgumentError(
        "hop count applies to GAP only; DPDGC releases once");
  }
  if (std::isnan(params.s) || params.s < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise std must be non-negative, got ", params.s));
  }
  absl::StatusOr<double> sens = TheoreticalSensitivity(
      model, relation, params.degree_bound, params.c);
  if (!sens.ok()) return sens.status();
  if (*sens == 0.0) {
    return RdpCurve::Zero().WithProvenance(
        absl::StrCat(ModelKindName(model), " release under ",
                     relation.ToString(), ": zero sensitivity"));
  }
  if (params.s == 0.0) return RdpCurve::NonPrivate();
  const double stddev =
      model == ModelKind::kDpdgc ? params.c * params.s : params.s;
  absl::StatusOr<RdpCurve> hop = GaussianCurve(*sens, stddev);
  if (!hop.ok()) return hop.status();
  const std::string note = absl::StrFormat(
      "%s gaussian release under %s: sensitivity %.17g, std %.17g, %d hop(s)",
      ModelKindName(model), relation.ToString(), *sens, stddev, params.hops);
  if (params.hops == 1) return hop->WithProvenance(note);
  std::vector<RdpCurve> hops(params.hops, *hop);
  absl::StatusOr<RdpCurve> all = Compose(hops);
  if (!all.ok()) return all.status();
  return all->WithProvenance(note);
}

absl::StatusOr<GdpReport> GdpBudget(ModelKind model,
                                    const AdjacencyRelation& relation,
                                    const MechanismParams& params,
                                    const RdpCurve& gamma1,
                                    const RdpCurve& gamma2, double delta,
                                    std::optional<DatasetCounts> counts) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (relation.is_edge() && model == ModelKind::kDpdgc &&
      !IsZeroCurve(gamma2)) {
    return absl::InvalidArgumentError(
        "dpdgc under edge adjacency trains the classifier with a standard "
        "optimizer; gamma2 must be zero");
  }
  if (relation.is_edge() && model == ModelKind::kGap &&
      (!IsZeroCurve(gamma1) || !IsZeroCurve(gamma2))) {
    return absl::InvalidArgumentError(
        "gap under edge adjacency has no optimizer terms; gamma1 and gamma2 "
        "must be zero");
  }
  absl::StatusOr<RdpCurve> mech = MechanismCurve(model, relation, params);
  if (!mech.ok()) return mech.status();

  GdpReport report;
  report.model = model;
  report.relation = relation;
  report.gamma1 = gamma1;
  report.gamma2 = gamma2;
  report.mechanism = *mech;
  report.corollary = CorollaryTag(model, relation);

  const AdaptiveAttestation attest{.first_rdp_in_released_output = true,
                                   .second_rdp_uniform_over_first_input = true};
  absl::StatusOr<RdpCurve> total;
  if (model == ModelKind::kMlp) {
    total = Sum(gamma1, gamma2);
  } else {
    // The trained weights (or H) feed the release, and the release feeds the
    // classifier.
    total = ComposeAdaptive(gamma1, *mech, attest);
    if (total.ok()) total = ComposeAdaptive(*total, gamma2, attest);
  }
  if (!total.ok()) return total.status();
  report.total = total->WithProvenance(
      absl::StrCat("assembled as ", report.corollary));

  if (counts.has_value()) {
    const int64_t size = relation.is_edge() ? counts->edges : counts->nodes;
    if (size > 0 && !(delta < 1.0 / static_cast<double>(size))) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "delta %g is not below 1/%d (1/#%s)", delta, size,
          relation.is_edge() ? "edges" : "nodes"));
    }
  } else {
    report.warnings.push_back(absl::StrCat(
        "delta cap (1/#", relation.is_edge() ? "edges" : "nodes",
        ") not checked: no dataset attached"));
  }

  absl::StatusOr<double> eps = ToDp(report.total, delta);
  if (!eps.ok()) return eps.status();
  report.converted = {*eps, delta};
  return report;
}

absl::StatusOr<double> CalibrateNoise(const PrivacyBudget& target,
                                      const BudgetTemplate& tmpl) {
  if (tmpl.model == ModelKind::kMlp) {
    return absl::InvalidArgumentError(
        "the MLP baseline has no mechanism noise to calibrate");
  }
  if (!(target.epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target epsilon must be positive, got ", target.epsilon));
  }
  absl::StatusOr<double> sens = TheoreticalSensitivity(
      tmpl.model, tmpl.relation, tmpl.params.degree_bound, tmpl.params.c);
  if (!sens.ok()) return sens.status();

  auto epsilon_at = [&](double s) -> absl::StatusOr<double> {
    MechanismParams p = tmpl.params;
    p.s = s;
    absl::StatusOr<GdpReport> r = GdpBudget(tmpl.model, tmpl.relation, p,
                                            tmpl.gamma1, tmpl.gamma2,
                                            target.delta);
    if (!r.ok()) return r.status();
    return r->converted.epsilon;
  };

  absl::StatusOr<double> floor = epsilon_at(kInf);
  if (!floor.ok()) return floor.status();
  if (*floor > target.epsilon) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "infeasible: fixed terms alone give epsilon %.6f > target %.6f "
        "(floor epsilon %.17g)",
        *floor, target.epsilon, *floor));
  }
  if (*sens == 0.0) return 0.0;

  double hi = 1.0;
  double lo = 0.0;
  double eps_hi = 0.0;
  for (int it = 0;; ++it) {
    absl::StatusOr<double> e = epsilon_at(hi);
    if (!e.ok()) return e.status();
    if (*e <= target.epsilon) {
      eps_hi = *e;
      break;
    }
    lo = hi;
    hi *= 2.0;
    if (it > 2000) return absl::InternalError("calibration did not bracket");
  }
  if (lo == 0.0) {
    lo = hi;
    for (int it = 0;; ++it) {
      lo *= 0.5;
      absl::StatusOr<double> e = epsilon_at(lo);
      if (!e.ok()) return e.status();
      if (*e > target.epsilon) break;
      hi = lo;
      eps_hi = *e;
      if (it > 2000) return absl::InternalError("calibration did not bracket");
    }
  }
  for (int it = 0; it < 200 && target.epsilon - eps_hi >= kCalibrationSlack;
       ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    absl::StatusOr<double> e = epsilon_at(mid);
    if (!e.ok()) return e.status();
    if (*e <= target.epsilon) {
      hi = mid;
      eps_hi = *e;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::optional<double> FiniteSlope(const RdpCurve& curve) {
  if (!curve.is_linear() || std::isinf(curve.slope())) return std::nullopt;
  return curve.slope();
}

nlohmann::json ReportToJson(const GdpReport& report) {
  auto slope = [](const RdpCurve& c) -> nlohmann::json {
    std::optional<double> s = FiniteSlope(c);
    if (s.has_value()) return *s;
    return nullptr;
  };
  nlohmann::json out;
  out["model"] = std::string(ModelKindName(report.model));
  out["relation"] = report.relation.ToString();
  out["components"] = {{"gamma1_slope", slope(report.gamma1)},
                       {"gamma2_slope", slope(report.gamma2)},
                       {"mechanism_slope", slope(report.mechanism)}};
  out["total_slope"] = slope(report.total);
  if (std::isfinite(report.converted.epsilon)) {
    out["epsilon"] = report.converted.epsilon;
  } else {
    out["epsilon"] = nullptr;
  }
  out["delta"] = report.converted.delta;
  out["corollary"] = report.corollary;
  out["provenance"] = report.total.provenance();
  out["warnings"] = report.warnings;
  return out;
}

}  // namespace gdpkit
