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

#include "gdpkit/accounting/rdp_curve.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace gdpkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kCoarseGridSize = 4000;
constexpr int kGoldenIterations = 200;

constexpr double kDefaultAlphas[] = {1.25, 1.5, 1.75, 2,  2.5, 3,   4,
                                     5,    6,   8,    10, 12,  16,  20,
                                     32,   64,  128,  256, 512, 1024};

// Minimizes the conversion objective of slope * alpha over
// u = log(alpha - 1).
double MinimizeLinear(double slope, double delta) {
  const double u_lo = std::log(kMinAlpha - 1.0);
  const double u_hi = std::log(kMaxAlpha - 1.0);
  auto objective = [&](double u) {
    const double alpha = 1.0 + std::exp(u);
    return DpObjective(slope * alpha, alpha, delta);
  };
  const double step = (u_hi - u_lo) / (kCoarseGridSize - 1);
  int best_i = 0;
  double best = kInf;
  for (int i = 0; i < kCoarseGridSize; ++i) {
    const double v = objective(u_lo + step * i);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = u_lo + step * std::max(0, best_i - 1);
  double b = u_lo + step * std::min(kCoarseGridSize - 1, best_i + 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < kGoldenIterations && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = objective(x2);
    }
    best = std::min({best, f1, f2});
  }
  return best;
}

}  // namespace

absl::StatusOr<RdpCurve> RdpCurve::Linear(double slope) {
  if (std::isnan(slope) || slope < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("RDP slope must be non-negative, got ", slope));
  }
  return RdpCurve(slope);
}

RdpCurve RdpCurve::NonPrivate() {
  return RdpCurve(kInf).WithProvenance("non-private: no noise injected");
}

absl::StatusOr<RdpCurve> RdpCurve::Tabulated(std::vector<Point> grid) {
  if (grid.empty()) {
    return absl::InvalidArgumentError("tabulated curve needs at least one point");
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i].alpha > 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid order must exceed 1, got ", grid[i].alpha));
    }
    if (std::isnan(grid[i].gamma) || grid[i].gamma < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("gamma must be non-negative, got ", grid[i].gamma));
    }
    if (i > 0 && !(grid[i].alpha > grid[i - 1].alpha)) {
      return absl::InvalidArgumentError("grid orders must strictly increase");
    }
  }
  RdpCurve out(0.0);
  out.table_ = std::move(grid);
  return out;
}

bool RdpCurve::is_non_private() const {
  if (std::isinf(slope_)) return true;
  if (is_linear()) return false;
  return std::all_of(table_.begin(), table_.end(),
                     [](const Point& p) { return std::isinf(p.gamma); });
}

double RdpCurve::TableAt(double alpha) const {
  auto it = std::lower_bound(
      table_.begin(), table_.end(), alpha,
      [](const Point& p, double a) { return p.alpha < a; });
  if (it == table_.end()) return kInf;
  return it->gamma;
}

double RdpCurve::Evaluate(double alpha) const {
  const double linear = slope_ == 0.0 ? 0.0 : slope_ * alpha;
  if (is_linear()) return linear;
  return linear + TableAt(alpha);
}

std::vector<RdpCurve::Point> RdpCurve::grid() const {
  std::vector<Point> out;
  out.reserve(table_.size());
  for (const Point& p : table_) out.push_back({p.alpha, Evaluate(p.alpha)});
  return out;
}

RdpCurve RdpCurve::WithProvenance(std::string note) const {
  RdpCurve out = *this;
  out.provenance_.push_back(std::move(note));
  return out;
}

absl::StatusOr<RdpCurve> GaussianCurve(double sensitivity, double stddev) {
  if (!(stddev > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise std must be positive, got ", stddev));
  }
  if (std::isnan(sensitivity) || sensitivity < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be non-negative, got ", sensitivity));
  }
  return RdpCurve::Linear(sensitivity * sensitivity /
                          (2.0 * stddev * stddev));
}

absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves) {
  if (curves.empty()) {
    return absl::InvalidArgumentError("compose needs at least one curve");
  }
  std::vector<std::string> notes;
  for (const RdpCurve& c : curves) {
    notes.insert(notes.end(), c.provenance().begin(), c.provenance().end());
  }
  double slope = 0.0;
  for (const RdpCurve& c : curves) slope += c.slope_;
  RdpCurve out(slope);
  double max_alpha = kInf;
  std::vector<double> alphas;
  for (const RdpCurve& c : curves) {
    if (c.is_linear()) continue;
    max_alpha = std::min(max_alpha, c.table_.back().alpha);
    for (const auto& p : c.table_) alphas.push_back(p.alpha);
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  for (double a : alphas) {
    if (a > max_alpha) break;
    double gamma = 0.0;
    for (const RdpCurve& c : curves) {
      if (!c.is_linear()) gamma += c.TableAt(a);
    }
    out.table_.push_back({a, gamma});
  }
  for (std::string& n : notes) out = out.WithProvenance(std::move(n));
  return out;
}

absl::StatusOr<RdpCurve> ComposeAdaptive(const RdpCurve& first,
                                         const RdpCurve& second,
                                         const AdaptiveAttestation& attest) {
  if (!attest.first_rdp_in_released_output ||
      !attest.second_rdp_uniform_over_first_input) {
    return absl::FailedPreconditionError(
        "adaptive composition refused: both hypotheses must be attested "
        "(first mechanism RDP in its released output; second mechanism RDP "
        "in its second input uniformly over the first)");
  }
  const RdpCurve pair[] = {first, second};
  absl::StatusOr<RdpCurve> sum = Compose(pair);
  if (!sum.ok()) return sum.status();
  return sum->WithProvenance(
      "adaptive composition with non-private intermediate: attested");
}

double DpObjective(double gamma, double alpha, double delta) {
  return gamma + (-std::log(delta) - std::log(alpha)) / (alpha - 1.0) +
         std::log1p(-1.0 / alpha);
}

absl::StatusOr<double> ToDp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (curve.is_non_private()) return kInf;
  double best;
  if (curve.is_linear()) {
    best = MinimizeLinear(curve.slope(), delta);
  } else {
    best = kInf;
    for (const auto& p : curve.grid()) {
      best = std::min(best, DpObjective(p.gamma, p.alpha, delta));
    }
  }
  return std::max(0.0, best);
}

absl::StatusOr<double> SlopeForEpsilon(double epsilon, double delta) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  absl::StatusOr<double> floor = ToDp(RdpCurve::Zero(), delta);
  if (!floor.ok()) return floor.status();
  if (*floor > epsilon) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible: even the zero curve gives epsilon ", *floor));
  }
  double lo = 0.0, hi = 1.0;
  while (*ToDp(*RdpCurve::Linear(hi), delta) <= epsilon) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (*ToDp(*RdpCurve::Linear(mid), delta) <= epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::string CurveToCsv(const RdpCurve& curve, std::span<const double> alphas) {
  std::string out = "alpha,gamma\n";
  if (!curve.is_linear()) {
    for (const auto& p : curve.grid()) {
      absl::StrAppend(&out, absl::StrFormat("%.17g,%.17g\n", p.alpha, p.gamma));
    }
    return out;
  }
  if (alphas.empty()) alphas = kDefaultAlphas;
  for (double a : alphas) {
    absl::StrAppend(&out,
                    absl::StrFormat("%.17g,%.17g\n", a, curve.Evaluate(a)));
  }
  return out;
}

}  // namespace gdpkit
