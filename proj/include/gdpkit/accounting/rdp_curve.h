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

#ifndef GDPKIT_ACCOUNTING_RDP_CURVE_H_
#define GDPKIT_ACCOUNTING_RDP_CURVE_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace gdpkit {

// Search domain for the RDP order alpha.
inline constexpr double kMinAlpha = 1.0 + 1e-6;
inline constexpr double kMaxAlpha = 1e6;

// Renyi-DP guarantee alpha -> gamma(alpha). Either gamma = slope * alpha for
// all alpha > 1, or a finite grid of (alpha, gamma) points. Sums of the two
// keep the linear part apart from the table so composition stays exact.
class RdpCurve {
 public:
  struct Point {
    double alpha;
    double gamma;
    bool operator==(const Point&) const = default;
  };

  static RdpCurve Zero() { return RdpCurve(0.0); }
  // Slope may be +infinity (see NonPrivate).
  static absl::StatusOr<RdpCurve> Linear(double slope);
  // Infinite-slope sentinel for mechanisms without noise.
  static RdpCurve NonPrivate();
  friend absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves);
  static absl::StatusOr<RdpCurve> Tabulated(std::vector<Point> grid);

  bool is_linear() const { return table_.empty(); }
  bool is_non_private() const;
  // Linear part. Equals the whole curve when is_linear().
  double slope() const { return slope_; }
  // Grid orders with the full gamma at each. Empty for linear curves.
  std::vector<Point> grid() const;

  // Tabulated curves are evaluated at the smallest grid order >= alpha,
  // which upper-bounds gamma because Renyi divergence is non-decreasing in
  // the order. Orders past the grid give +infinity.
  double Evaluate(double alpha) const;

  const std::vector<std::string>& provenance() const { return provenance_; }
  RdpCurve WithProvenance(std::string note) const;

 private:
  explicit RdpCurve(double slope) : slope_(slope) {}
  double TableAt(double alpha) const;

  double slope_ = 0.0;
  std::vector<Point> table_;
  std::vector<std::string> provenance_;
};

// Gaussian mechanism with L2 sensitivity `sensitivity` and noise std `stddev`:
// slope sensitivity^2 / (2 stddev^2).
absl::StatusOr<RdpCurve> GaussianCurve(double sensitivity, double stddev);

// Pointwise sum. Linear inputs stay linear; otherwise the result is
// tabulated on the union of the input grids.
absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves);

// Caller-supplied statement that the hypotheses of adaptive composition with
// a non-private intermediate hold.
struct AdaptiveAttestation {
  // The first mechanism is RDP in the output it releases.
  bool first_rdp_in_released_output = false;
  // The second mechanism is RDP in its second input, uniformly over the
  // first input.
  bool second_rdp_uniform_over_first_input = false;
};

absl::StatusOr<RdpCurve> ComposeAdaptive(const RdpCurve& first,
                                         const RdpCurve& second,
                                         const AdaptiveAttestation& attest);

// (epsilon, delta)-DP implied by the curve:
// inf_alpha gamma(alpha) + log(1 / (alpha delta)) / (alpha - 1)
//                        + log(1 - 1 / alpha).
absl::StatusOr<double> ToDp(const RdpCurve& curve, double delta);

// The conversion objective at a single order.
double DpObjective(double gamma, double alpha, double delta);

// Largest linear slope whose conversion stays at or below epsilon.
absl::StatusOr<double> SlopeForEpsilon(double epsilon, double delta);

// "alpha,gamma" CSV. Linear curves are sampled on `alphas` (a default set
// when empty).
std::string CurveToCsv(const RdpCurve& curve,
                       std::span<const double> alphas = {});

}  // namespace gdpkit

#endif  // GDPKIT_ACCOUNTING_RDP_CURVE_H_
