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


#ifndef GDPKIT_ORACLE_SENSITIVITY_ORACLE_H_
#define GDPKIT_ORACLE_SENSITIVITY_ORACLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "gdpkit/common/types.h"
#include "gdpkit/graph/graph_dataset.h"
#include "gdpkit/mechanisms/mechanism_params.h"
#include "nlohmann/json.hpp"

namespace gdpkit {

// Largest n for exhaustive enumeration, and the cap on examined pairs.
inline constexpr int kMaxOracleNodes = 10;
inline constexpr int64_t kMaxOraclePairs = 50'000'000;

// How GAP's replaced row H'_r is chosen.
enum class GapHMode {
  // H'_r = -H_r.
  kAdversarial,
  // Independent random unit rows per pair.
  kRandom,
  // H'_r = H_r.
  kEqual,
};

struct OracleConfig {
  int n = 6;
  AdjacencyRelation relation = AdjacencyRelation::Node();
  int r = 0;
  // Enforced on both A and A'.
  std::optional<DegreeBound> degree_bound;
  double c = 1.0;
  // Embedding width of W_A or H.
  int h = 8;
  bool exhaustive = true;
  // Pairs drawn when not exhaustive.
  int64_t trials = 10000;
  GapHMode h_mode = GapHMode::kAdversarial;
  // Also count row r in the norm. The closed-form bounds do not cover it.
  bool include_row_r = false;
  uint64_t seed = 0;
  // Optional n x h W_A for DPDGC with rows of norm c. Drawn when empty.
  Matrix w_a;
};

struct SensitivityReport {
  ModelKind design = ModelKind::kDpdgc;
  AdjacencyRelation relation = AdjacencyRelation::Node();
  std::optional<int> D;
  double c = 1.0;
  double measured_max = 0.0;
  double theoretical = 0.0;
  std::string witness;
  int64_t pairs_examined = 0;
  // Pairs whose difference exceeded theoretical + 1e-9.
  int64_t violations = 0;
  bool exhaustive = false;
  bool include_row_r = false;

  bool sound() const { return measured_max <= theoretical + 1e-9; }
};

// max ||[A W]_{\r} - [A' W]_{\r}||_F over adjacent (A, A'). Under Edge the
// whole matrix is compared.
absl::StatusOr<SensitivityReport> BruteforceDpdgc(const OracleConfig& config);

// max ||[A H]_{\r} - [A' H']_{\r}||_F with H_{\r} = H'_{\r}, both
// row-normalized. Under Edge H = H' and the whole matrix is compared.
absl::StatusOr<SensitivityReport> BruteforceGap(const OracleConfig& config);

struct KIndependenceRow {
  int k = 0;
  double gap_measured = 0.0;
  double dpdgc_measured = 0.0;
};

struct KIndependenceTable {
  std::vector<KIndependenceRow> rows;
  // GAP values all equal within 1e-9.
  bool gap_constant = false;
  // DPDGC strictly increasing over the k <= 2D entries (sorted by k).
  bool dpdgc_increasing = false;
};

absl::StatusOr<KIndependenceTable> VerifyKIndependence(
    int n, DegreeBound bound, const std::vector<int>& k_values, double c,
    uint64_t seed);

nlohmann::json SensitivityReportToJson(const SensitivityReport& report);

}  // namespace gdpkit

#endif  // GDPKIT_ORACLE_SENSITIVITY_ORACLE_H_
