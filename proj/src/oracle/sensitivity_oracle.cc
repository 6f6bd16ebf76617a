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


#include "gdpkit/oracle/sensitivity_oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "gdpkit/common/random.h"
#include "gdpkit/graph/graph_ops.h"

namespace gdpkit {
namespace {

using PairVisitor =
    std::function<void(const Adjacency& a, const Adjacency& a2, int64_t index)>;

int Cap(const OracleConfig& config) {
  return config.degree_bound.has_value()
             ? std::min(config.degree_bound->D, config.n - 1)
             : config.n - 1;
}

bool WithinBound(const Adjacency& a, const OracleConfig& config) {
  return !config.degree_bound.has_value() ||
         a.MaxColumnSum() <= config.degree_bound->D;
}

int FlipLimit(const OracleConfig& config) {
  if (config.relation.is_node()) return config.n - 1;
  return std::min(config.relation.k(), config.n - 1);
}

std::vector<int> Others(int n, int r) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (i != r) out.push_back(i);
  }
  return out;
}

// Random graph whose columns respect the cap.
Adjacency RandomBoundedGraph(const OracleConfig& config, RandomStream& rng) {
  const int n = config.n;
  Adjacency a(n);
  const int cap = Cap(config);
  for (int j = 0; j < n; ++j) {
    std::vector<int> others = Others(n, j);
    const int size = static_cast<int>(rng.UniformInt(cap + 1));
    std::vector<int> chosen;
    std::sample(others.begin(), others.end(), std::back_inserter(chosen), size,
                rng.engine());
    for (int i : chosen) a.Set(i, j, true);
  }
  return a;
}

void SetColumn(Adjacency& a, int r, const std::vector<int>& members) {
  for (int i = 0; i < a.n(); ++i) {
    if (i != r) a.Set(i, r, false);
  }
  for (int i : members) a.Set(i, r, true);
}

// Flips up to `count` random entries of row r of `a`, skipping flips that
// would break the degree bound.
void FlipRow(Adjacency& a, int r, int count, const OracleConfig& config,
             RandomStream& rng) {
  std::vector<int> others = Others(a.n(), r);
  std::shuffle(others.begin(), others.end(), rng.engine());
  int done = 0;
  for (int j : others) {
    if (done >= count) break;
    a.Flip(r, j);
    if (config.degree_bound.has_value() && a.Get(r, j) &&
        static_cast<int>(a.Column(j).size()) > config.degree_bound->D) {
      a.Flip(r, j);
      continue;
    }
    ++done;
  }
}

absl::StatusOr<int64_t> EnumerateExhaustive(const OracleConfig& config,
                                            const PairVisitor& visit) {
  const int n = config.n;
  if (n > kMaxOracleNodes) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exhaustive oracle refused: n = ", n, " exceeds ", kMaxOracleNodes));
  }
  RandomStream rng(config.seed, "oracle_base_graph");
  const Adjacency g0 = RandomBoundedGraph(config, rng);
  std::vector<Adjacency> bases;
  if (config.relation.is_edge()) {
    bases.push_back(g0);
  } else {
    const std::vector<int> others = Others(n, config.r);
    for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
      if (std::popcount(mask) > Cap(config)) continue;
      std::vector<int> members;
      for (int b = 0; b < n - 1; ++b) {
        if (mask & (1u << b)) members.push_back(others[b]);
      }
      Adjacency base = g0;
      SetColumn(base, config.r, members);
      bases.push_back(std::move(base));
    }
  }
  const int64_t estimate =
      static_cast<int64_t>(bases.size()) * CountAdjacent(n, config.relation);
  if (estimate > kMaxOraclePairs) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exhaustive oracle refused: ", estimate, " pairs exceeds ",
        kMaxOraclePairs));
  }
  int64_t index = 0;
  for (const Adjacency& base : bases) {
    absl::StatusOr<int64_t> visited = ForEachAdjacent(
        base, config.relation, config.r, [&](const Adjacency& a2) {
          if (WithinBound(a2, config)) visit(base, a2, index++);
          return true;
        });
    if (!visited.ok()) return visited.status();
  }
  return index;
}

absl::StatusOr<int64_t> EnumerateSampled(const OracleConfig& config,
                                         const PairVisitor& visit) {
  const int n = config.n;
  const int r = config.r;
  const int cap = Cap(config);
  for (int64_t t = 0; t < config.trials; ++t) {
    RandomStream rng(config.seed, "oracle_pair", static_cast<uint64_t>(t));
    Adjacency a = RandomBoundedGraph(config, rng);
    Adjacency a2 = a;
    if (config.relation.is_edge()) {
      int i = static_cast<int>(rng.UniformInt(n));
      int j = static_cast<int>(rng.UniformInt(n - 1));
      if (j >= i) ++j;
      a2.Flip(i, j);
      if (!WithinBound(a2, config)) {
        // Remove an existing entry of that column instead.
        a2.Flip(i, j);
        std::vector<int> col = a2.Column(j);
        if (!col.empty()) a2.Set(col[rng.UniformInt(col.size())], j, false);
      }
      visit(a, a2, t);
      continue;
    }
    const int kmax = FlipLimit(config);
    const int flips = std::min({kmax, n - 1, 2 * cap});
    std::vector<int> others = Others(n, r);
    std::shuffle(others.begin(), others.end(), rng.engine());
    switch (t % 3) {
      case 0: {
        // Disjoint neighborhoods with exactly `flips` column changes.
        const int removed = flips - flips / 2;
        const int added = flips / 2;
        std::vector<int> s(others.begin(), others.begin() + removed);
        std::vector<int> s2(others.begin() + removed,
                            others.begin() + removed + added);
        SetColumn(a, r, s);
        SetColumn(a2, r, s2);
        break;
      }
      case 1: {
        // Shared neighborhood of maximal size.
        std::vector<int> s(others.begin(), others.begin() + cap);
        SetColumn(a, r, s);
        SetColumn(a2, r, s);
        break;
      }
      default: {
        SetColumn(a2, r, a.Column(r));
        int done = 0;
        for (int i : others) {
          if (done >= flips) break;
          a2.Flip(i, r);
          if (static_cast<int>(a2.Column(r).size()) > cap) {
            a2.Flip(i, r);
            continue;
          }
          ++done;
        }
        break;
      }
    }
    // Row r of A' is a fresh rewiring within the flip budget.
    for (int j : Others(n, r)) a2.Set(r, j, a.Get(r, j));
    FlipRow(a2, r, static_cast<int>(rng.UniformInt(kmax + 1)), config, rng);
    if (!WithinBound(a, config) || !WithinBound(a2, config)) {
      return absl::InternalError("oracle sampler broke the degree bound");
    }
    visit(a, a2, t);
  }
  return config.trials;
}

absl::StatusOr<int64_t> ForEachPair(const OracleConfig& config,
                                    const PairVisitor& visit) {
  if (config.n < 2) return absl::InvalidArgumentError("oracle needs n >= 2");
  if (config.r < 0 || config.r >= config.n) {
    return absl::InvalidArgumentError(
        absl::StrCat("node ", config.r, " out of range"));
  }
  if (config.relation.is_kneighbor() && config.relation.k() < 0) {
    return absl::InvalidArgumentError("k must be non-negative");
  }
  if (config.h < 1) return absl::InvalidArgumentError("h must be >= 1");
  if (config.exhaustive) return EnumerateExhaustive(config, visit);
  if (config.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  return EnumerateSampled(config, visit);
}

Matrix RandomUnitRows(int n, int h, double norm, RandomStream& rng) {
  Matrix m(n, h);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) m(i, j) = rng.Gaussian();
  }
  RowNormalizeInPlace(m, norm);
  return m;
}

double DifferenceNorm(const Matrix& p, const Matrix& p2, int r,
                      bool whole_matrix) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (!whole_matrix && i == r) continue;
    total += (p.row(i) - p2.row(i)).squaredNorm();
  }
  return std::sqrt(total);
}

std::string DescribePair(const Adjacency& a, const Adjacency& a2, int r,
                         bool edge) {
  if (edge) {
    for (int i = 0; i < a.n(); ++i) {
      for (int j = 0; j < a.n(); ++j) {
        if (a.Get(i, j) != a2.Get(i, j)) {
          return absl::StrCat("single flipped entry A(", i, ",", j, "): ",
                              a.Get(i, j) ? "removed" : "added");
        }
      }
    }
    return "identical adjacency";
  }
  const std::vector<int> col = a.Column(r);
  const std::vector<int> col2 = a2.Column(r);
  std::vector<int> shared;
  std::set_intersection(col.begin(), col.end(), col2.begin(), col2.end(),
                        std::back_inserter(shared));
  return absl::StrCat("N(r)={", absl::StrJoin(col, ","), "} N'(r)={",
                      absl::StrJoin(col2, ","), "} shared=", shared.size(),
                      " r=", r);
}

SensitivityReport NewReport(ModelKind design, const OracleConfig& config,
                            double theoretical) {
  SensitivityReport report;
  report.design = design;
  report.relation = config.relation;
  if (config.degree_bound.has_value()) report.D = config.degree_bound->D;
  report.c = design == ModelKind::kDpdgc ? config.c : 1.0;
  report.theoretical = theoretical;
  report.exhaustive = config.exhaustive;
  report.include_row_r = config.include_row_r;
  return report;
}

std::string FormatRow(const RowVector& v) {
  return absl::StrCat("[", absl::StrJoin(v.data(), v.data() + v.size(), ","),
                      "]");
}

}  // namespace

absl::StatusOr<SensitivityReport> BruteforceDpdgc(const OracleConfig& config) {
  absl::StatusOr<double> theoretical = TheoreticalSensitivity(
      ModelKind::kDpdgc, config.relation, config.degree_bound, config.c);
  if (!theoretical.ok()) return theoretical.status();
  Matrix w = config.w_a;
  if (w.size() == 0) {
    RandomStream rng(config.seed, "oracle_w");
    w = RandomUnitRows(config.n, config.h, config.c, rng);
  }
  if (w.rows() != config.n) {
    return absl::InvalidArgumentError("W_A must have n rows");
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (std::abs(w.row(i).norm() - config.c) > 1e-12 * config.c) {
      return absl::InvalidArgumentError("W_A rows must have norm c");
    }
  }
  SensitivityReport report = NewReport(ModelKind::kDpdgc, config, *theoretical);
  const bool whole = config.relation.is_edge() || config.include_row_r;
  const Adjacency* cached_base = nullptr;
  Adjacency cached_copy;
  Matrix p;
  absl::StatusOr<int64_t> count = ForEachPair(
      config, [&](const Adjacency& a, const Adjacency& a2, int64_t) {
        if (cached_base != &a || !(cached_copy == a)) {
          cached_base = &a;
          cached_copy = a;
          p = a.Multiply(w);
        }
        const double value = DifferenceNorm(p, a2.Multiply(w), config.r, whole);
        if (value > report.theoretical + 1e-9) ++report.violations;
        if (value > report.measured_max || report.witness.empty()) {
          report.measured_max = value;
          report.witness =
              DescribePair(a, a2, config.r, config.relation.is_edge());
        }
      });
  if (!count.ok()) return count.status();
  report.pairs_examined = *count;
  if (config.include_row_r) report.violations = 0;
  return report;
}

absl::StatusOr<SensitivityReport> BruteforceGap(const OracleConfig& config) {
  absl::StatusOr<double> theoretical = TheoreticalSensitivity(
      ModelKind::kGap, config.relation, config.degree_bound, 1.0);
  if (!theoretical.ok()) return theoretical.status();
  RandomStream rng(config.seed, "oracle_h");
  const Matrix h = RandomUnitRows(config.n, config.h, 1.0, rng);
  SensitivityReport report = NewReport(ModelKind::kGap, config, *theoretical);
  const bool edge = config.relation.is_edge();
  const bool whole = edge || config.include_row_r;
  Matrix h2 = h;
  absl::StatusOr<int64_t> count = ForEachPair(
      config, [&](const Adjacency& a, const Adjacency& a2, int64_t index) {
        Matrix h1 = h;
        if (!edge) {
          switch (config.h_mode) {
            case GapHMode::kAdversarial:
              h2.row(config.r) = -h.row(config.r);
              break;
            case GapHMode::kEqual:
              h2.row(config.r) = h.row(config.r);
              break;
            case GapHMode::kRandom: {
              RandomStream pair_rng(config.seed, "oracle_h_pair",
                                    static_cast<uint64_t>(index));
              Matrix rows = RandomUnitRows(2, config.h, 1.0, pair_rng);
              h1.row(config.r) = rows.row(0);
              h2.row(config.r) = rows.row(1);
              break;
            }
          }
        }
        const double value = DifferenceNorm(a.Multiply(h1), a2.Multiply(h2),
                                            config.r, whole);
        if (value > report.theoretical + 1e-9) ++report.violations;
        if (value > report.measured_max || report.witness.empty()) {
          report.measured_max = value;
          report.witness = DescribePair(a, a2, config.r, edge);
          if (!edge) {
            absl::StrAppend(&report.witness, " H_r=", FormatRow(h1.row(config.r)),
                            " H'_r=", FormatRow(h2.row(config.r)));
          }
        }
      });
  if (!count.ok()) return count.status();
  report.pairs_examined = *count;
  if (config.include_row_r) report.violations = 0;
  return report;
}

absl::StatusOr<KIndependenceTable> VerifyKIndependence(
    int n, DegreeBound bound, const std::vector<int>& k_values, double c,
    uint64_t seed) {
  KIndependenceTable table;
  for (int k : k_values) {
    OracleConfig config;
    config.n = n;
    config.relation = AdjacencyRelation::KNeighbor(k);
    config.degree_bound = bound;
    config.c = c;
    config.seed = seed;
    config.h_mode = GapHMode::kAdversarial;
    absl::StatusOr<SensitivityReport> gap = BruteforceGap(config);
    if (!gap.ok()) return gap.status();
    absl::StatusOr<SensitivityReport> dpdgc = BruteforceDpdgc(config);
    if (!dpdgc.ok()) return dpdgc.status();
    table.rows.push_back({k, gap->measured_max, dpdgc->measured_max});
  }
  table.gap_constant = true;
  for (const KIndependenceRow& row : table.rows) {
    if (std::abs(row.gap_measured - table.rows.front().gap_measured) > 1e-9) {
      table.gap_constant = false;
    }
  }
  std::vector<KIndependenceRow> small;
  for (const KIndependenceRow& row : table.rows) {
    if (row.k <= 2 * bound.D) small.push_back(row);
  }
  std::sort(small.begin(), small.end(),
            [](const auto& x, const auto& y) { return x.k < y.k; });
  table.dpdgc_increasing = true;
  for (size_t i = 1; i < small.size(); ++i) {
    if (small[i].k > small[i - 1].k &&
        !(small[i].dpdgc_measured > small[i - 1].dpdgc_measured)) {
      table.dpdgc_increasing = false;
    }
  }
  return table;
}

nlohmann::json SensitivityReportToJson(const SensitivityReport& report) {
  nlohmann::json out;
  out["design"] = std::string(ModelKindName(report.design));
  out["relation"] = std::string(report.relation.Name());
  if (report.relation.is_kneighbor()) {
    out["k"] = report.relation.k();
  } else {
    out["k"] = nullptr;
  }
  if (report.D.has_value()) {
    out["D"] = *report.D;
  } else {
    out["D"] = nullptr;
  }
  out["c"] = report.c;
  out["measured_max"] = report.measured_max;
  out["theoretical"] = report.theoretical;
  out["exhaustive"] = report.exhaustive;
  out["pairs_examined"] = report.pairs_examined;
  out["witness"] = report.witness;
  out["violations"] = report.violations;
  out["include_row_r"] = report.include_row_r;
  out["sound"] = report.sound();
  return out;
}

}  // namespace gdpkit
