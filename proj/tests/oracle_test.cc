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


#include <chrono>
#include <cmath>

#include "gdpkit/oracle/sensitivity_oracle.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace gdpkit {
namespace {

using ::testing::HasSubstr;

OracleConfig Config(int n, AdjacencyRelation relation, int D = -1) {
  OracleConfig config;
  config.n = n;
  config.relation = relation;
  if (D >= 0) config.degree_bound = DegreeBound{D};
  config.seed = 3;
  return config;
}

TEST(BruteforceDpdgcTest, NodeOrthonormalIsTight) {
  for (double c : {1.0, 0.5}) {
    OracleConfig config = Config(6, AdjacencyRelation::Node(), 2);
    config.c = c;
    config.w_a = Matrix::Identity(6, 6) * c;
    absl::StatusOr<SensitivityReport> r = BruteforceDpdgc(config);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_NEAR(r->measured_max, 2.0 * c, 1e-9);
    EXPECT_NEAR(r->theoretical, 2.0 * c, 1e-12);
    EXPECT_EQ(r->violations, 0);
    EXPECT_THAT(r->witness, HasSubstr("shared=0"));
    EXPECT_TRUE(r->exhaustive);
  }
}

TEST(BruteforceDpdgcTest, KNeighborZeroAndThree) {
  OracleConfig config = Config(6, AdjacencyRelation::KNeighbor(0));
  EXPECT_EQ(BruteforceDpdgc(config)->measured_max, 0.0);
  config.relation = AdjacencyRelation::KNeighbor(3);
  config.w_a = Matrix::Identity(6, 6);
  absl::StatusOr<SensitivityReport> r = BruteforceDpdgc(config);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->measured_max, std::sqrt(3.0), 1e-9);
  EXPECT_EQ(r->violations, 0);
}

TEST(BruteforceDpdgcTest, SaturatesUnderDegreeBound) {
  OracleConfig config = Config(8, AdjacencyRelation::KNeighbor(6), 2);
  absl::StatusOr<SensitivityReport> r = BruteforceDpdgc(config);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->measured_max, 2.0, 1e-9);
}

TEST(BruteforceDpdgcTest, EdgeIsC) {
  OracleConfig config = Config(6, AdjacencyRelation::Edge());
  config.c = 0.25;
  absl::StatusOr<SensitivityReport> r = BruteforceDpdgc(config);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->measured_max, 0.25, 1e-12);
  EXPECT_EQ(r->pairs_examined, 30);
}

TEST(BruteforceDpdgcTest, SqrtKScaling) {
  std::vector<double> measured;
  for (int k : {1, 4, 9}) {
    OracleConfig config = Config(12, AdjacencyRelation::KNeighbor(k));
    config.exhaustive = false;
    config.trials = 300;
    absl::StatusOr<SensitivityReport> r = BruteforceDpdgc(config);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->violations, 0);
    measured.push_back(r->measured_max);
  }
  EXPECT_NEAR(measured[1] / measured[0], 2.0, 1e-9);
  EXPECT_NEAR(measured[2] / measured[0], 3.0, 1e-9);
}

TEST(BruteforceGapTest, AdversarialIsTwoSqrtD) {
  OracleConfig config = Config(6, AdjacencyRelation::Node(), 3);
  absl::StatusOr<SensitivityReport> r = BruteforceGap(config);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_NEAR(r->measured_max, 2.0 * std::sqrt(3.0), 1e-9);
  EXPECT_EQ(r->violations, 0);
  EXPECT_THAT(r->witness, HasSubstr("shared=3"));
}

TEST(BruteforceGapTest, NothingChanges) {
  OracleConfig config = Config(6, AdjacencyRelation::KNeighbor(0), 3);
  config.h_mode = GapHMode::kEqual;
  EXPECT_EQ(BruteforceGap(config)->measured_max, 0.0);
}

TEST(BruteforceGapTest, FixedTopologyStillTwoSqrtD) {
  for (int D : {1, 2, 4}) {
    OracleConfig config = Config(7, AdjacencyRelation::KNeighbor(0), D);
    absl::StatusOr<SensitivityReport> r = BruteforceGap(config);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r->measured_max, 2.0 * std::sqrt(D), 1e-9);
  }
}

TEST(BruteforceGapTest, EdgeIsOne) {
  OracleConfig config = Config(6, AdjacencyRelation::Edge(), 3);
  absl::StatusOr<SensitivityReport> r = BruteforceGap(config);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->measured_max, 1.0, 1e-12);
  EXPECT_EQ(r->violations, 0);
}

TEST(BruteforceGapTest, RandomHBelowBound) {
  OracleConfig config = Config(6, AdjacencyRelation::Node(), 2);
  config.h_mode = GapHMode::kRandom;
  absl::StatusOr<SensitivityReport> r = BruteforceGap(config);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->violations, 0);
  EXPECT_LT(r->measured_max, r->theoretical);
}

TEST(BruteforceGapTest, RowRBlowUp) {
  OracleConfig config = Config(8, AdjacencyRelation::Node(), 2);
  config.include_row_r = true;
  absl::StatusOr<SensitivityReport> r = BruteforceGap(config);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(r->measured_max, r->theoretical + 0.5);
  EXPECT_TRUE(r->include_row_r);
}

TEST(KIndependenceTest, GapConstantDpdgcIncreasing) {
  const DegreeBound bound{2};
  absl::StatusOr<KIndependenceTable> t =
      VerifyKIndependence(7, bound, {0, 1, 5, 4}, 1.0, 5);
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_TRUE(t->gap_constant);
  EXPECT_TRUE(t->dpdgc_increasing);
  for (const KIndependenceRow& row : t->rows) {
    EXPECT_NEAR(row.gap_measured, 2.0 * std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(row.dpdgc_measured, std::sqrt(std::min(row.k, 4)), 1e-9);
  }
}

struct SoundnessCase {
  ModelKind design;
  AdjacencyRelation relation;
};

class SoundnessTest : public ::testing::TestWithParam<SoundnessCase> {};

TEST_P(SoundnessTest, TenThousandSampledPairs) {
  OracleConfig config = Config(20, GetParam().relation, 3);
  config.exhaustive = false;
  config.trials = 10000;
  config.h_mode = GapHMode::kRandom;
  config.c = 0.7;
  absl::StatusOr<SensitivityReport> r = GetParam().design == ModelKind::kGap
                                            ? BruteforceGap(config)
                                            : BruteforceDpdgc(config);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->pairs_examined, 10000);
  EXPECT_EQ(r->violations, 0);
  EXPECT_TRUE(r->sound());
}

INSTANTIATE_TEST_SUITE_P(
    Configurations, SoundnessTest,
    ::testing::Values(
        SoundnessCase{ModelKind::kDpdgc, AdjacencyRelation::Edge()},
        SoundnessCase{ModelKind::kDpdgc, AdjacencyRelation::Node()},
        SoundnessCase{ModelKind::kDpdgc, AdjacencyRelation::KNeighbor(2)},
        SoundnessCase{ModelKind::kGap, AdjacencyRelation::Edge()},
        SoundnessCase{ModelKind::kGap, AdjacencyRelation::Node()},
        SoundnessCase{ModelKind::kGap, AdjacencyRelation::KNeighbor(2)}));

TEST(SampledOracleTest, ExtremesReachBounds) {
  OracleConfig config = Config(20, AdjacencyRelation::Node(), 3);
  config.exhaustive = false;
  config.trials = 30;
  EXPECT_NEAR(BruteforceDpdgc(config)->measured_max, std::sqrt(6.0), 1e-9);
  EXPECT_NEAR(BruteforceGap(config)->measured_max, 2.0 * std::sqrt(3.0),
              1e-9);
}

TEST(OracleGuardTest, Refusals) {
  OracleConfig config = Config(11, AdjacencyRelation::Node(), 2);
  EXPECT_EQ(BruteforceDpdgc(config).status().code(),
            absl::StatusCode::kResourceExhausted);
  config = Config(10, AdjacencyRelation::KNeighbor(9));
  EXPECT_EQ(BruteforceDpdgc(config).status().code(),
            absl::StatusCode::kResourceExhausted);
  config = Config(6, AdjacencyRelation::Node());
  EXPECT_FALSE(BruteforceGap(config).ok());
}

TEST(OracleDeterminismTest, RepeatedRunsAgree) {
  OracleConfig config = Config(7, AdjacencyRelation::Node(), 2);
  config.h_mode = GapHMode::kRandom;
  absl::StatusOr<SensitivityReport> a = BruteforceGap(config);
  absl::StatusOr<SensitivityReport> b = BruteforceGap(config);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->measured_max, b->measured_max);
  EXPECT_EQ(a->witness, b->witness);
  EXPECT_EQ(SensitivityReportToJson(*a).dump(),
            SensitivityReportToJson(*b).dump());
}

TEST(OracleJsonTest, Fields) {
  OracleConfig config = Config(6, AdjacencyRelation::KNeighbor(3));
  nlohmann::json j = SensitivityReportToJson(*BruteforceDpdgc(config));
  for (const char* key : {"design", "relation", "k", "D", "c", "measured_max",
                          "theoretical", "exhaustive", "pairs_examined",
                          "witness"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["relation"], "nk");
  EXPECT_EQ(j["k"], 3);
  EXPECT_TRUE(j["D"].is_null());
}

}  // namespace
}  // namespace gdpkit
