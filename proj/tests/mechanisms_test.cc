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


#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gdpkit/accounting/gdp_budget.h"
#include "gdpkit/common/binary_io.h"
#include "gdpkit/common/random.h"
#include "gdpkit/graph/graph_ops.h"
#include "gdpkit/mechanisms/mechanisms.h"
#include "gtest/gtest.h"

namespace gdpkit {
namespace {

Matrix RandomUnitRows(int n, int h, uint64_t seed) {
  RandomStream rng(seed);
  Matrix m(n, h);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) m(i, j) = rng.Gaussian();
  }
  RowNormalizeInPlace(m, 1.0);
  return m;
}

Adjacency RandomGraph(int n, double p, uint64_t seed) {
  RandomStream rng(seed);
  Adjacency a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.Bernoulli(p)) a.Set(i, j, true);
    }
  }
  return a;
}

EmbeddingMatrix Hop0(Matrix values) {
  EmbeddingMatrix e;
  e.values = std::move(values);
  e.kind = EmbeddingKind::kHop;
  return e;
}

TEST(GaussianPerturbTest, ZeroNoiseIsIdentity) {
  Matrix m = RandomUnitRows(7, 5, 1);
  Matrix out = GaussianPerturb(m, 0.0, 3);
  EXPECT_TRUE((out.array() == m.array()).all());
}

TEST(GaussianPerturbTest, MomentsWithinStandardErrors) {
  Matrix out = GaussianPerturb(Matrix::Zero(1000, 64), 2.0, 99);
  const double count = static_cast<double>(out.size());
  const double mean = out.sum() / count;
  const double var = (out.array() - mean).square().sum() / (count - 1.0);
  const double std = std::sqrt(var);
  EXPECT_LE(std::abs(mean), 3.0 * 2.0 / std::sqrt(64000.0));
  EXPECT_GE(std, 2.0 * (1.0 - 3.0 / std::sqrt(2.0 * 64000.0)));
  EXPECT_LE(std, 2.0 * (1.0 + 3.0 / std::sqrt(2.0 * 64000.0)));
}

TEST(GaussianPerturbTest, DeterministicAndShapeKeyed) {
  Matrix a = GaussianPerturb(Matrix::Zero(10, 4), 1.0, 5);
  Matrix b = GaussianPerturb(Matrix::Zero(10, 4), 1.0, 5);
  EXPECT_TRUE((a.array() == b.array()).all());
  Matrix c = GaussianPerturb(Matrix::Zero(4, 10), 1.0, 5);
  EXPECT_NE(a(0, 0), c(0, 0));
}

TEST(GaussianPerturbTest, DistinctSeedsUncorrelated) {
  Matrix a = GaussianPerturb(Matrix::Zero(100000, 1), 1.0, 1);
  Matrix b = GaussianPerturb(Matrix::Zero(100000, 1), 1.0, 2);
  const double n = 100000.0;
  const double ma = a.mean();
  const double mb = b.mean();
  const double cov = ((a.array() - ma) * (b.array() - mb)).sum() / n;
  const double corr = cov / std::sqrt((a.array() - ma).square().sum() / n *
                                      (b.array() - mb).square().sum() / n);
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(n));
}

TEST(PmaHopTest, EmptyGraphNoNoiseGivesZeros) {
  absl::StatusOr<EmbeddingMatrix> out =
      PmaHop(Hop0(RandomUnitRows(6, 3, 2)), Adjacency(6), 0.0, 1);
  ASSERT_TRUE(out.ok());
  EXPECT_TRUE(out->values.isZero(0.0));
  EXPECT_EQ(out->hop, 1);
  EXPECT_TRUE(out->released);
}

TEST(PmaHopTest, CycleIsRowPermutation) {
  const int n = 5;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  Adjacency a = Adjacency::FromEdges(n, edges);
  Matrix h = RandomUnitRows(n, 4, 3);
  absl::StatusOr<EmbeddingMatrix> out = PmaHop(Hop0(h), a, 0.0, 1);
  ASSERT_TRUE(out.ok());
  for (int i = 0; i < n; ++i) {
    const int src = (i + n - 1) % n;
    EXPECT_LE((out->values.row(i) - h.row(src)).norm(), 1e-15);
  }
}

TEST(PmaHopTest, OutputRowsUnitOrZero) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Adjacency a = RandomGraph(30, 0.1, seed);
    Matrix h = RandomUnitRows(30, 8, seed + 100);
    absl::StatusOr<EmbeddingMatrix> out =
        PmaHop(Hop0(h), a, seed % 2 == 0 ? 0.0 : 0.7, seed);
    ASSERT_TRUE(out.ok());
    for (int i = 0; i < 30; ++i) {
      const double norm = out->values.row(i).norm();
      if (norm != 0.0) EXPECT_NEAR(norm, 1.0, 1e-12);
    }
  }
}

TEST(PmaHopTest, RejectsUnnormalizedInput) {
  Matrix h = Matrix::Constant(4, 2, 3.0);
  EXPECT_FALSE(PmaHop(Hop0(h), Adjacency(4), 0.0, 1).ok());
}

TEST(GapAggregateTest, WidthAndZeroPropagation) {
  Matrix h = RandomUnitRows(6, 3, 4);
  MechanismParams p;
  p.s = 0.0;
  p.hops = 1;
  EXPECT_EQ(GapAggregate(Hop0(h), Adjacency(6), p, 1)->values.cols(), 6);
  p.hops = 3;
  absl::StatusOr<EmbeddingMatrix> z = GapAggregate(Hop0(h), Adjacency(6), p, 1);
  ASSERT_TRUE(z.ok());
  EXPECT_EQ(z->kind, EmbeddingKind::kConcat);
  EXPECT_TRUE((z->values.leftCols(3).array() == h.array()).all());
  EXPECT_TRUE(z->values.rightCols(9).isZero(0.0));
}

TEST(GapAggregateTest, ReproducibleAndCharged) {
  Adjacency a = RandomGraph(20, 0.2, 8);
  Matrix h = RandomUnitRows(20, 4, 9);
  MechanismParams p;
  p.s = 10.0;
  p.hops = 2;
  p.degree_bound = DegreeBound{100};
  absl::StatusOr<EmbeddingMatrix> z1 = GapAggregate(Hop0(h), a, p, 42);
  absl::StatusOr<EmbeddingMatrix> z2 = GapAggregate(Hop0(h), a, p, 42);
  ASSERT_TRUE(z1.ok() && z2.ok());
  EXPECT_TRUE((z1->values.array() == z2->values.array()).all());
  // Hops draw independent noise.
  EXPECT_FALSE((z1->values.middleCols(4, 4).array() ==
                z1->values.middleCols(8, 4).array())
                   .all());
  absl::StatusOr<RdpCurve> curve =
      MechanismCurve(ModelKind::kGap, AdjacencyRelation::Node(), p);
  ASSERT_TRUE(curve.ok());
  EXPECT_NEAR(curve->slope(), 2.0 * 4.0 * 100.0 / (2.0 * 100.0), 1e-12);
}

EmbWeights UnitWeights(int n, int h, double c, uint64_t seed) {
  EmbWeights w;
  w.w_a = RandomUnitRows(n, h, seed) * c;
  w.b = RowVector::Zero(h);
  return w;
}

TEST(DpdgcReleaseTest, SingleEdgeCopiesNormalizedRow) {
  const int n = 5;
  const std::pair<int, int> edge[] = {{1, 3}};
  Adjacency a = Adjacency::FromEdges(n, edge);
  EmbWeights w = UnitWeights(n, 4, 1.0, 6);
  MechanismParams p;
  p.s = 0.0;
  absl::StatusOr<EmbeddingMatrix> z = DpdgcRelease(a, w, p, 1);
  ASSERT_TRUE(z.ok());
  EXPECT_LE((z->values.row(3) - w.w_a.row(1).normalized()).norm(), 1e-15);
  EXPECT_TRUE(z->values.row(0).isZero(0.0));
  EXPECT_EQ(z->kind, EmbeddingKind::kDpdgc);
}

TEST(DpdgcReleaseTest, NoiseScalesWithC) {
  Adjacency a = RandomGraph(40, 0.1, 3);
  EmbWeights w1 = UnitWeights(40, 8, 1.0, 4);
  EmbWeights wc = w1;
  const double c = 1e-8;
  wc.w_a *= c;
  MechanismParams p1;
  p1.s = 0.5;
  MechanismParams pc = p1;
  pc.c = c;
  Matrix z1 = *DpdgcNoisySignal(a, w1, p1, 77);
  Matrix zc = *DpdgcNoisySignal(a, wc, pc, 77);
  for (Eigen::Index i = 0; i < z1.size(); ++i) {
    EXPECT_NEAR(zc.data()[i] / z1.data()[i], c, 1e-12 * c);
  }
  const double snr1 =
      a.Multiply(w1.w_a).norm() / (p1.c * p1.s * std::sqrt(40.0 * 8.0));
  const double snrc =
      a.Multiply(wc.w_a).norm() / (pc.c * pc.s * std::sqrt(40.0 * 8.0));
  EXPECT_NEAR(snr1, snrc, 1e-12 * snr1);
}

TEST(DpdgcReleaseTest, DeterministicAndChecksWeights) {
  Adjacency a = RandomGraph(15, 0.2, 5);
  EmbWeights w = UnitWeights(15, 4, 1.0, 5);
  w.b = RowVector::Constant(4, 0.3);
  MechanismParams p;
  p.s = 1.0;
  Matrix z1 = DpdgcRelease(a, w, p, 9)->values;
  Matrix z2 = DpdgcRelease(a, w, p, 9)->values;
  EXPECT_TRUE((z1.array() == z2.array()).all());
  w.w_a(2, 0) += 0.1;
  EXPECT_EQ(DpdgcRelease(a, w, p, 9).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(ProjectionHeadTest, FrozenPerSeed) {
  ProjectionHead a = ProjectionHead::Draw(8, 3, 11);
  ProjectionHead b = ProjectionHead::Draw(8, 3, 11);
  ProjectionHead c = ProjectionHead::Draw(8, 3, 12);
  EXPECT_TRUE((a.r.array() == b.r.array()).all());
  EXPECT_FALSE((a.r.array() == c.r.array()).all());
}

TEST(EmbeddingCacheTest, RoundTripAndCorruption) {
  const std::string dir = ::testing::TempDir();
  const std::string path = dir + "/z.gdpz";
  EmbeddingMatrix z;
  z.values = RandomUnitRows(9, 5, 2);
  z.kind = EmbeddingKind::kDpdgc;
  z.released = true;
  ASSERT_TRUE(WriteEmbedding(path, z).ok());
  absl::StatusOr<EmbeddingMatrix> back = ReadEmbedding(path);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_TRUE((back->values.array() == z.values.array()).all());
  EXPECT_EQ(back->kind, EmbeddingKind::kDpdgc);
  EXPECT_TRUE(back->released);
  std::string bytes = *ReadFileBytes(path);
  EXPECT_EQ(bytes.substr(0, 4), "GDPZ");
  EXPECT_EQ(bytes.size(), 4u + 4 + 8 + 8 + 1 + 1 + 9 * 5 * 8);
  ASSERT_TRUE(WriteFileBytes(path, bytes.substr(0, bytes.size() - 3)).ok());
  EXPECT_FALSE(ReadEmbedding(path).ok());
  bytes[0] = 'X';
  ASSERT_TRUE(WriteFileBytes(path, bytes).ok());
  EXPECT_FALSE(ReadEmbedding(path).ok());
}

}  // namespace
}  // namespace gdpkit
