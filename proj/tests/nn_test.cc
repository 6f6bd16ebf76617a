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
#include <vector>

#include "gdpkit/common/random.h"
#include "gdpkit/nn/checkpoint.h"
#include "gdpkit/nn/dp_optimizer.h"
#include "gdpkit/nn/mlp.h"
#include "gdpkit/nn/network.h"
#include "gtest/gtest.h"

namespace gdpkit {
namespace {

Matrix RandomMatrix(int rows, int cols, uint64_t seed, double scale = 1.0) {
  RandomStream rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = scale * rng.Gaussian();
  }
  return m;
}

Matrix OneHot(int rows, int classes, uint64_t seed) {
  RandomStream rng(seed);
  Matrix y = Matrix::Zero(rows, classes);
  for (int i = 0; i < rows; ++i) y(i, rng.UniformInt(classes)) = 1.0;
  return y;
}

Network MakeNet(const std::vector<int>& widths, uint64_t seed) {
  Mlp head = *Mlp::Create(widths, seed);
  for (Layer& l : head.layers()) {
    l.bias = RandomMatrix(1, l.out(), seed + 7, 0.1);
  }
  return Network(std::nullopt, std::move(head));
}

double SampleLoss(const Network& net, const ModelInput& input,
                  const Matrix& targets, int i) {
  ModelInput one;
  if (const auto* dense = std::get_if<Matrix>(&input.x)) {
    one.x = Matrix(dense->row(i));
  } else {
    one.x = SparseMatrix(std::get<SparseMatrix>(input.x).middleRows(i, 1));
  }
  if (input.side.cols() > 0) one.side = input.side.row(i);
  Matrix p = *net.Probabilities(one);
  return CrossEntropy(p, targets.row(i));
}

// Largest elementwise error of analytic per-sample gradients against central
// differences, relative to max(|a|, |f|, 1e-3 * max |gradient of sample|).
double GradientCheck(Network net, const ModelInput& input,
                     const Matrix& targets) {
  const double step = 1e-5;
  FactoredGradients grads = *net.ComputeGradients(input, targets);
  double worst = 0.0;
  std::vector<Layer*> layers = net.TrainableLayers();
  for (int i = 0; i < grads.batch_size(); ++i) {
    std::vector<ParamBlock> analytic = grads.Sample(i);
    double scale = 0.0;
    for (const ParamBlock& b : analytic) {
      scale = std::max({scale, b.weight.cwiseAbs().maxCoeff(),
                        b.bias.size() ? b.bias.cwiseAbs().maxCoeff() : 0.0});
    }
    auto check = [&](double& param, double a) {
      const double saved = param;
      param = saved + step;
      const double up = SampleLoss(net, input, targets, i);
      param = saved - step;
      const double down = SampleLoss(net, input, targets, i);
      param = saved;
      const double f = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(a), std::abs(f), 1e-3 * scale});
      worst = std::max(worst, std::abs(a - f) / denom);
    };
    for (size_t l = 0; l < layers.size(); ++l) {
      for (int r = 0; r < layers[l]->in(); ++r) {
        for (int c = 0; c < layers[l]->out(); ++c) {
          check(layers[l]->weight(r, c), analytic[l].weight(r, c));
        }
      }
      if (layers[l]->has_bias) {
        for (int c = 0; c < layers[l]->out(); ++c) {
          check(layers[l]->bias(c), analytic[l].bias(c));
        }
      }
    }
  }
  return worst;
}

TEST(SeluTest, Values) {
  EXPECT_EQ(Selu(0.0), 0.0);
  EXPECT_DOUBLE_EQ(Selu(1.0), kSeluLambda);
  EXPECT_NEAR(Selu(1.0), 1.0507, 1e-4);
  const double g = SeluGrad(-20.0);
  EXPECT_GT(g, 0.0);
  EXPECT_NEAR(g, kSeluLambda * kSeluAlpha * std::exp(-20.0), 1e-20);
  EXPECT_NEAR(g, 3.6e-9, 0.1e-9);
  EXPECT_EQ(SeluGrad(0.0), kSeluLambda);
}

TEST(ForwardTest, ZeroWeightsGiveZero) {
  Mlp mlp = *Mlp::Create({4, 5, 3}, 1);
  for (Layer& l : mlp.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  EXPECT_TRUE(mlp.Forward(RandomMatrix(6, 4, 2))->isZero(0.0));
}

TEST(ForwardTest, IdentityLayer) {
  Layer layer;
  layer.weight = Matrix::Identity(3, 3);
  layer.bias = RowVector::Zero(3);
  layer.activation = Activation::kIdentity;
  Mlp mlp({layer});
  Matrix x = RandomMatrix(5, 3, 4);
  EXPECT_TRUE((mlp.Forward(x)->array() == x.array()).all());
}

TEST(ForwardTest, MatchesStraightLineEvaluation) {
  Mlp mlp = *Mlp::Create({6, 7, 3}, 9);
  mlp.layers()[0].bias = RandomMatrix(1, 7, 10, 0.3);
  mlp.layers()[1].bias = RandomMatrix(1, 3, 11, 0.3);
  Matrix x = RandomMatrix(4, 6, 12);
  Matrix out = *mlp.Forward(x);
  const Layer& l0 = mlp.layers()[0];
  const Layer& l1 = mlp.layers()[1];
  for (int i = 0; i < 4; ++i) {
    std::vector<double> hidden(7);
    for (int j = 0; j < 7; ++j) {
      double s = l0.bias(j);
      for (int k = 0; k < 6; ++k) s += x(i, k) * l0.weight(k, j);
      hidden[j] = s > 0 ? kSeluLambda * s
                        : kSeluLambda * kSeluAlpha * (std::exp(s) - 1.0);
    }
    for (int j = 0; j < 3; ++j) {
      double s = l1.bias(j);
      for (int k = 0; k < 7; ++k) s += hidden[k] * l1.weight(k, j);
      EXPECT_NEAR(out(i, j), s, 1e-12 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST(ForwardTest, EmptyBatchAndShapeErrors) {
  Mlp mlp = *Mlp::Create({4, 5, 3}, 1);
  absl::StatusOr<Matrix> out = mlp.Forward(Matrix(0, 4));
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->rows(), 0);
  EXPECT_EQ(out->cols(), 3);
  EXPECT_FALSE(mlp.Forward(Matrix(2, 5)).ok());
  Network net(std::nullopt, mlp);
  ModelInput in{Matrix(RandomMatrix(3, 4, 1)), Matrix()};
  EXPECT_FALSE(net.ComputeGradients(in, Matrix::Zero(2, 3)).ok());
}

TEST(GradientTest, TwoLayerEightSamples) {
  Network net = MakeNet({5, 6, 3}, 21);
  ModelInput in{Matrix(RandomMatrix(8, 5, 22)), Matrix()};
  EXPECT_LT(GradientCheck(net, in, OneHot(8, 3, 23)), 1e-5);
}

TEST(GradientTest, TwentyRandomNetworks) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed, "shape");
    const int depth = 1 + static_cast<int>(rng.UniformInt(3));
    std::vector<int> widths;
    for (int l = 0; l <= depth; ++l) {
      widths.push_back(2 + static_cast<int>(rng.UniformInt(15)));
    }
    Network net = MakeNet(widths, seed);
    ModelInput in{Matrix(RandomMatrix(4, widths.front(), seed + 100)),
                  Matrix()};
    EXPECT_LT(GradientCheck(net, in, OneHot(4, widths.back(), seed + 200)),
              1e-5)
        << seed;
  }
}

TEST(GradientTest, EncoderWithSideInput) {
  Mlp encoder = *Mlp::Create({5, 4}, 31);
  encoder.layers()[0].activation = Activation::kSelu;
  Mlp head = *Mlp::Create({4 + 3, 6, 2}, 32);
  Network net(encoder, head);
  ModelInput in{Matrix(RandomMatrix(6, 5, 33)), RandomMatrix(6, 3, 34)};
  EXPECT_LT(GradientCheck(net, in, OneHot(6, 2, 35)), 1e-5);
}

TEST(GradientTest, SparseInputWithFrozenProjection) {
  Layer emb;
  emb.weight = RandomMatrix(7, 4, 41, 0.5);
  emb.bias = RandomMatrix(1, 4, 42, 0.1);
  Layer proj;
  proj.weight = RandomMatrix(4, 3, 43);
  proj.bias = RowVector::Zero(3);
  proj.has_bias = false;
  proj.trainable = false;
  proj.activation = Activation::kIdentity;
  Network net(std::nullopt, Mlp({emb, proj}));
  SparseMatrix a(5, 7);
  std::vector<Eigen::Triplet<double>> t = {
      {0, 1, 1}, {0, 3, 1}, {1, 2, 1}, {2, 0, 1}, {2, 6, 1}, {4, 5, 1}};
  a.setFromTriplets(t.begin(), t.end());
  ModelInput in{a, Matrix()};
  EXPECT_EQ(net.TrainableLayers().size(), 1u);
  EXPECT_LT(GradientCheck(net, in, OneHot(5, 3, 44)), 1e-5);
}

TEST(PerSampleTest, DuplicatesAndLinearity) {
  Network net = MakeNet({4, 5, 3}, 51);
  Matrix x = RandomMatrix(6, 4, 52);
  x.row(3) = x.row(1);
  Matrix y = OneHot(6, 3, 53);
  y.row(3) = y.row(1);
  FactoredGradients g = *net.ComputeGradients({x, Matrix()}, y);
  std::vector<ParamBlock> a = g.Sample(1);
  std::vector<ParamBlock> b = g.Sample(3);
  for (size_t l = 0; l < a.size(); ++l) {
    EXPECT_TRUE((a[l].weight.array() == b[l].weight.array()).all());
  }
  std::vector<ParamBlock> total = g.WeightedSum(Vector::Ones(6));
  for (size_t l = 0; l < total.size(); ++l) {
    Matrix sum = Matrix::Zero(total[l].weight.rows(), total[l].weight.cols());
    for (int i = 0; i < 6; ++i) sum += g.Sample(i)[l].weight;
    EXPECT_LE((sum - total[l].weight).norm(), 1e-10 * sum.norm());
  }
  Vector norms = g.SquaredNorms();
  for (int i = 0; i < 6; ++i) {
    double direct = 0.0;
    for (const ParamBlock& p : g.Sample(i)) {
      direct += p.weight.squaredNorm() + p.bias.squaredNorm();
    }
    EXPECT_NEAR(norms(i), direct, 1e-12 * direct);
  }
}

DpOptimizerConfig PrivateConfig(double nu, int g, double clip = 1.0) {
  DpOptimizerConfig c;
  c.noise_multiplier = nu;
  c.group_size = g;
  c.clip_norm = clip;
  c.learning_rate = 0.1;
  return c;
}

TEST(DpStepTest, NoiseStdScalesWithGroup) {
  Network net = MakeNet({4, 3}, 61);
  FactoredGradients g =
      *net.ComputeGradients({Matrix(RandomMatrix(5, 4, 62)), Matrix()},
                            OneHot(5, 3, 63));
  Network a = net;
  Network b = net;
  const double s1 = DpStep(a, g, PrivateConfig(0.7, 1), 1)->noise_std;
  const double s3 = DpStep(b, g, PrivateConfig(0.7, 3), 1)->noise_std;
  EXPECT_EQ(s3, 3.0 * s1);
  EXPECT_EQ(s1, 0.7 * 2.0 * 1.0);
}

TEST(DpStepTest, EmpiricalNoiseStd) {
  Layer big;
  big.weight = Matrix::Zero(400, 250);
  big.has_bias = false;
  big.bias = RowVector::Zero(250);
  big.activation = Activation::kIdentity;
  Network net(std::nullopt, Mlp({big}));
  FactoredGradients g = *net.ComputeGradients(
      {Matrix(Matrix::Zero(2, 400)), Matrix()}, OneHot(2, 250, 64));
  for (int group : {1, 4, 101}) {
    DpStepResult r = *DpStep(net, g, PrivateConfig(0.3, group, 0.5), 5);
    const Matrix& n = r.noise[0].weight;
    const double count = static_cast<double>(n.size());
    const double mean = n.mean();
    const double sd =
        std::sqrt((n.array() - mean).square().sum() / (count - 1.0));
    const double target = 0.3 * 2.0 * group * 0.5;
    EXPECT_LE(std::abs(sd - target), 3.0 * target / std::sqrt(2.0 * count))
        << group;
  }
}

TEST(DpStepTest, ClippingNoOpIsExact) {
  Network net = MakeNet({4, 5, 3}, 71);
  FactoredGradients g =
      *net.ComputeGradients({Matrix(RandomMatrix(6, 4, 72)), Matrix()},
                            OneHot(6, 3, 73));
  const double clip = std::sqrt(g.SquaredNorms().maxCoeff()) * 2.0;
  Network a = net;
  Network b = net;
  DpStepResult r1 = *DpStep(a, g, PrivateConfig(1.0, 1, clip), 9);
  DpStepResult r2 = *DpStep(b, g, PrivateConfig(1.0, 1, clip), 9);
  EXPECT_EQ(r1.clipped_count, 0);
  std::vector<ParamBlock> clean = g.WeightedSum(Vector::Ones(6));
  for (size_t l = 0; l < clean.size(); ++l) {
    EXPECT_TRUE((r1.clipped_sum[l].weight.array() ==
                 clean[l].weight.array())
                    .all());
    EXPECT_TRUE((r1.noise[l].weight.array() == r2.noise[l].weight.array())
                    .all());
    EXPECT_TRUE((r1.noisy_sum[l].weight.array() ==
                 (clean[l].weight + r2.noise[l].weight).array())
                    .all());
  }
}

TEST(DpStepTest, ClippedSumSensitivity) {
  // Batches differing in the labels of g samples with large inputs, so one
  // side of each pair is confidently wrong and clipped to norm C.
  Network net = MakeNet({3, 2}, 81);
  Matrix x = RandomMatrix(8, 3, 82, 50.0);
  Matrix y1 = OneHot(8, 2, 83);
  for (int g : {1, 2, 4}) {
    Matrix x2 = x;
    Matrix y2 = y1;
    for (int i = 0; i < g; ++i) {
      y2.row(i) = RowVector::Ones(2) - y1.row(i);
    }
    const double clip = 0.5;
    FactoredGradients g1 = *net.ComputeGradients({x, Matrix()}, y1);
    FactoredGradients g2 = *net.ComputeGradients({x2, Matrix()}, y2);
    Network a = net;
    Network b = net;
    DpStepResult r1 = *DpStep(a, g1, PrivateConfig(0.0, g, clip), 1);
    DpStepResult r2 = *DpStep(b, g2, PrivateConfig(0.0, g, clip), 1);
    double diff2 = 0.0;
    for (size_t l = 0; l < r1.clipped_sum.size(); ++l) {
      diff2 += (r1.clipped_sum[l].weight - r2.clipped_sum[l].weight)
                   .squaredNorm() +
               (r1.clipped_sum[l].bias - r2.clipped_sum[l].bias).squaredNorm();
    }
    EXPECT_LE(std::sqrt(diff2), 2.0 * g * clip + 1e-12);
    EXPECT_GT(std::sqrt(diff2), 0.5 * g * clip);
  }
}

TEST(DpStepTest, SlopeIndependentOfClipAndGroup) {
  Network net = MakeNet({3, 2}, 91);
  FactoredGradients g = *net.ComputeGradients(
      {Matrix(RandomMatrix(4, 3, 92)), Matrix()}, OneHot(4, 2, 93));
  for (double clip : {0.1, 1.0, 7.0}) {
    for (int group : {1, 5}) {
      Network m = net;
      DpStepResult r = *DpStep(m, g, PrivateConfig(2.0, group, clip), 1);
      const double delta = 2.0 * group * clip;
      EXPECT_DOUBLE_EQ(r.curve->slope(), 1.0 / (2.0 * 4.0));
      EXPECT_DOUBLE_EQ(delta * delta / (2.0 * r.noise_std * r.noise_std),
                       r.curve->slope());
    }
  }
  Network m = net;
  EXPECT_TRUE(DpStep(m, g, PrivateConfig(0.0, 1), 1)->curve->is_non_private());
}

TEST(DpStepTest, LargeNoiseUpdateIsUncorrelated) {
  Network net = MakeNet({5, 4}, 101);
  FactoredGradients g = *net.ComputeGradients(
      {Matrix(RandomMatrix(10, 5, 102)), Matrix()}, OneHot(10, 4, 103));
  std::vector<ParamBlock> clean = g.WeightedSum(Vector::Ones(10));
  double total = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Network m = net;
    DpStepResult r = *DpStep(m, g, PrivateConfig(1e3, 1, 1e6), t);
    double dot = 0.0, nu = 0.0, nc = 0.0;
    for (size_t l = 0; l < clean.size(); ++l) {
      const Matrix update = net.head().layers()[l].weight -
                            m.head().layers()[l].weight;
      dot += (update.array() * clean[l].weight.array()).sum();
      nu += update.squaredNorm();
      nc += clean[l].weight.squaredNorm();
    }
    total += dot / std::sqrt(nu * nc);
  }
  EXPECT_LT(std::abs(total / trials), 0.05);
}

TEST(TrainTest, ZeroEpochsAndSlope) {
  Network net = MakeNet({3, 2}, 111);
  ModelInput in{Matrix(RandomMatrix(6, 3, 112)), Matrix()};
  Matrix y = OneHot(6, 2, 113);
  DpOptimizerConfig c = PrivateConfig(1.0, 1);
  c.epochs = 0;
  Network m = net;
  TrainResult r = *Train(m, in, y, c, 1);
  EXPECT_EQ(r.curve->slope(), 0.0);
  EXPECT_TRUE((m.head().layers()[0].weight.array() ==
               net.head().layers()[0].weight.array())
                  .all());
  c.epochs = 100;
  r = *Train(m, in, y, c, 1);
  EXPECT_DOUBLE_EQ(r.curve->slope(), 50.0);
  EXPECT_EQ(r.losses.size(), 100u);
}

TEST(TrainTest, NonPrivateLossDecreases) {
  const int n = 40;
  Matrix x = RandomMatrix(n, 2, 121);
  Matrix y = Matrix::Zero(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) += x(i, 0) > 0 ? 1.0 : -1.0;
    y(i, x(i, 0) > 0 ? 1 : 0) = 1.0;
  }
  Network net = MakeNet({2, 8, 2}, 122);
  DpOptimizerConfig c;
  c.private_mode = false;
  c.epochs = 20;
  c.learning_rate = 0.2;
  TrainResult r = *Train(net, {x, Matrix()}, y, c, 1);
  EXPECT_FALSE(r.curve.has_value());
  for (size_t t = 1; t < r.losses.size(); ++t) {
    EXPECT_LT(r.losses[t], r.losses[t - 1]) << t;
  }
}

TEST(TrainTest, DeterministicAndHooks) {
  Network base = MakeNet({4, 6, 3}, 131);
  ModelInput in{Matrix(RandomMatrix(12, 4, 132)), Matrix()};
  Matrix y = OneHot(12, 3, 133);
  DpOptimizerConfig c = PrivateConfig(1.5, 2);
  c.epochs = 15;
  Network a = base;
  Network b = base;
  int calls = 0;
  TrainOptions opts;
  opts.post_step = [&](Network&) { ++calls; };
  ASSERT_TRUE(Train(a, in, y, c, 77, opts).ok());
  ASSERT_TRUE(Train(b, in, y, c, 77).ok());
  EXPECT_EQ(calls, 15);
  EXPECT_EQ(SerializeCheckpoint(a), SerializeCheckpoint(b));
  Network d = base;
  ASSERT_TRUE(Train(d, in, y, c, 78).ok());
  EXPECT_NE(SerializeCheckpoint(a), SerializeCheckpoint(d));
}

TEST(TrainTest, DropoutOnlyWhenAsked) {
  Network base = MakeNet({4, 6, 3}, 141);
  ModelInput in{Matrix(RandomMatrix(12, 4, 142)), Matrix()};
  Matrix y = OneHot(12, 3, 143);
  DpOptimizerConfig c;
  c.private_mode = false;
  c.epochs = 3;
  c.learning_rate = 0.1;
  Network a = base;
  Network b = base;
  ASSERT_TRUE(Train(a, in, y, c, 1).ok());
  c.dropout = 0.5;
  ASSERT_TRUE(Train(b, in, y, c, 1).ok());
  EXPECT_NE(SerializeCheckpoint(a), SerializeCheckpoint(b));
}

TEST(CheckpointTest, RoundTrip) {
  Mlp encoder = *Mlp::Create({5, 4}, 1);
  Network net(encoder, *Mlp::Create({6, 3}, 2));
  const std::string path = ::testing::TempDir() + "/w.gdpw";
  ASSERT_TRUE(SaveCheckpoint(path, net).ok());
  Network other(*Mlp::Create({5, 4}, 9), *Mlp::Create({6, 3}, 10));
  ASSERT_TRUE(LoadCheckpoint(path, other).ok());
  EXPECT_EQ(SerializeCheckpoint(other), SerializeCheckpoint(net));
  EXPECT_EQ(SerializeCheckpoint(net).substr(0, 4), "GDPW");
  Network wrong(std::nullopt, *Mlp::Create({6, 3}, 2));
  EXPECT_FALSE(LoadCheckpoint(path, wrong).ok());
}

}  // namespace
}  // namespace gdpkit
