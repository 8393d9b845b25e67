// tests/loss-test.cc
//
// Copyright (c)  2026  The Transduce Authors
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

#include "transduce/loss.h"

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"
#include "test-util.h"
#include "transduce/errors.h"

namespace transduce {
namespace {

using testing::CentralDifference;
using testing::MakeRandomInstance;

constexpr double kInf = std::numeric_limits<double>::infinity();

double RelErr(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4});
}

TEST(TransducerLoss, UniformSingleNode) {
  LogitsLattice logits(1, 0, 1);
  LossResult r = TransducerLoss(logits, {});
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(r.loss, 0.693147, 1e-6);
}

TEST(TransducerLoss, ShiftInvariance) {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 20; ++n) {
    auto inst = MakeRandomInstance(rng, 4, 4, 5);
    double before = TransducerLoss(inst.logits, inst.target).loss;
    for (auto &x : inst.logits.data) x += 7.3;
    EXPECT_NEAR(TransducerLoss(inst.logits, inst.target).loss, before, 1e-9);
  }
}

TEST(TransducerLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 30; ++n) {
    auto inst = MakeRandomInstance(rng, 4, 4, 5);
    LossResult r = TransducerLoss(inst.logits, inst.target);
    for (size_t i = 0; i < inst.logits.data.size(); ++i) {
      double num = CentralDifference(inst.logits.data, i, 1e-5, [&] {
        return TransducerLoss(inst.logits, inst.target).loss;
      });
      EXPECT_LE(RelErr(r.grad_logits[i], num), 1e-5) << "entry " << i;
    }
  }
}

TEST(TransducerLoss, GradientSumsToZeroPerNode) {
  // Softmax gradients are orthogonal to the all-ones direction.
  std::mt19937_64 rng(23);
  auto inst = MakeRandomInstance(rng, 4, 4, 5);
  LossResult r = TransducerLoss(inst.logits, inst.target);
  const int32_t V1 = inst.logits.NumSymbols();
  for (size_t base = 0; base < r.grad_logits.size(); base += V1) {
    double sum = 0;
    for (int32_t v = 0; v < V1; ++v) sum += r.grad_logits[base + v];
    EXPECT_NEAR(sum, 0.0, 1e-12);
  }
}

TEST(TransducerLoss, RejectsBadTarget) {
  LogitsLattice logits(2, 2, 3);
  EXPECT_THROW(TransducerLoss(logits, std::vector<int32_t>{0}), ConfigError);
  EXPECT_THROW(TransducerLoss(logits, std::vector<int32_t>{0, 3}), ConfigError);
}

TEST(SimpleJoiner, Examples) {
  Eigen::MatrixXd enc(2, 2), dec(2, 2);
  enc << 1, 0, 0, 1;
  dec << 1, 1, 2, 2;
  LogitsLattice l = SimpleJoinerLogits(enc, dec);
  ASSERT_EQ(l.U, 2);
  ASSERT_EQ(l.T, 1);
  EXPECT_EQ(l.Node(0, 0)[0], 2);
  EXPECT_EQ(l.Node(0, 0)[1], 1);
  EXPECT_EQ(l.Node(1, 1)[0], 2);
  EXPECT_EQ(l.Node(1, 1)[1], 3);
}

TEST(SimpleJoiner, ZeroedSides) {
  Eigen::MatrixXd enc = Eigen::MatrixXd::Random(3, 4);
  Eigen::MatrixXd dec = Eigen::MatrixXd::Random(5, 4);
  LogitsLattice a = SimpleJoinerLogits(Eigen::MatrixXd::Zero(3, 4), dec);
  LogitsLattice b = SimpleJoinerLogits(enc, Eigen::MatrixXd::Zero(5, 4));
  for (int u = 0; u < 3; ++u) {
    for (int t = 0; t < 5; ++t) {
      for (int v = 0; v < 4; ++v) {
        EXPECT_EQ(a.Node(u, t)[v], dec(t, v));
        EXPECT_EQ(b.Node(u, t)[v], b.Node(u, 0)[v]);
      }
    }
  }
}

TEST(PruneBounds, FullWindowStartsAtZero) {
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Random(3, 5).cwiseAbs();
  PruneBounds b = ComputePruneBounds(gamma, 5);
  EXPECT_EQ(b.start, (std::vector<int32_t>{0, 0, 0}));
  b = ComputePruneBounds(gamma, 9);
  EXPECT_EQ(b.start, (std::vector<int32_t>{0, 0, 0}));
}

TEST(PruneBounds, StaircaseWithUnitWindow) {
  // gamma(u, t) = 1 iff t = floor((u - 1) T / U), U = 3, T = 2.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(3, 3);
  for (int u = 1; u <= 3; ++u) gamma(u - 1, ((u - 1) * 2) / 3) = 1.0;
  PruneBounds b = ComputePruneBounds(gamma, 1);
  EXPECT_EQ(b.start, (std::vector<int32_t>{0, 0, 1}));
}

TEST(PruneBounds, UniformTiesGoFirst) {
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Constant(4, 6, 0.25);
  EXPECT_EQ(ComputePruneBounds(gamma, 3).start,
            (std::vector<int32_t>{0, 0, 0, 0}));
}

TEST(PruneBounds, PropertiesOnRandomPosteriors) {
  std::mt19937_64 rng(24);
  for (int n = 0; n < 200; ++n) {
    auto inst = MakeRandomInstance(rng, 6, 10, 4, 2.0);
    const int32_t T = inst.logits.T;
    LossResult r = TransducerLoss(inst.logits, inst.target);
    for (int32_t S = 1; S <= T + 2; ++S) {
      PruneBounds b = ComputePruneBounds(r.gamma, S);
      EXPECT_NO_THROW(ValidatePruneBounds(b, inst.logits.U, T));
      PruneBounds a = AnchorPruneBounds(b, T);
      EXPECT_NO_THROW(ValidatePruneBounds(a, inst.logits.U, T));
      for (int32_t wide = S; wide <= T + 2; ++wide) {
        PruneBounds w = WidenPruneBounds(b, T, wide);
        EXPECT_NO_THROW(ValidatePruneBounds(w, inst.logits.U, T));
        for (size_t u = 0; u < b.start.size(); ++u) {
          // Old window [start, start + S) inside the new one.
          EXPECT_LE(w.start[u], b.start[u]);
          EXPECT_GE(w.start[u] + w.Width(T), b.start[u] + b.Width(T));
        }
      }
    }
  }
}

TEST(PruneBounds, AnchoredWindowsKeepAPath) {
  std::mt19937_64 rng(25);
  for (int n = 0; n < 200; ++n) {
    auto inst = MakeRandomInstance(rng, 5, 12, 4, 2.0);
    const int32_t U = inst.logits.U, T = inst.logits.T;
    LossResult r = TransducerLoss(inst.logits, inst.target);
    for (int32_t S = 2; S <= T + 1; ++S) {
      PruneBounds b = AnchorPruneBounds(ComputePruneBounds(r.gamma, S), T);
      double loss = PrunedTransducerLoss(RestrictToBounds(inst.logits, b),
                                         inst.target).loss;
      if ((S - 1) * U >= T) {
        EXPECT_TRUE(std::isfinite(loss)) << "U=" << U << " T=" << T << " S=" << S;
      } else {
        EXPECT_EQ(loss, kInf);
      }
    }
  }
}

TEST(PruneBounds, ValidateRejects) {
  EXPECT_THROW(ValidatePruneBounds({2, {0, 3}}, 2, 3), ConfigError);
  EXPECT_THROW(ValidatePruneBounds({2, {1, 0}}, 2, 3), ConfigError);
  EXPECT_THROW(ValidatePruneBounds({2, {0}}, 2, 3), ConfigError);
}

TEST(PrunedLoss, EqualsExactWithFullWindow) {
  std::mt19937_64 rng(26);
  for (int n = 0; n < 50; ++n) {
    auto inst = MakeRandomInstance(rng, 4, 6, 5);
    const int32_t T = inst.logits.T;
    LossResult exact = TransducerLoss(inst.logits, inst.target);
    PruneBounds b = ComputePruneBounds(exact.gamma, T + 1);
    LossResult pruned = PrunedTransducerLoss(RestrictToBounds(inst.logits, b),
                                             inst.target);
    EXPECT_NEAR(pruned.loss, exact.loss, 1e-9);
    ASSERT_EQ(pruned.grad_logits.size(), exact.grad_logits.size());
    for (size_t i = 0; i < exact.grad_logits.size(); ++i) {
      EXPECT_NEAR(pruned.grad_logits[i], exact.grad_logits[i], 1e-9);
    }
  }
}

TEST(PrunedLoss, NeverBelowExact) {
  std::mt19937_64 rng(27);
  for (int n = 0; n < 100; ++n) {
    auto inst = MakeRandomInstance(rng, 4, 8, 5, 2.0);
    const int32_t T = inst.logits.T;
    LossResult exact = TransducerLoss(inst.logits, inst.target);
    for (int32_t S = 1; S <= T + 1; ++S) {
      PruneBounds b = ComputePruneBounds(exact.gamma, S);
      double loss = PrunedTransducerLoss(RestrictToBounds(inst.logits, b),
                                         inst.target).loss;
      EXPECT_GE(loss, exact.loss - 1e-12);
    }
  }
}

TEST(PrunedLoss, ExcludedPathGivesInfinity) {
  // U = 1 needs every token in row 0, so a window of 2 over T = 3 cannot
  // hold a complete path.
  LogitsLattice logits(1, 3, 2);
  std::vector<int32_t> y{0, 1, 0};
  PruneBounds b{2, {0}};
  LossResult r = PrunedTransducerLoss(RestrictToBounds(logits, b), y);
  EXPECT_EQ(r.loss, kInf);
  for (double g : r.grad_logits) EXPECT_EQ(g, 0.0);
}

TEST(PrunedLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(28);
  int checked = 0;
  for (int n = 0; n < 40; ++n) {
    auto inst = MakeRandomInstance(rng, 4, 6, 4);
    const int32_t U = inst.logits.U, T = inst.logits.T;
    LossResult exact = TransducerLoss(inst.logits, inst.target);
    int32_t S = std::min(T + 1, (T + U - 1) / U + 1 + n % 2);
    PruneBounds b = AnchorPruneBounds(ComputePruneBounds(exact.gamma, S), T);
    PrunedLogits p = RestrictToBounds(inst.logits, b);
    LossResult r = PrunedTransducerLoss(p, inst.target);
    ASSERT_TRUE(std::isfinite(r.loss));
    for (size_t i = 0; i < p.data.size(); ++i) {
      double num = CentralDifference(p.data, i, 1e-5, [&] {
        return PrunedTransducerLoss(p, inst.target).loss;
      });
      EXPECT_LE(RelErr(r.grad_logits[i], num), 1e-5);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(PrunedLoss, ScoresOnlyWindowStorage) {
  LogitsLattice logits(5, 20, 3);
  PruneBounds b{4, {0, 4, 8, 12, 16}};
  PrunedLogits p = RestrictToBounds(logits, b);
  EXPECT_EQ(p.data.size(), 5u * 4u * 4u);
}

TEST(CombineObjectives, Arithmetic) {
  LossResult s, p;
  s.loss = 2.0;
  p.loss = 3.0;
  EXPECT_DOUBLE_EQ(CombineObjectives(s, p, 0.5, 1.0).value, 4.0);
  p.loss = 2.0;
  EXPECT_DOUBLE_EQ(CombineObjectives(s, p, 1.0, 0.0).value, 2.0);
  s.loss = 5.0;
  p.loss = 3.0;
  EXPECT_DOUBLE_EQ(CombineObjectives(s, p, 0.0, 0.7).value, 0.7 * 3.0);
}

TEST(CombineObjectives, ZeroScaleIgnoresInfinity) {
  LossResult s, p;
  s.loss = kInf;
  s.grad_logits = {1.0, 2.0};
  p.loss = 1.5;
  p.grad_logits = {3.0};
  CombinedObjective c = CombineObjectives(s, p, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(c.value, 3.0);
  EXPECT_EQ(c.simple.grad_logits, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(c.pruned.grad_logits, (std::vector<double>{6.0}));
  EXPECT_THROW(CombineObjectives(s, p, -1.0, 1.0), ConfigError);
}

}  // namespace
}  // namespace transduce
