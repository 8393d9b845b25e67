// tests/decode-test.cc
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

#include "transduce/decode.h"

#include <cmath>
#include <functional>
#include <random>

#include "gtest/gtest.h"
#include "transduce/errors.h"

namespace transduce {
namespace {

// Logits from a fixed function of (u, number of tokens emitted so far).
class TableScorer : public StepScorer {
 public:
  using Fn = std::function<Eigen::VectorXd(int32_t u, int32_t emitted)>;
  TableScorer(int32_t U, int32_t V, Fn fn) : U_(U), V_(V), fn_(std::move(fn)) {}

  int32_t NumPositions() const override { return U_; }
  int32_t VocabSize() const override { return V_; }
  void Reset() override { emitted_.clear(); }
  Eigen::VectorXd Logits(int32_t u) override {
    return fn_(u, static_cast<int32_t>(emitted_.size()));
  }
  void Emit(int32_t token) override { emitted_.push_back(token); }

  const std::vector<int32_t> &emitted() const { return emitted_; }

 private:
  int32_t U_, V_;
  Fn fn_;
  std::vector<int32_t> emitted_;
};

Eigen::VectorXd OneHot(int32_t size, int32_t hot, double margin = 10.0) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  v(hot) = margin;
  return v;
}

TEST(GreedyDecode, AlwaysBlank) {
  const int32_t V = 4, U = 5;
  TableScorer s(U, V, [&](int32_t, int32_t) { return OneHot(V + 1, V); });
  DecodeOutput out = GreedyDecode(s, DecodeConfig{});
  EXPECT_TRUE(out.tokens.empty());
  EXPECT_EQ(out.alignment.steps, std::vector<Step>(U, Step::kBlank));
  EXPECT_TRUE(IsConsistent(out, U, V));
}

TEST(GreedyDecode, OneHotTeacherRecoversTarget) {
  // Position u emits y[u] twice, then blank.
  const int32_t V = 6;
  std::vector<int32_t> per_pos{3, 1, 5};
  TableScorer s(3, V, [&](int32_t u, int32_t emitted) {
    return emitted < 2 * (u + 1) ? OneHot(V + 1, per_pos[u]) : OneHot(V + 1, V);
  });
  DecodeOutput out = GreedyDecode(s, DecodeConfig{});
  EXPECT_EQ(out.tokens, (std::vector<int32_t>{3, 3, 1, 1, 5, 5}));
  EXPECT_EQ(s.emitted(), out.tokens);
  EXPECT_TRUE(IsConsistent(out, 3, V));
  EXPECT_EQ(out.log_probs.size(), out.symbols.size());
}

TEST(GreedyDecode, AlwaysEmitHitsCap) {
  const int32_t V = 3, U = 4;
  DecodeConfig cfg;
  cfg.max_symbols_per_position = 5;
  TableScorer s(U, V, [&](int32_t, int32_t) { return OneHot(V + 1, 2); });
  DecodeOutput out = GreedyDecode(s, cfg);
  EXPECT_EQ(out.tokens.size(), static_cast<size_t>(U * 5));
  EXPECT_TRUE(IsConsistent(out, U, V));
}

TEST(GreedyDecode, TiesGoToLowestIndex) {
  const int32_t V = 3;
  TableScorer s(1, V, [&](int32_t, int32_t emitted) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(V + 1);
    if (emitted == 0) v << 0, 2, 2, 0;
    else v(V) = 1;
    return v;
  });
  EXPECT_EQ(GreedyDecode(s, DecodeConfig{}).tokens, std::vector<int32_t>{1});
}

Eigen::VectorXd FixedLogits(int32_t u, int32_t emitted, int32_t V) {
  Eigen::VectorXd v(V + 1);
  for (int32_t i = 0; i <= V; ++i) v(i) = std::sin(1.7 * i + 0.9 * u + 0.3 * emitted);
  return v;
}

TEST(TopKSampleDecode, KOneIsGreedy) {
  const int32_t V = 5;
  TableScorer s(6, V, [&](int32_t u, int32_t e) { return FixedLogits(u, e, V); });
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kTopK;
  cfg.k = 1;
  cfg.seed = 3;
  DecodeOutput a = TopKSampleDecode(s, cfg);
  DecodeOutput b = GreedyDecode(s, cfg);
  EXPECT_EQ(a.symbols, b.symbols);
  EXPECT_EQ(a.tokens, b.tokens);
}

TEST(TopKSampleDecode, SeedDeterminism) {
  const int32_t V = 5;
  TableScorer s(8, V, [&](int32_t u, int32_t e) { return FixedLogits(u, e, V); });
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kTopK;
  cfg.k = 4;
  cfg.seed = 11;
  DecodeOutput a = Decode(s, cfg), b = Decode(s, cfg);
  EXPECT_EQ(a.symbols, b.symbols);
  EXPECT_TRUE(IsConsistent(a, 8, V));
}

TEST(TopKSampleDecode, SamplesOnlyFromTopK) {
  const int32_t V = 6;
  TableScorer s(20, V, [&](int32_t, int32_t) {
    Eigen::VectorXd v(V + 1);
    v << 5, 4, 3, -1, -2, -3, 4.5;  // top 3: 0, 6 (blank), 1
    return v;
  });
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kTopK;
  cfg.k = 3;
  cfg.max_symbols_per_position = 50;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    for (int32_t sym : TopKSampleDecode(s, cfg).symbols) {
      EXPECT_TRUE(sym == 0 || sym == 1 || sym == V) << sym;
    }
  }
}

TEST(TopKSampleDecode, UniformBlankRateWithinThreeSigma) {
  // One free draw per decode: with a cap of one, an emission at the single
  // position forces the closing blank.
  const int32_t V = 4;
  const int n = 10000;
  TableScorer s(1, V, [&](int32_t, int32_t) { return Eigen::VectorXd::Zero(V + 1); });
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kTopK;
  cfg.k = V + 1;
  cfg.max_symbols_per_position = 1;
  int blanks = 0;
  for (int i = 0; i < n; ++i) {
    cfg.seed = static_cast<uint64_t>(i);
    blanks += TopKSampleDecode(s, cfg).symbols.front() == V;
  }
  const double p = 1.0 / (V + 1);
  const double sigma = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(static_cast<double>(blanks) / n, p, 3 * sigma);
}

TEST(DecodeConfig, Validation) {
  DecodeConfig cfg;
  EXPECT_NO_THROW(cfg.Validate(5));
  cfg.k = 6;
  EXPECT_NO_THROW(cfg.Validate(5));  // greedy ignores k
  cfg.mode = DecodeMode::kTopK;
  EXPECT_THROW(cfg.Validate(5), ConfigError);
  cfg = DecodeConfig{};
  cfg.temperature = 0;
  EXPECT_THROW(cfg.Validate(5), ConfigError);
  EXPECT_EQ(ParseDecodeMode("topk"), DecodeMode::kTopK);
  EXPECT_EQ(DecodeModeName(ParseDecodeMode("greedy")), "greedy");
  EXPECT_THROW(ParseDecodeMode("beam"), ConfigError);
}

}  // namespace
}  // namespace transduce
