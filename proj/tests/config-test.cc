// tests/config-test.cc
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

#include "transduce/config.h"

#include "gtest/gtest.h"
#include "transduce/errors.h"

namespace transduce {
namespace {

TEST(RunConfig, Defaults) {
  RunConfig cfg = LoadRunConfig("", {});
  EXPECT_EQ(cfg.adam.lr, 1e-2);
  EXPECT_EQ(cfg.adam.beta1, 0.9);
  EXPECT_EQ(cfg.adam.beta2, 0.98);
  EXPECT_EQ(cfg.batch_size, 16);
  EXPECT_EQ(cfg.epochs, 30);
  EXPECT_EQ(cfg.corpus.num_utts, 2000);
  EXPECT_EQ(cfg.corpus.min_text_len, 3);
  EXPECT_EQ(cfg.corpus.max_text_len, 8);
  EXPECT_EQ(cfg.corpus.rates, (std::vector<int32_t>{1, 2, 3}));
  EXPECT_EQ(cfg.eval_utts, 200);
  EXPECT_EQ(cfg.decode.mode, DecodeMode::kGreedy);
}

TEST(RunConfig, OverridesAndFileValues) {
  RunConfig cfg = LoadRunConfig(R"({"optim":{"lr":0.05},"decode":{"mode":"topk"}})",
                                {"loss.prune_range=12", "corpus.rates=[1,4]",
                                 "model.vocab=40"});
  EXPECT_EQ(cfg.adam.lr, 0.05);
  EXPECT_EQ(cfg.decode.mode, DecodeMode::kTopK);
  EXPECT_EQ(cfg.loss.prune_range, 12);
  EXPECT_EQ(cfg.corpus.rates, (std::vector<int32_t>{1, 4}));
  EXPECT_EQ(cfg.corpus.vocab, 40);
}

TEST(RunConfig, RoundTripThroughJson) {
  RunConfig cfg = LoadRunConfig("", {"seed=99", "optim.epochs=3"});
  RunConfig back = LoadRunConfig(RunConfigToJson(cfg), {});
  EXPECT_EQ(RunConfigToJson(back), RunConfigToJson(cfg));
  EXPECT_EQ(back.seed, 99u);
}

TEST(RunConfig, Rejections) {
  EXPECT_THROW(LoadRunConfig("", {"model.bogus=1"}), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"nodots"}), ConfigError);
  EXPECT_THROW(LoadRunConfig("{", {}), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"optim.lr=-1"}), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"loss.alpha1=-0.5"}), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"optim.epochs=\"many\""}), ConfigError);
  EXPECT_THROW(LoadRunConfig("", {"decode.mode=beam"}), ConfigError);
  EXPECT_THROW(LoadRunConfig(R"({"version":2})", {}), ConfigError);
}

}  // namespace
}  // namespace transduce
