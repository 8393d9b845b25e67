// tests/checks-test.cc
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

#include "transduce/checks.h"

#include <cmath>

#include "gtest/gtest.h"

namespace transduce {
namespace {

TEST(RunGradcheck, PassesAndListsEveryTensor) {
  CheckReport r = RunGradcheck({});
  EXPECT_TRUE(r.AllPass()) << r.ToText();
  int model_lines = 0;
  for (const auto &l : r.lines) model_lines += l.name.rfind("model.", 0) == 0;
  // text embedding, 2 x 6 encoder tensors, 5 decoder, 2 reference, 6 joiner,
  // 3 simple joiner.
  EXPECT_EQ(model_lines, 1 + 12 + 5 + 2 + 6 + 3);
}

TEST(RunGradcheck, FaultIsDetected) {
  GradcheckOptions opts;
  opts.model_dims.d_model = 6;
  opts.model_dims.joiner_dim = 8;
  opts.model_dims.ff_multiplier = 2;
  opts.inject_fault = true;
  CheckReport r = RunGradcheck(opts);
  EXPECT_FALSE(r.AllPass());
}

TEST(RunOracleCheck, PassesAndIsDeterministic) {
  CheckReport a = RunOracleCheck({}), b = RunOracleCheck({});
  EXPECT_TRUE(a.AllPass()) << a.ToText();
  EXPECT_EQ(a.ToJson(), b.ToJson());
}

TEST(CheckReport, NanFails) {
  CheckReport r;
  r.Add("x", std::nan(""), 1.0);
  EXPECT_FALSE(r.AllPass());
  EXPECT_FALSE(CheckReport{}.AllPass());
}

}  // namespace
}  // namespace transduce
