// include/transduce/checks.h
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

#ifndef TRANSDUCE_CHECKS_H_
#define TRANSDUCE_CHECKS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "transduce/model.h"

namespace transduce {

struct CheckLine {
  std::string name;
  double value = 0;      // measured quantity, e.g. a max error
  double threshold = 0;  // pass when value <= threshold
  bool pass = false;
};

struct CheckReport {
  std::string suite;
  uint64_t seed = 0;
  std::vector<CheckLine> lines;

  void Add(std::string name, double value, double threshold);
  bool AllPass() const;
  std::string ToJson() const;
  std::string ToText() const;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps entries near zero from
// being judged on central-difference round-off, about eps * |loss| / h.
double RelativeError(double analytic, double numeric, double floor);

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kLossGradTolerance = 1e-5;
inline constexpr double kModelGradTolerance = 1e-4;
inline constexpr double kGradientFloor = 1e-4;

struct GradcheckOptions {
  uint64_t seed = 7;
  int32_t loss_instances = 50;
  int32_t model_instances = 6;
  ModelDims model_dims;  // desk-scale widths by default
  // Perturbs one analytic gradient entry in each suite; the report must
  // then fail.
  bool inject_fault = false;
};

// Central differences against the analytic gradients of the exact and pruned
// losses (w.r.t. logits) and of the end-to-end model objective (w.r.t.
// every parameter tensor, one line per tensor).
CheckReport RunGradcheck(const GradcheckOptions &opts);

struct OracleCheckOptions {
  uint64_t seed = 7;
  int32_t num_lattices = 100;
  int32_t max_text = 4;
  int32_t max_tokens = 4;
  int32_t max_vocab = 5;
  int32_t sweep_instances = 50;
  int32_t sweep_max_tokens = 8;
};

inline constexpr double kOracleTolerance = 1e-9;
inline constexpr double kMonotoneSlack = 1e-12;

// Forward vs enumeration, forward/backward duality, anti-diagonal
// occupancy sums, and the pruned-loss sweep over nested windows.
CheckReport RunOracleCheck(const OracleCheckOptions &opts);

}  // namespace transduce

#endif  // TRANSDUCE_CHECKS_H_
