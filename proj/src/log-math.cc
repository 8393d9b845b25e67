// src/log-math.cc
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

#include "transduce/log-math.h"

#include <algorithm>

namespace transduce {

double LogSumExp(std::span<const double> x) {
  if (x.empty()) return kLogZero;
  double max_value = *std::max_element(x.begin(), x.end());
  if (max_value == kLogZero) return kLogZero;
  if (std::isinf(max_value)) return max_value;
  double sum = 0;
  for (double v : x) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

void LogSoftmax(std::span<const double> x, std::span<double> out) {
  double norm = LogSumExp(x);
  for (size_t i = 0; i != x.size(); ++i) out[i] = x[i] - norm;
}

void Softmax(std::span<const double> x, std::span<double> out) {
  double norm = LogSumExp(x);
  for (size_t i = 0; i != x.size(); ++i) out[i] = std::exp(x[i] - norm);
}

}  // namespace transduce
