// include/transduce/log-math.h
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

#ifndef TRANSDUCE_LOG_MATH_H_
#define TRANSDUCE_LOG_MATH_H_

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace transduce {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)); returns kLogZero when both are kLogZero.
inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

// Returns kLogZero for an empty span or when every entry is kLogZero.
double LogSumExp(std::span<const double> x);

// out[i] = x[i] - LogSumExp(x). `out` may alias `x`.
void LogSoftmax(std::span<const double> x, std::span<double> out);

// out[i] = exp(x[i] - LogSumExp(x)).
void Softmax(std::span<const double> x, std::span<double> out);

}  // namespace transduce

#endif  // TRANSDUCE_LOG_MATH_H_
