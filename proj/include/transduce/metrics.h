// include/transduce/metrics.h
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

#ifndef TRANSDUCE_METRICS_H_
#define TRANSDUCE_METRICS_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace transduce {

// Levenshtein distance with unit substitution, insertion and deletion costs.
int32_t EditDistance(std::span<const int32_t> hyp, std::span<const int32_t> ref);

// EditDistance(hyp, ref) / |ref|. Throws ConfigError for an empty reference.
double TokenErrorRate(std::span<const int32_t> hyp, std::span<const int32_t> ref);

// Pearson correlation of (x, y) pairs. Throws ConfigError with fewer than
// three pairs or when either series is constant.
double PearsonCorrelation(std::span<const std::pair<double, double>> pairs);

}  // namespace transduce

#endif  // TRANSDUCE_METRICS_H_
