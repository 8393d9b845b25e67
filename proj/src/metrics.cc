// src/metrics.cc
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

#include "transduce/metrics.h"

#include <algorithm>
#include <cmath>

#include "transduce/errors.h"

namespace transduce {

int32_t EditDistance(std::span<const int32_t> hyp,
                     std::span<const int32_t> ref) {
  // Single-row DP over the reference.
  std::vector<int32_t> row(ref.size() + 1);
  for (size_t j = 0; j <= ref.size(); ++j) row[j] = static_cast<int32_t>(j);
  for (size_t i = 1; i <= hyp.size(); ++i) {
    int32_t diag = row[0];
    row[0] = static_cast<int32_t>(i);
    for (size_t j = 1; j <= ref.size(); ++j) {
      int32_t sub = diag + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[ref.size()];
}

double TokenErrorRate(std::span<const int32_t> hyp,
                      std::span<const int32_t> ref) {
  if (ref.empty()) throw ConfigError("token error rate needs a non-empty reference");
  return static_cast<double>(EditDistance(hyp, ref)) / ref.size();
}

double PearsonCorrelation(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw ConfigError("correlation needs at least 3 pairs");
  const double n = static_cast<double>(pairs.size());
  double mx = 0, my = 0;
  for (const auto &[x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto &[x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0 || syy == 0) {
    throw ConfigError("correlation undefined: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace transduce
