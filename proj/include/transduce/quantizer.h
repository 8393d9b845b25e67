// include/transduce/quantizer.h
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

#ifndef TRANSDUCE_QUANTIZER_H_
#define TRANSDUCE_QUANTIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Core"

namespace transduce {

// k centroids; the token id of a frame is the index of its nearest centroid.
struct Codebook {
  static constexpr int32_t kVersion = 1;

  int32_t version = kVersion;
  Eigen::MatrixXd centroids;  // k x dim, one centroid per row

  int32_t k() const { return static_cast<int32_t>(centroids.rows()); }
  int32_t dim() const { return static_cast<int32_t>(centroids.cols()); }
};

struct KMeansOptions {
  int32_t k = 32;
  int32_t max_iters = 100;
  uint64_t seed = 0;
};

struct KMeansResult {
  Codebook codebook;
  // inertia_history[0] is after seeding, then one entry per Lloyd iteration.
  std::vector<double> inertia_history;
  int32_t iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm from k-means++ seeding. `data` holds one point per row.
// Stops after max_iters or when no assignment changes. A cluster that ends
// up empty is moved onto the point farthest from its own centroid.
KMeansResult FitKMeans(const Eigen::MatrixXd &data, const KMeansOptions &opts);

// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
int32_t Assign(const Codebook &cb, const Eigen::Ref<const Eigen::VectorXd> &frame);

std::vector<int32_t> AssignAll(const Codebook &cb, const Eigen::MatrixXd &data);

// Sum over rows of the squared distance to the nearest centroid.
double Inertia(const Codebook &cb, const Eigen::MatrixXd &data);

// {"version":1,"k":...,"dim":...,"centroids":[[...],...]}
std::string CodebookToJson(const Codebook &cb);
Codebook CodebookFromJson(const std::string &text);
void SaveCodebook(const Codebook &cb, const std::string &path);
Codebook LoadCodebook(const std::string &path);

}  // namespace transduce

#endif  // TRANSDUCE_QUANTIZER_H_
