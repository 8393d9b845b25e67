// src/quantizer.cc
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

#include "transduce/quantizer.h"

#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "nlohmann/json.hpp"
#include "transduce/errors.h"

namespace transduce {

namespace {

using nlohmann::json;

double SquaredDistance(const Eigen::Ref<const Eigen::VectorXd> &a,
                       const Eigen::Ref<const Eigen::VectorXd> &b) {
  return (a - b).squaredNorm();
}

// Distance to the nearest centroid among the first `num_centroids` rows.
double NearestDistance(const Eigen::MatrixXd &centroids, int32_t num_centroids,
                       const Eigen::Ref<const Eigen::VectorXd> &x,
                       int32_t *index) {
  double best = std::numeric_limits<double>::infinity();
  int32_t best_index = 0;
  for (int32_t c = 0; c < num_centroids; ++c) {
    double d = SquaredDistance(centroids.row(c).transpose(), x);
    if (d < best) {
      best = d;
      best_index = c;
    }
  }
  if (index) *index = best_index;
  return best;
}

double UniformUnit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// k-means++: first centre uniform, then proportional to squared distance.
Eigen::MatrixXd SeedCentroids(const Eigen::MatrixXd &data, int32_t k,
                              std::mt19937_64 &rng) {
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd centroids(k, data.cols());
  centroids.row(0) = data.row(static_cast<Eigen::Index>(rng() % n));
  std::vector<double> dist(n);
  for (int32_t c = 1; c < k; ++c) {
    double total = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      dist[i] = NearestDistance(centroids, c, data.row(i).transpose(), nullptr);
      total += dist[i];
    }
    Eigen::Index pick = 0;
    if (total > 0) {
      double target = UniformUnit(rng) * total;
      double acc = 0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc > target && dist[i] > 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng() % n);
    }
    centroids.row(c) = data.row(pick);
  }
  return centroids;
}

void CheckDims(const Codebook &cb, Eigen::Index dim) {
  if (cb.k() < 1) throw ConfigError("codebook is empty");
  if (dim != cb.dim()) {
    throw ConfigError("dimension mismatch: frame has " + std::to_string(dim) +
                      ", codebook has " + std::to_string(cb.dim()));
  }
}

}  // namespace

KMeansResult FitKMeans(const Eigen::MatrixXd &data, const KMeansOptions &opts) {
  if (opts.k < 1) throw ConfigError("k-means needs k >= 1");
  if (opts.max_iters < 1) throw ConfigError("k-means needs max_iters >= 1");
  if (data.cols() < 1) throw ConfigError("k-means needs vectors of dim >= 1");
  if (!data.allFinite()) throw ConfigError("k-means input has non-finite values");
  if (data.rows() < opts.k) {
    throw ConfigError("k-means needs at least k = " + std::to_string(opts.k) +
                      " points, got " + std::to_string(data.rows()));
  }
  const Eigen::Index n = data.rows();
  const int32_t k = opts.k;
  std::mt19937_64 rng(opts.seed);

  KMeansResult result;
  Eigen::MatrixXd centroids = SeedCentroids(data, k, rng);
  std::vector<int32_t> assignment(n, -1);
  std::vector<double> dist(n);

  result.codebook.centroids = centroids;
  result.inertia_history.push_back(Inertia(result.codebook, data));

  for (int32_t iter = 0; iter < opts.max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int32_t c = 0;
      dist[i] = NearestDistance(centroids, k, data.row(i).transpose(), &c);
      if (c != assignment[i]) {
        assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) {
      result.converged = true;
      break;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    std::vector<int64_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assignment[i]) += data.row(i);
      ++counts[assignment[i]];
    }
    for (int32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids.row(c) = sums.row(c) / counts[c];
    }
    for (int32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Farthest point from the centroid it is currently assigned to.
      Eigen::Index far = 0;
      double far_dist = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = SquaredDistance(centroids.row(assignment[i]).transpose(),
                                   data.row(i).transpose());
        if (d > far_dist) {
          far_dist = d;
          far = i;
        }
      }
      centroids.row(c) = data.row(far);
      --counts[assignment[far]];
      assignment[far] = c;
      counts[c] = 1;
    }

    ++result.iterations;
    result.codebook.centroids = centroids;
    result.inertia_history.push_back(Inertia(result.codebook, data));
  }
  result.codebook.centroids = centroids;
  return result;
}

int32_t Assign(const Codebook &cb,
               const Eigen::Ref<const Eigen::VectorXd> &frame) {
  CheckDims(cb, frame.size());
  int32_t index = 0;
  NearestDistance(cb.centroids, cb.k(), frame, &index);
  return index;
}

std::vector<int32_t> AssignAll(const Codebook &cb, const Eigen::MatrixXd &data) {
  CheckDims(cb, data.cols());
  std::vector<int32_t> ids(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    NearestDistance(cb.centroids, cb.k(), data.row(i).transpose(), &ids[i]);
  }
  return ids;
}

double Inertia(const Codebook &cb, const Eigen::MatrixXd &data) {
  CheckDims(cb, data.cols());
  double total = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    total += NearestDistance(cb.centroids, cb.k(), data.row(i).transpose(),
                             nullptr);
  }
  return total;
}

std::string CodebookToJson(const Codebook &cb) {
  json j;
  j["version"] = cb.version;
  j["k"] = cb.k();
  j["dim"] = cb.dim();
  json rows = json::array();
  for (int32_t c = 0; c < cb.k(); ++c) {
    json row = json::array();
    for (int32_t d = 0; d < cb.dim(); ++d) row.push_back(cb.centroids(c, d));
    rows.push_back(std::move(row));
  }
  j["centroids"] = std::move(rows);
  return j.dump();
}

Codebook CodebookFromJson(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw IoError(std::string("codebook: ") + e.what());
  }
  try {
    int32_t version = j.at("version").get<int32_t>();
    if (version != Codebook::kVersion) {
      throw IoError("codebook: unsupported version " + std::to_string(version));
    }
    int32_t k = j.at("k").get<int32_t>();
    int32_t dim = j.at("dim").get<int32_t>();
    const json &rows = j.at("centroids");
    if (k < 1 || dim < 1 || rows.size() != static_cast<size_t>(k)) {
      throw IoError("codebook: centroid table does not match k");
    }
    Codebook cb;
    cb.centroids.resize(k, dim);
    for (int32_t c = 0; c < k; ++c) {
      if (rows[c].size() != static_cast<size_t>(dim)) {
        throw IoError("codebook: centroid " + std::to_string(c) +
                      " does not match dim");
      }
      for (int32_t d = 0; d < dim; ++d) {
        cb.centroids(c, d) = rows[c][d].get<double>();
      }
    }
    if (!cb.centroids.allFinite()) throw IoError("codebook: non-finite centroid");
    return cb;
  } catch (const json::exception &e) {
    throw IoError(std::string("codebook: ") + e.what());
  }
}

void SaveCodebook(const Codebook &cb, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << CodebookToJson(cb) << "\n";
  if (!os) throw IoError("failed writing " + path);
}

Codebook LoadCodebook(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return CodebookFromJson(ss.str());
}

}  // namespace transduce
