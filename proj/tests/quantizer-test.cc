// tests/quantizer-test.cc
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

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"
#include "test-util.h"
#include "transduce/corpus.h"
#include "transduce/errors.h"

namespace transduce {
namespace {

Eigen::MatrixXd Column(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(xs.size(), 1);
  int i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

// Smallest within-cluster sum of squares over every 2-partition.
double BestTwoPartitionInertia(const Eigen::MatrixXd &data) {
  const int n = static_cast<int>(data.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    double total = 0;
    for (int side = 0; side < 2; ++side) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(data.cols());
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (((mask >> i) & 1) == side) {
          mean += data.row(i).transpose();
          ++count;
        }
      }
      mean /= count;
      for (int i = 0; i < n; ++i) {
        if (((mask >> i) & 1) == side) total += (data.row(i).transpose() - mean).squaredNorm();
      }
    }
    best = std::min(best, total);
  }
  return best;
}

TEST(FitKMeans, FourPointExample) {
  Eigen::MatrixXd data = Column({0, 1, 10, 11});
  ASSERT_DOUBLE_EQ(BestTwoPartitionInertia(data), 1.0);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    KMeansResult r = FitKMeans(data, {2, 100, seed});
    EXPECT_DOUBLE_EQ(r.inertia_history.back(), 1.0);
    EXPECT_DOUBLE_EQ(Inertia(r.codebook, data), 1.0);
    double lo = std::min(r.codebook.centroids(0, 0), r.codebook.centroids(1, 0));
    double hi = std::max(r.codebook.centroids(0, 0), r.codebook.centroids(1, 0));
    EXPECT_DOUBLE_EQ(lo, 0.5);
    EXPECT_DOUBLE_EQ(hi, 10.5);
  }
}

TEST(FitKMeans, OneCentroidPerDistinctPoint) {
  Eigen::MatrixXd data(5, 2);
  data << 0, 0, 1, 0, 0, 1, 1, 0, 3, 3;
  KMeansResult r = FitKMeans(data, {4, 100, 3});
  EXPECT_DOUBLE_EQ(r.inertia_history.back(), 0.0);
}

TEST(FitKMeans, SingleClusterIsMean) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd data(50, 3);
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = normal(rng);
  KMeansResult r = FitKMeans(data, {1, 100, 0});
  Eigen::RowVectorXd mean = data.colwise().mean();
  EXPECT_LE((r.codebook.centroids.row(0) - mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitKMeans, InertiaNeverIncreases) {
  EmbeddingConfig ec;
  ec.num_sequences = 8;
  ec.noise_std = 3.0;
  Eigen::MatrixXd data = StackFrames(GenerateEmbeddings(ec));
  for (uint64_t seed = 0; seed < 5; ++seed) {
    KMeansResult r = FitKMeans(data, {16, 100, seed});
    ASSERT_GE(r.inertia_history.size(), 2u);
    for (size_t i = 1; i < r.inertia_history.size(); ++i) {
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-12);
    }
    EXPECT_DOUBLE_EQ(r.inertia_history.back(), Inertia(r.codebook, data));
  }
}

TEST(FitKMeans, DeterministicRefits) {
  EmbeddingConfig ec;
  ec.num_sequences = 4;
  Eigen::MatrixXd data = StackFrames(GenerateEmbeddings(ec));
  KMeansResult a = FitKMeans(data, {8, 50, 9});
  KMeansResult b = FitKMeans(data, {8, 50, 9});
  EXPECT_EQ(CodebookToJson(a.codebook), CodebookToJson(b.codebook));
  EXPECT_EQ(a.inertia_history, b.inertia_history);
}

TEST(FitKMeans, RecoversGeneratingMeans) {
  EmbeddingConfig ec;
  ec.num_sequences = 32;
  Eigen::MatrixXd means = ClusterMeans(ec);
  std::vector<EmbeddingSequence> seqs = GenerateEmbeddings(ec);
  Eigen::MatrixXd data = StackFrames(seqs);
  KMeansResult r = FitKMeans(data, {ec.num_clusters, 100, 1});
  std::vector<int> counts(ec.num_clusters, 0);
  for (const auto &s : seqs) for (int32_t c : s.cluster_ids) ++counts[c];
  for (int32_t c = 0; c < ec.num_clusters; ++c) {
    int32_t idx = Assign(r.codebook, means.row(c).transpose());
    double bound = ec.noise_std * 3 / std::sqrt(static_cast<double>(counts[c]));
    EXPECT_LE((r.codebook.centroids.row(idx) - means.row(c)).cwiseAbs().maxCoeff(),
              bound) << "cluster " << c;
  }
}

TEST(FitKMeans, RejectsBadInput) {
  EXPECT_THROW(FitKMeans(Column({1, 2}), {3, 10, 0}), ConfigError);
  EXPECT_THROW(FitKMeans(Column({1, 2}), {0, 10, 0}), ConfigError);
  EXPECT_THROW(FitKMeans(Column({1, std::nan("")}), {1, 10, 0}), ConfigError);
}

TEST(Assign, Examples) {
  Codebook cb;
  cb.centroids = Column({0.5, 10.5});
  EXPECT_EQ(Assign(cb, Eigen::VectorXd::Constant(1, 10.2)), 1);
  Codebook four;
  four.centroids = Column({-3, 1, 3, 7});
  EXPECT_EQ(Assign(four, Eigen::VectorXd::Constant(1, 7)), 3);
  EXPECT_EQ(Assign(four, Eigen::VectorXd::Constant(1, 2)), 1);  // tie 1 vs 2
}

TEST(Inertia, Examples) {
  Codebook cb;
  cb.centroids = Column({0.5, 10.5});
  EXPECT_DOUBLE_EQ(Inertia(cb, Column({0, 1, 10, 11})), 1.0);
  EXPECT_DOUBLE_EQ(Inertia(cb, Column({0.5, 10.5, 0.5})), 0.0);
  EXPECT_DOUBLE_EQ(Inertia(cb, Column({3.5})), 9.0);
}

TEST(Codebook, JsonRoundTrip) {
  Codebook cb;
  cb.centroids = Eigen::MatrixXd::Random(4, 3);
  std::string dir = testing::MakeTempDir("codebook");
  SaveCodebook(cb, dir + "/cb.json");
  Codebook back = LoadCodebook(dir + "/cb.json");
  EXPECT_EQ(back.centroids, cb.centroids);
  EXPECT_THROW(CodebookFromJson("{\"version\":2,\"k\":1,\"dim\":1,\"centroids\":[[0]]}"),
               IoError);
  EXPECT_THROW(CodebookFromJson("{\"version\":1,\"k\":2,\"dim\":1,\"centroids\":[[0]]}"),
               IoError);
  EXPECT_THROW(LoadCodebook(dir + "/missing.json"), IoError);
}

}  // namespace
}  // namespace transduce
