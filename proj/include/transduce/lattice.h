// include/transduce/lattice.h
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

#ifndef TRANSDUCE_LATTICE_H_
#define TRANSDUCE_LATTICE_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"

namespace transduce {

/*
  Log-semiring dynamic programming over the transducer output lattice.

  A node (u, t) means "text symbols x_1..x_u consumed, tokens y_1..y_t
  emitted". Text positions are 1-based in the usual notation and zero-based
  in storage: row r of every table holds u = r + 1. Columns hold t = 0..T
  directly, so y_0 (the start-of-sequence token) is never scored.

  From (u, t) there are two arcs:
    - blank, to (u + 1, t), with log-prob log_blank(u, t);
    - emit y_{t+1}, to (u, t + 1), with log-prob log_emit(u, t), t < T.
  The blank leaving (U, T) terminates the alignment. A blank leaving (U, t)
  with t < T is not an arc.
 */
struct ProbLattice {
  int32_t U = 0;
  int32_t T = 0;
  Eigen::MatrixXd log_blank;  // U x (T + 1)
  Eigen::MatrixXd log_emit;   // U x T

  ProbLattice() = default;
  ProbLattice(int32_t num_text, int32_t num_tokens);

  // Throws ConfigError on U < 1, T < 0, wrong table shapes or NaN entries.
  void Validate() const;
};

struct AlphaBeta {
  Eigen::MatrixXd alpha;  // U x (T + 1); empty if not computed
  Eigen::MatrixXd beta;   // U x (T + 1); empty if not computed
  double log_likelihood = 0;
};

enum class Step : uint8_t { kEmit = 0, kBlank = 1 };

struct LatticeNode {
  int32_t u = 0;  // zero-based row
  int32_t t = 0;
  bool operator==(const LatticeNode &) const = default;
};

// A monotonic alignment from (0, 0) to the terminal blank at (U-1, T).
// nodes[i] is the node that steps[i] leaves.
struct AlignmentPath {
  std::vector<Step> steps;
  std::vector<LatticeNode> nodes;

  int32_t NumEmits() const;
  int32_t NumBlanks() const;
  bool operator==(const AlignmentPath &) const = default;
};

// Builds the node trace for a step sequence starting at (0, 0).
AlignmentPath MakeAlignmentPath(std::vector<Step> steps);

// Checks the path is a complete monotonic alignment for a U x T lattice.
bool IsValidAlignment(const AlignmentPath &path, int32_t U, int32_t T);

// Fills alpha and log_likelihood = alpha(U, T) + log_blank(U, T).
AlphaBeta Forward(const ProbLattice &lat);

// Fills beta and log_likelihood = beta(1, 0).
AlphaBeta Backward(const ProbLattice &lat);

// Both tables; log_likelihood is taken from the forward pass.
AlphaBeta ForwardBackward(const ProbLattice &lat);

inline constexpr int32_t kMaxEnumerationSteps = 24;

// All C(U - 1 + T, T) alignments in lexicographic order with kEmit < kBlank.
// Throws ConfigError when U + T exceeds kMaxEnumerationSteps.
std::vector<AlignmentPath> EnumerateAlignments(int32_t U, int32_t T);

double PathLogProb(const ProbLattice &lat, const AlignmentPath &path);

// log of the sum over EnumerateAlignments() of the path probabilities.
double BruteForceLikelihood(const ProbLattice &lat);

struct Occupancy {
  Eigen::MatrixXd gamma;      // U x (T + 1) node posteriors
  Eigen::MatrixXd blank_arc;  // U x (T + 1) posteriors of the blank arcs
  Eigen::MatrixXd emit_arc;   // U x T posteriors of the emit arcs
};

// Posteriors from a lattice and its alpha/beta tables. When the lattice has
// zero total probability every posterior is zero.
Occupancy ComputeOccupancy(const ProbLattice &lat, const AlphaBeta &ab);

struct ViterbiResult {
  AlignmentPath path;
  double log_prob = 0;
};

inline constexpr double kViterbiTieTolerance = 1e-12;  // relative

// Best alignment. Ties go to kEmit: the walk from (1, 0) emits whenever
// emitting is at least as good as a blank, up to kViterbiTieTolerance.
ViterbiResult ViterbiAlignment(const ProbLattice &lat);

}  // namespace transduce

#endif  // TRANSDUCE_LATTICE_H_
