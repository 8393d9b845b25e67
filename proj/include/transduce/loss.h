// include/transduce/loss.h
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

#ifndef TRANSDUCE_LOSS_H_
#define TRANSDUCE_LOSS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "transduce/lattice.h"

namespace transduce {

// Unnormalized scores for every node (u, t) and symbol v in V plus blank.
// The blank symbol is the last slot, id == vocab_size. Layout is
// [u][t][v], u zero-based.
struct LogitsLattice {
  int32_t U = 0;
  int32_t T = 0;
  int32_t vocab_size = 0;
  std::vector<double> data;

  LogitsLattice() = default;
  LogitsLattice(int32_t num_text, int32_t num_tokens, int32_t vocab);

  int32_t NumSymbols() const { return vocab_size + 1; }
  int32_t BlankId() const { return vocab_size; }

  std::span<double> Node(int32_t u, int32_t t) {
    return {data.data() + Offset(u, t), static_cast<size_t>(NumSymbols())};
  }
  std::span<const double> Node(int32_t u, int32_t t) const {
    return {data.data() + Offset(u, t), static_cast<size_t>(NumSymbols())};
  }

 private:
  size_t Offset(int32_t u, int32_t t) const {
    return (static_cast<size_t>(u) * (T + 1) + t) * NumSymbols();
  }
};

struct LossResult {
  // -log P(Y|X) in nats. +inf when no alignment has non-zero probability.
  double loss = 0;
  // d loss / d logits, laid out like the scored logits.
  std::vector<double> grad_logits;
  // Node posteriors of the scored nodes (U x (T+1), or U x width if pruned).
  Eigen::MatrixXd gamma;
};

// Per-node log-softmax, keeping only blank and the target's next token.
ProbLattice ToProbLattice(const LogitsLattice &logits,
                          std::span<const int32_t> target);

// Exact transducer loss with gradients w.r.t. every logit:
//   d loss / d logit(u,t,v) = gamma(u,t) * softmax(u,t)_v - xi(u,t,v).
LossResult TransducerLoss(const LogitsLattice &logits,
                          std::span<const int32_t> target);

// Additive joiner: logits[u][t][v] = enc_proj(u, v) + dec_proj(t, v).
// enc_proj is U x (V+1), dec_proj is (T+1) x (V+1).
LogitsLattice SimpleJoinerLogits(const Eigen::MatrixXd &enc_proj,
                                 const Eigen::MatrixXd &dec_proj);

// For each text position u, the scored window is t in [start[u], start[u]+S).
struct PruneBounds {
  int32_t S = 1;
  std::vector<int32_t> start;

  // Number of columns actually scored for a target of length T.
  int32_t Width(int32_t T) const { return S < T + 1 ? S : T + 1; }
};

// Throws ConfigError unless 0 <= start[u] <= max(0, T+1-S), start is
// non-decreasing and start[u+1] - start[u] <= S.
void ValidatePruneBounds(const PruneBounds &bounds, int32_t U, int32_t T);

// Window starts from node posteriors gamma (U x (T+1)): for each row the
// first start maximizing the window sum, then a forward pass forcing
// start[u] >= start[u-1] and a backward pass forcing
// start[u+1] - start[u] <= S.
PruneBounds ComputePruneBounds(const Eigen::MatrixXd &gamma, int32_t S);

// Tightens bounds so that at least one alignment survives whenever one can:
// the first window holds (1, 0), the last holds (U, T), and consecutive
// windows overlap (start[u+1] - start[u] <= S - 1). A lattice with
// T > U * (S - 1) has no surviving path regardless.
PruneBounds AnchorPruneBounds(PruneBounds bounds, int32_t T);

// Grows the windows to width new_S >= S so that every old window is
// contained in the new one.
PruneBounds WidenPruneBounds(const PruneBounds &bounds, int32_t T,
                             int32_t new_S);

// Logits for in-window nodes only: U x width x (V+1) where width =
// bounds.Width(T). Column j of row u is t = start[u] + j.
struct PrunedLogits {
  int32_t U = 0;
  int32_t T = 0;
  int32_t vocab_size = 0;
  PruneBounds bounds;
  std::vector<double> data;

  PrunedLogits() = default;
  PrunedLogits(int32_t num_text, int32_t num_tokens, int32_t vocab,
               PruneBounds b);

  int32_t NumSymbols() const { return vocab_size + 1; }
  int32_t BlankId() const { return vocab_size; }
  int32_t Width() const { return bounds.Width(T); }
  int32_t TokenIndex(int32_t u, int32_t j) const {
    return bounds.start[u] + j;
  }

  std::span<double> Node(int32_t u, int32_t j) {
    return {data.data() + Offset(u, j), static_cast<size_t>(NumSymbols())};
  }
  std::span<const double> Node(int32_t u, int32_t j) const {
    return {data.data() + Offset(u, j), static_cast<size_t>(NumSymbols())};
  }

 private:
  size_t Offset(int32_t u, int32_t j) const {
    return (static_cast<size_t>(u) * Width() + j) * NumSymbols();
  }
};

// Copies the in-window part of a full lattice.
PrunedLogits RestrictToBounds(const LogitsLattice &logits,
                              const PruneBounds &bounds);

// Transducer loss over alignments that stay inside the windows. Arcs leaving
// a window score -inf. Storage is U * width * (V+1).
LossResult PrunedTransducerLoss(const PrunedLogits &logits,
                                std::span<const int32_t> target);

struct CombinedObjective {
  double value = 0;
  LossResult simple;  // gradients scaled by alpha1
  LossResult pruned;  // gradients scaled by alpha2
};

// value = alpha1 * simple.loss + alpha2 * pruned.loss. A term whose scale is
// zero contributes exactly zero (even if its loss is infinite).
CombinedObjective CombineObjectives(LossResult simple, LossResult pruned,
                                    double alpha1, double alpha2);

}  // namespace transduce

#endif  // TRANSDUCE_LOSS_H_
