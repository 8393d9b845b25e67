// src/lattice.cc
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

#include "transduce/lattice.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "transduce/errors.h"
#include "transduce/log-math.h"

namespace transduce {

ProbLattice::ProbLattice(int32_t num_text, int32_t num_tokens)
    : U(num_text),
      T(num_tokens),
      log_blank(Eigen::MatrixXd::Constant(num_text, num_tokens + 1, kLogZero)),
      log_emit(Eigen::MatrixXd::Constant(num_text, num_tokens, kLogZero)) {}

void ProbLattice::Validate() const {
  if (U < 1) throw ConfigError("lattice needs U >= 1, got " + std::to_string(U));
  if (T < 0) throw ConfigError("lattice needs T >= 0, got " + std::to_string(T));
  if (log_blank.rows() != U || log_blank.cols() != T + 1) {
    throw ConfigError("log_blank must be U x (T+1)");
  }
  if (log_emit.rows() != U || log_emit.cols() != T) {
    throw ConfigError("log_emit must be U x T");
  }
  if (log_blank.hasNaN() || log_emit.hasNaN()) {
    throw ConfigError("lattice contains NaN");
  }
}

int32_t AlignmentPath::NumEmits() const {
  return static_cast<int32_t>(std::count(steps.begin(), steps.end(), Step::kEmit));
}

int32_t AlignmentPath::NumBlanks() const {
  return static_cast<int32_t>(steps.size()) - NumEmits();
}

AlignmentPath MakeAlignmentPath(std::vector<Step> steps) {
  AlignmentPath path;
  path.nodes.reserve(steps.size());
  LatticeNode node;
  for (Step s : steps) {
    path.nodes.push_back(node);
    if (s == Step::kEmit) {
      ++node.t;
    } else {
      ++node.u;
    }
  }
  path.steps = std::move(steps);
  return path;
}

bool IsValidAlignment(const AlignmentPath &path, int32_t U, int32_t T) {
  if (path.steps.size() != static_cast<size_t>(U + T)) return false;
  if (path.nodes.size() != path.steps.size()) return false;
  if (path.steps.empty() || path.steps.back() != Step::kBlank) return false;
  LatticeNode node;
  for (size_t i = 0; i != path.steps.size(); ++i) {
    if (!(path.nodes[i] == node)) return false;
    bool last = i + 1 == path.steps.size();
    if (path.steps[i] == Step::kEmit) {
      if (node.t >= T) return false;
      ++node.t;
    } else {
      // An interior blank may not leave the last row.
      if (!last && node.u >= U - 1) return false;
      if (last && !(node.u == U - 1 && node.t == T)) return false;
      ++node.u;
    }
  }
  return true;
}

AlphaBeta Forward(const ProbLattice &lat) {
  lat.Validate();
  const int32_t U = lat.U, T = lat.T;
  AlphaBeta ab;
  ab.alpha.resize(U, T + 1);
  auto &alpha = ab.alpha;

  alpha(0, 0) = 0;
  for (int32_t t = 1; t <= T; ++t) {
    alpha(0, t) = alpha(0, t - 1) + lat.log_emit(0, t - 1);
  }
  for (int32_t u = 1; u < U; ++u) {
    alpha(u, 0) = alpha(u - 1, 0) + lat.log_blank(u - 1, 0);
    for (int32_t t = 1; t <= T; ++t) {
      alpha(u, t) = LogAdd(alpha(u - 1, t) + lat.log_blank(u - 1, t),
                           alpha(u, t - 1) + lat.log_emit(u, t - 1));
    }
  }
  ab.log_likelihood = alpha(U - 1, T) + lat.log_blank(U - 1, T);
  return ab;
}

AlphaBeta Backward(const ProbLattice &lat) {
  lat.Validate();
  const int32_t U = lat.U, T = lat.T;
  AlphaBeta ab;
  ab.beta.resize(U, T + 1);
  auto &beta = ab.beta;

  beta(U - 1, T) = lat.log_blank(U - 1, T);
  // Last row: only emits (a blank before t == T would end too early).
  for (int32_t t = T - 1; t >= 0; --t) {
    beta(U - 1, t) = beta(U - 1, t + 1) + lat.log_emit(U - 1, t);
  }
  for (int32_t u = U - 2; u >= 0; --u) {
    beta(u, T) = beta(u + 1, T) + lat.log_blank(u, T);
    for (int32_t t = T - 1; t >= 0; --t) {
      beta(u, t) = LogAdd(beta(u + 1, t) + lat.log_blank(u, t),
                          beta(u, t + 1) + lat.log_emit(u, t));
    }
  }
  ab.log_likelihood = beta(0, 0);
  return ab;
}

AlphaBeta ForwardBackward(const ProbLattice &lat) {
  AlphaBeta ab = Forward(lat);
  ab.beta = Backward(lat).beta;
  return ab;
}

namespace {

void EnumerateFrom(int32_t U, int32_t T, int32_t u, int32_t t,
                   std::vector<Step> *prefix, std::vector<AlignmentPath> *out) {
  if (u == U - 1 && t == T) {
    std::vector<Step> steps = *prefix;
    steps.push_back(Step::kBlank);
    out->push_back(MakeAlignmentPath(std::move(steps)));
    return;
  }
  if (t < T) {
    prefix->push_back(Step::kEmit);
    EnumerateFrom(U, T, u, t + 1, prefix, out);
    prefix->pop_back();
  }
  if (u < U - 1) {
    prefix->push_back(Step::kBlank);
    EnumerateFrom(U, T, u + 1, t, prefix, out);
    prefix->pop_back();
  }
}

}  // namespace

std::vector<AlignmentPath> EnumerateAlignments(int32_t U, int32_t T) {
  if (U < 1 || T < 0) {
    throw ConfigError("enumeration needs U >= 1 and T >= 0");
  }
  if (U + T > kMaxEnumerationSteps) {
    throw ConfigError("enumeration guard: U + T = " + std::to_string(U + T) +
                      " exceeds " + std::to_string(kMaxEnumerationSteps));
  }
  std::vector<AlignmentPath> paths;
  std::vector<Step> prefix;
  prefix.reserve(U + T);
  EnumerateFrom(U, T, 0, 0, &prefix, &paths);
  return paths;
}

double PathLogProb(const ProbLattice &lat, const AlignmentPath &path) {
  if (!IsValidAlignment(path, lat.U, lat.T)) {
    throw ConfigError("path is not a complete alignment for this lattice");
  }
  double score = 0;
  for (size_t i = 0; i != path.steps.size(); ++i) {
    const LatticeNode &n = path.nodes[i];
    score += path.steps[i] == Step::kEmit ? lat.log_emit(n.u, n.t)
                                          : lat.log_blank(n.u, n.t);
  }
  return score;
}

double BruteForceLikelihood(const ProbLattice &lat) {
  lat.Validate();
  std::vector<AlignmentPath> paths = EnumerateAlignments(lat.U, lat.T);
  std::vector<double> scores;
  scores.reserve(paths.size());
  for (const auto &p : paths) scores.push_back(PathLogProb(lat, p));
  return LogSumExp(scores);
}

Occupancy ComputeOccupancy(const ProbLattice &lat, const AlphaBeta &ab) {
  lat.Validate();
  const int32_t U = lat.U, T = lat.T;
  if (ab.alpha.rows() != U || ab.alpha.cols() != T + 1 ||
      ab.beta.rows() != U || ab.beta.cols() != T + 1) {
    throw ConfigError("alpha/beta shapes do not match the lattice");
  }
  Occupancy occ;
  occ.gamma = Eigen::MatrixXd::Zero(U, T + 1);
  occ.blank_arc = Eigen::MatrixXd::Zero(U, T + 1);
  occ.emit_arc = Eigen::MatrixXd::Zero(U, T);
  const double total = ab.log_likelihood;
  if (total == kLogZero) return occ;

  auto posterior = [total](double log_score) {
    return log_score == kLogZero ? 0.0 : std::exp(log_score - total);
  };
  for (int32_t u = 0; u < U; ++u) {
    for (int32_t t = 0; t <= T; ++t) {
      double a = ab.alpha(u, t);
      if (u == U - 1 && t == T) {
        occ.blank_arc(u, t) = posterior(a + lat.log_blank(u, t));
      } else if (u < U - 1) {
        occ.blank_arc(u, t) =
            posterior(a + lat.log_blank(u, t) + ab.beta(u + 1, t));
      }
      if (t < T) {
        occ.emit_arc(u, t) =
            posterior(a + lat.log_emit(u, t) + ab.beta(u, t + 1));
      }
      occ.gamma(u, t) =
          occ.blank_arc(u, t) + (t < T ? occ.emit_arc(u, t) : 0.0);
    }
  }
  return occ;
}

ViterbiResult ViterbiAlignment(const ProbLattice &lat) {
  lat.Validate();
  const int32_t U = lat.U, T = lat.T;
  // best(u, t): best log-prob of completing the alignment from (u, t).
  Eigen::MatrixXd best(U, T + 1);
  best(U - 1, T) = lat.log_blank(U - 1, T);
  for (int32_t t = T - 1; t >= 0; --t) {
    best(U - 1, t) = best(U - 1, t + 1) + lat.log_emit(U - 1, t);
  }
  for (int32_t u = U - 2; u >= 0; --u) {
    best(u, T) = best(u + 1, T) + lat.log_blank(u, T);
    for (int32_t t = T - 1; t >= 0; --t) {
      best(u, t) = std::max(best(u + 1, t) + lat.log_blank(u, t),
                            best(u, t + 1) + lat.log_emit(u, t));
    }
  }

  std::vector<Step> steps;
  steps.reserve(U + T);
  int32_t u = 0, t = 0;
  while (!(u == U - 1 && t == T)) {
    bool can_emit = t < T;
    bool can_blank = u < U - 1;
    bool emit = can_emit;
    if (can_emit && can_blank) {
      // Equal-probability completions summed in different orders can differ
      // in the last bits; treat those as ties.
      double via_emit = best(u, t + 1) + lat.log_emit(u, t);
      double via_blank = best(u + 1, t) + lat.log_blank(u, t);
      double slack = kViterbiTieTolerance * std::max(1.0, std::abs(via_blank));
      emit = via_emit >= via_blank - slack;
    }
    if (emit) {
      steps.push_back(Step::kEmit);
      ++t;
    } else {
      steps.push_back(Step::kBlank);
      ++u;
    }
  }
  steps.push_back(Step::kBlank);

  ViterbiResult result;
  result.path = MakeAlignmentPath(std::move(steps));
  result.log_prob = best(0, 0);
  return result;
}

}  // namespace transduce
