// src/loss.cc
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

#include "transduce/loss.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "transduce/errors.h"
#include "transduce/log-math.h"

namespace transduce {

namespace {

void CheckTarget(std::span<const int32_t> target, int32_t T,
                 int32_t vocab_size) {
  if (static_cast<int32_t>(target.size()) != T) {
    throw ConfigError("target length " + std::to_string(target.size()) +
                      " does not match lattice T = " + std::to_string(T));
  }
  for (int32_t y : target) {
    if (y < 0 || y >= vocab_size) {
      throw ConfigError("token id " + std::to_string(y) +
                        " out of range for vocab size " +
                        std::to_string(vocab_size));
    }
  }
}

}  // namespace

LogitsLattice::LogitsLattice(int32_t num_text, int32_t num_tokens,
                             int32_t vocab)
    : U(num_text), T(num_tokens), vocab_size(vocab) {
  if (num_text < 1 || num_tokens < 0 || vocab < 1) {
    throw ConfigError("logits lattice needs U >= 1, T >= 0, |V| >= 1");
  }
  data.assign(static_cast<size_t>(U) * (T + 1) * (vocab_size + 1), 0.0);
}

ProbLattice ToProbLattice(const LogitsLattice &logits,
                          std::span<const int32_t> target) {
  CheckTarget(target, logits.T, logits.vocab_size);
  ProbLattice lat(logits.U, logits.T);
  std::vector<double> log_probs(logits.NumSymbols());
  for (int32_t u = 0; u < logits.U; ++u) {
    for (int32_t t = 0; t <= logits.T; ++t) {
      LogSoftmax(logits.Node(u, t), log_probs);
      lat.log_blank(u, t) = log_probs[logits.BlankId()];
      if (t < logits.T) lat.log_emit(u, t) = log_probs[target[t]];
    }
  }
  return lat;
}

LossResult TransducerLoss(const LogitsLattice &logits,
                          std::span<const int32_t> target) {
  ProbLattice lat = ToProbLattice(logits, target);
  AlphaBeta ab = ForwardBackward(lat);
  Occupancy occ = ComputeOccupancy(lat, ab);

  LossResult result;
  result.loss = -ab.log_likelihood;
  result.grad_logits.assign(logits.data.size(), 0.0);
  result.gamma = occ.gamma;
  if (ab.log_likelihood == kLogZero) return result;

  const int32_t V1 = logits.NumSymbols();
  std::vector<double> probs(V1);
  for (int32_t u = 0; u < logits.U; ++u) {
    for (int32_t t = 0; t <= logits.T; ++t) {
      Softmax(logits.Node(u, t), probs);
      double *g = result.grad_logits.data() +
                  (static_cast<size_t>(u) * (logits.T + 1) + t) * V1;
      double gamma = occ.gamma(u, t);
      for (int32_t v = 0; v < V1; ++v) g[v] = gamma * probs[v];
      g[logits.BlankId()] -= occ.blank_arc(u, t);
      if (t < logits.T) g[target[t]] -= occ.emit_arc(u, t);
    }
  }
  return result;
}

LogitsLattice SimpleJoinerLogits(const Eigen::MatrixXd &enc_proj,
                                 const Eigen::MatrixXd &dec_proj) {
  if (enc_proj.cols() != dec_proj.cols() || enc_proj.cols() < 2) {
    throw ConfigError("simple joiner: projections must share V+1 >= 2 columns");
  }
  if (enc_proj.rows() < 1 || dec_proj.rows() < 1) {
    throw ConfigError("simple joiner: need U >= 1 and T + 1 >= 1 rows");
  }
  const int32_t U = static_cast<int32_t>(enc_proj.rows());
  const int32_t T = static_cast<int32_t>(dec_proj.rows()) - 1;
  const int32_t V1 = static_cast<int32_t>(enc_proj.cols());
  LogitsLattice out(U, T, V1 - 1);
  for (int32_t u = 0; u < U; ++u) {
    for (int32_t t = 0; t <= T; ++t) {
      auto node = out.Node(u, t);
      for (int32_t v = 0; v < V1; ++v) node[v] = enc_proj(u, v) + dec_proj(t, v);
    }
  }
  return out;
}

void ValidatePruneBounds(const PruneBounds &bounds, int32_t U, int32_t T) {
  if (bounds.S < 1) throw ConfigError("prune range S must be >= 1");
  if (static_cast<int32_t>(bounds.start.size()) != U) {
    throw ConfigError("prune bounds must have one start per text position");
  }
  const int32_t max_start = std::max(0, T + 1 - bounds.S);
  for (int32_t u = 0; u < U; ++u) {
    int32_t s = bounds.start[u];
    if (s < 0 || s > max_start) {
      throw ConfigError("prune start " + std::to_string(s) + " at u=" +
                        std::to_string(u + 1) + " outside [0, " +
                        std::to_string(max_start) + "]");
    }
    if (u > 0) {
      int32_t step = s - bounds.start[u - 1];
      if (step < 0) throw ConfigError("prune starts must be non-decreasing");
      if (step > bounds.S) {
        throw ConfigError("prune starts may advance by at most S per position");
      }
    }
  }
}

PruneBounds ComputePruneBounds(const Eigen::MatrixXd &gamma, int32_t S) {
  if (S < 1) throw ConfigError("prune range S must be >= 1");
  if (gamma.rows() < 1 || gamma.cols() < 1) {
    throw ConfigError("occupancy table must be U x (T+1) with U >= 1");
  }
  const int32_t U = static_cast<int32_t>(gamma.rows());
  const int32_t T = static_cast<int32_t>(gamma.cols()) - 1;
  PruneBounds bounds{S, std::vector<int32_t>(U, 0)};
  if (S >= T + 1) return bounds;

  const int32_t num_starts = T + 2 - S;
  for (int32_t u = 0; u < U; ++u) {
    double window = gamma.row(u).segment(0, S).sum();
    double best = window;
    int32_t best_start = 0;
    for (int32_t s = 1; s < num_starts; ++s) {
      window += gamma(u, s + S - 1) - gamma(u, s - 1);
      if (window > best) {
        best = window;
        best_start = s;
      }
    }
    bounds.start[u] = best_start;
  }
  for (int32_t u = 1; u < U; ++u) {
    bounds.start[u] = std::max(bounds.start[u], bounds.start[u - 1]);
  }
  for (int32_t u = U - 2; u >= 0; --u) {
    bounds.start[u] = std::max(bounds.start[u], bounds.start[u + 1] - S);
  }
  return bounds;
}

PruneBounds AnchorPruneBounds(PruneBounds bounds, int32_t T) {
  const int32_t U = static_cast<int32_t>(bounds.start.size());
  if (U == 0) throw ConfigError("prune bounds are empty");
  const int32_t S = bounds.S;
  if (S >= T + 1) {
    std::fill(bounds.start.begin(), bounds.start.end(), 0);
    return bounds;
  }
  // Row u can only be reached with start[u] <= u (S - 1) and can only reach
  // the last window with start[u] >= last - (U - 1 - u) (S - 1).
  const int32_t last = T + 1 - S;
  for (int32_t u = 0; u < U; ++u) {
    int32_t lo = std::max(0, last - (U - 1 - u) * (S - 1));
    int32_t hi = std::min(last, u * (S - 1));
    bounds.start[u] = lo <= hi ? std::clamp(bounds.start[u], lo, hi) : hi;
  }
  for (int32_t u = 1; u < U; ++u) {
    bounds.start[u] = std::max(bounds.start[u], bounds.start[u - 1]);
  }
  for (int32_t u = U - 2; u >= 0; --u) {
    bounds.start[u] = std::max(bounds.start[u], bounds.start[u + 1] - (S - 1));
  }
  return bounds;
}

PruneBounds WidenPruneBounds(const PruneBounds &bounds, int32_t T,
                             int32_t new_S) {
  if (new_S < bounds.S) {
    throw ConfigError("widening needs new_S >= S");
  }
  PruneBounds out{new_S, bounds.start};
  const int32_t max_start = std::max(0, T + 1 - new_S);
  for (auto &s : out.start) s = std::min(s, max_start);
  return out;
}

PrunedLogits::PrunedLogits(int32_t num_text, int32_t num_tokens,
                           int32_t vocab, PruneBounds b)
    : U(num_text), T(num_tokens), vocab_size(vocab), bounds(std::move(b)) {
  if (num_text < 1 || num_tokens < 0 || vocab < 1) {
    throw ConfigError("pruned lattice needs U >= 1, T >= 0, |V| >= 1");
  }
  ValidatePruneBounds(bounds, U, T);
  data.assign(static_cast<size_t>(U) * Width() * NumSymbols(), 0.0);
}

PrunedLogits RestrictToBounds(const LogitsLattice &logits,
                              const PruneBounds &bounds) {
  PrunedLogits out(logits.U, logits.T, logits.vocab_size, bounds);
  for (int32_t u = 0; u < out.U; ++u) {
    for (int32_t j = 0; j < out.Width(); ++j) {
      auto src = logits.Node(u, out.TokenIndex(u, j));
      std::copy(src.begin(), src.end(), out.Node(u, j).begin());
    }
  }
  return out;
}

LossResult PrunedTransducerLoss(const PrunedLogits &logits,
                                std::span<const int32_t> target) {
  CheckTarget(target, logits.T, logits.vocab_size);
  ValidatePruneBounds(logits.bounds, logits.U, logits.T);
  const int32_t U = logits.U, T = logits.T, W = logits.Width();
  const int32_t V1 = logits.NumSymbols();
  const auto &start = logits.bounds.start;

  // Column of t in row u's window, or -1 when t is outside it.
  auto column = [&](int32_t u, int32_t t) {
    int32_t j = t - start[u];
    return (j >= 0 && j < W) ? j : -1;
  };

  Eigen::MatrixXd log_blank(U, W), log_emit(U, W);
  std::vector<double> log_probs(V1);
  for (int32_t u = 0; u < U; ++u) {
    for (int32_t j = 0; j < W; ++j) {
      int32_t t = start[u] + j;
      LogSoftmax(logits.Node(u, j), log_probs);
      log_blank(u, j) = log_probs[logits.BlankId()];
      // The emit arc must land inside the same window.
      log_emit(u, j) = (t < T && j + 1 < W) ? log_probs[target[t]] : kLogZero;
    }
  }

  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(U, W, kLogZero);
  for (int32_t u = 0; u < U; ++u) {
    for (int32_t j = 0; j < W; ++j) {
      int32_t t = start[u] + j;
      double a = (u == 0 && t == 0) ? 0.0 : kLogZero;
      if (j > 0) a = LogAdd(a, alpha(u, j - 1) + log_emit(u, j - 1));
      if (u > 0) {
        int32_t jp = column(u - 1, t);
        if (jp >= 0) a = LogAdd(a, alpha(u - 1, jp) + log_blank(u - 1, jp));
      }
      alpha(u, j) = a;
    }
  }

  // Blank out of row U-1 is only allowed at t == T (the terminal arc).
  const int32_t j_end = column(U - 1, T);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(U, W, kLogZero);
  for (int32_t u = U - 1; u >= 0; --u) {
    for (int32_t j = W - 1; j >= 0; --j) {
      int32_t t = start[u] + j;
      double b = kLogZero;
      if (u == U - 1) {
        if (j == j_end) b = log_blank(u, j);
      } else {
        int32_t jn = column(u + 1, t);
        if (jn >= 0) b = log_blank(u, j) + beta(u + 1, jn);
      }
      if (j + 1 < W) b = LogAdd(b, log_emit(u, j) + beta(u, j + 1));
      beta(u, j) = b;
    }
  }

  const double log_likelihood =
      j_end >= 0 ? alpha(U - 1, j_end) + log_blank(U - 1, j_end) : kLogZero;

  LossResult result;
  result.loss = -log_likelihood;
  result.grad_logits.assign(logits.data.size(), 0.0);
  result.gamma = Eigen::MatrixXd::Zero(U, W);
  if (log_likelihood == kLogZero) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }

  auto posterior = [log_likelihood](double s) {
    return s == kLogZero ? 0.0 : std::exp(s - log_likelihood);
  };
  std::vector<double> probs(V1);
  for (int32_t u = 0; u < U; ++u) {
    for (int32_t j = 0; j < W; ++j) {
      int32_t t = start[u] + j;
      double blank_post = 0;
      if (u == U - 1) {
        if (j == j_end) blank_post = posterior(alpha(u, j) + log_blank(u, j));
      } else {
        int32_t jn = column(u + 1, t);
        if (jn >= 0) {
          blank_post =
              posterior(alpha(u, j) + log_blank(u, j) + beta(u + 1, jn));
        }
      }
      double emit_post = 0;
      if (j + 1 < W) {
        emit_post = posterior(alpha(u, j) + log_emit(u, j) + beta(u, j + 1));
      }
      double gamma = blank_post + emit_post;
      result.gamma(u, j) = gamma;

      Softmax(logits.Node(u, j), probs);
      double *g =
          result.grad_logits.data() + (static_cast<size_t>(u) * W + j) * V1;
      for (int32_t v = 0; v < V1; ++v) g[v] = gamma * probs[v];
      g[logits.BlankId()] -= blank_post;
      if (emit_post > 0) g[target[t]] -= emit_post;
    }
  }
  return result;
}

CombinedObjective CombineObjectives(LossResult simple, LossResult pruned,
                                    double alpha1, double alpha2) {
  if (!(alpha1 >= 0) || !(alpha2 >= 0)) {
    throw ConfigError("loss scale factors must be non-negative");
  }
  auto scale = [](LossResult *r, double alpha) {
    if (alpha == 0) {
      r->loss = 0;
      std::fill(r->grad_logits.begin(), r->grad_logits.end(), 0.0);
      return;
    }
    r->loss *= alpha;
    for (double &g : r->grad_logits) g *= alpha;
  };
  scale(&simple, alpha1);
  scale(&pruned, alpha2);
  CombinedObjective out;
  out.value = simple.loss + pruned.loss;
  out.simple = std::move(simple);
  out.pruned = std::move(pruned);
  return out;
}

}  // namespace transduce
