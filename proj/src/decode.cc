// src/decode.cc
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

#include "transduce/decode.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "transduce/errors.h"
#include "transduce/log-math.h"

namespace transduce {

void DecodeConfig::Validate(int32_t num_symbols) const {
  if (mode == DecodeMode::kTopK && (k < 1 || k > num_symbols)) {
    throw ConfigError("top-k needs 1 <= k <= |V|+1 = " +
                      std::to_string(num_symbols));
  }
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  if (max_symbols_per_position < 1) {
    throw ConfigError("max_symbols_per_position must be >= 1");
  }
}

DecodeMode ParseDecodeMode(const std::string &name) {
  if (name == "greedy") return DecodeMode::kGreedy;
  if (name == "topk") return DecodeMode::kTopK;
  throw ConfigError("unknown decode mode '" + name + "'");
}

std::string DecodeModeName(DecodeMode mode) {
  return mode == DecodeMode::kGreedy ? "greedy" : "topk";
}

ModelScorer::ModelScorer(const ModelParams &params,
                         std::span<const int32_t> text,
                         const Eigen::MatrixXd &ref_frames)
    : params_(params),
      h_enc_(EncodeText(params, text)),
      ref_(EncodeReference(params, ref_frames)) {
  Reset();
}

int32_t ModelScorer::NumPositions() const {
  return static_cast<int32_t>(h_enc_.cols());
}

int32_t ModelScorer::VocabSize() const { return params_.dims.vocab; }

void ModelScorer::Reset() {
  DecoderState init = InitialDecoderState(params_.dims);
  std::tie(h_dec_, state_) = DecodeStep(params_, params_.dims.SosId(), init);
}

Eigen::VectorXd ModelScorer::Logits(int32_t u) {
  return Joiner(params_, h_enc_.col(u), h_dec_, ref_);
}

void ModelScorer::Emit(int32_t token) {
  std::tie(h_dec_, state_) = DecodeStep(params_, token, state_);
}

namespace {

template <typename Choose>
DecodeOutput RunDecode(StepScorer &scorer, const DecodeConfig &cfg,
                       Choose &&choose) {
  const int32_t U = scorer.NumPositions();
  const int32_t blank = scorer.VocabSize();
  if (U < 1) throw ConfigError("decoding needs at least one text position");
  cfg.Validate(blank + 1);

  scorer.Reset();
  DecodeOutput out;
  std::vector<Step> steps;
  std::vector<double> log_probs(blank + 1);
  int32_t u = 0;
  int32_t emitted_here = 0;
  while (u < U) {
    Eigen::VectorXd logits = scorer.Logits(u);
    if (logits.size() != blank + 1) {
      throw ConfigError("scorer returned the wrong number of logits");
    }
    LogSoftmax(std::span<const double>(logits.data(), logits.size()), log_probs);
    int32_t symbol = emitted_here >= cfg.max_symbols_per_position
                         ? blank
                         : choose(logits);
    out.symbols.push_back(symbol);
    out.log_probs.push_back(log_probs[symbol]);
    if (symbol == blank) {
      steps.push_back(Step::kBlank);
      ++u;
      emitted_here = 0;
    } else {
      steps.push_back(Step::kEmit);
      out.tokens.push_back(symbol);
      scorer.Emit(symbol);
      ++emitted_here;
    }
  }
  out.alignment = MakeAlignmentPath(std::move(steps));
  return out;
}

int32_t ArgMax(const Eigen::VectorXd &logits) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return static_cast<int32_t>(best);
}

}  // namespace

DecodeOutput GreedyDecode(StepScorer &scorer, const DecodeConfig &cfg) {
  return RunDecode(scorer, cfg, ArgMax);
}

DecodeOutput TopKSampleDecode(StepScorer &scorer, const DecodeConfig &config) {
  DecodeConfig cfg = config;
  cfg.mode = DecodeMode::kTopK;  // so that k is validated
  std::mt19937_64 rng(cfg.seed);
  std::vector<int32_t> order;
  std::vector<double> weights;
  auto sample = [&](const Eigen::VectorXd &logits) {
    order.resize(logits.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
      return logits[a] > logits[b];
    });
    const int32_t k = cfg.k;
    const double top = logits[order[0]];
    weights.resize(k);
    double total = 0;
    for (int32_t i = 0; i < k; ++i) {
      weights[i] = std::exp((logits[order[i]] - top) / cfg.temperature);
      total += weights[i];
    }
    double r = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    for (int32_t i = 0; i < k; ++i) {
      r -= weights[i];
      if (r < 0) return order[i];
    }
    return order[k - 1];
  };
  return RunDecode(scorer, cfg, sample);
}

DecodeOutput Decode(StepScorer &scorer, const DecodeConfig &cfg) {
  return cfg.mode == DecodeMode::kGreedy ? GreedyDecode(scorer, cfg)
                                         : TopKSampleDecode(scorer, cfg);
}

DecodeOutput GreedyDecode(const ModelParams &params,
                          std::span<const int32_t> text,
                          const Eigen::MatrixXd &ref_frames,
                          const DecodeConfig &cfg) {
  ModelScorer scorer(params, text, ref_frames);
  return GreedyDecode(scorer, cfg);
}

DecodeOutput TopKSampleDecode(const ModelParams &params,
                              std::span<const int32_t> text,
                              const Eigen::MatrixXd &ref_frames,
                              const DecodeConfig &cfg) {
  ModelScorer scorer(params, text, ref_frames);
  return TopKSampleDecode(scorer, cfg);
}

bool IsConsistent(const DecodeOutput &out, int32_t num_positions,
                  int32_t blank_id) {
  std::vector<int32_t> kept;
  for (int32_t s : out.symbols) {
    if (s != blank_id) kept.push_back(s);
  }
  if (kept != out.tokens) return false;
  if (out.symbols.size() != out.alignment.steps.size()) return false;
  for (size_t i = 0; i != out.symbols.size(); ++i) {
    bool is_blank = out.symbols[i] == blank_id;
    if (is_blank != (out.alignment.steps[i] == Step::kBlank)) return false;
  }
  return IsValidAlignment(out.alignment, num_positions,
                          static_cast<int32_t>(out.tokens.size()));
}

}  // namespace transduce
