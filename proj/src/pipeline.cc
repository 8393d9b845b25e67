// src/pipeline.cc
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

#include "transduce/pipeline.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "json-util.h"
#include "nlohmann/json.hpp"
#include "transduce/errors.h"
#include "transduce/loss.h"
#include "transduce/metrics.h"

namespace transduce {

using nlohmann::json;

UtteranceObjective EvaluateUtterance(const ModelParams &params,
                                     std::span<const int32_t> text,
                                     std::span<const int32_t> tokens,
                                     const Eigen::MatrixXd &ref_frames,
                                     const LossOptions &loss,
                                     double grad_scale, ModelParams *grads) {
  TransducerGraph graph(params, text, tokens, ref_frames);
  const int32_t T = graph.T();

  LossResult simple = TransducerLoss(graph.SimpleLogits(), tokens);
  UtteranceObjective obj;
  obj.simple_loss = simple.loss;

  LossResult main;
  if (loss.prune_range < T + 1) {
    PruneBounds bounds = AnchorPruneBounds(
        ComputePruneBounds(simple.gamma, loss.prune_range), T);
    main = PrunedTransducerLoss(graph.PrunedJoinerLogits(bounds), tokens);
    obj.pruned = true;
  } else {
    main = TransducerLoss(graph.FullLogits(), tokens);
  }
  obj.main_loss = main.loss;

  CombinedObjective combined = CombineObjectives(
      std::move(simple), std::move(main), loss.alpha1, loss.alpha2);
  obj.value = combined.value;
  if (grads != nullptr && std::isfinite(obj.value)) {
    for (double &g : combined.simple.grad_logits) g *= grad_scale;
    for (double &g : combined.pruned.grad_logits) g *= grad_scale;
    graph.Backward(loss.alpha1 != 0 ? std::span<const double>(combined.simple.grad_logits)
                                    : std::span<const double>(),
                   loss.alpha2 != 0 ? std::span<const double>(combined.pruned.grad_logits)
                                    : std::span<const double>(),
                   grads);
  }
  return obj;
}

std::string EpochLogToJson(const EpochLog &log) {
  json j;
  j["version"] = 1;
  j["epoch"] = log.epoch;
  j["step"] = log.step;
  j["loss_per_token"] = log.loss_per_token;
  j["simple_loss_per_token"] = log.simple_loss_per_token;
  j["main_loss_per_token"] = log.main_loss_per_token;
  j["pruned_fraction"] = log.pruned_fraction;
  return j.dump();
}

CorpusConfig HeldOutCorpusConfig(const RunConfig &cfg) {
  CorpusConfig c = cfg.corpus;
  c.num_utts = cfg.eval_utts;
  c.seed = cfg.corpus.seed + 1;
  return c;
}

TrainResult RunTrain(const RunConfig &cfg, const std::vector<Utterance> &corpus,
                     const TrainOutputs &outputs) {
  cfg.Validate();
  if (corpus.empty()) throw ConfigError("training corpus is empty");
  for (const auto &utt : corpus) {
    if (utt.tokens.empty()) throw ConfigError("training utterance without tokens");
  }

  TrainResult result;
  result.params = InitParams(cfg.model, cfg.seed);
  AdamState adam = InitAdam(result.params);
  std::mt19937_64 rng(cfg.seed ^ 0x5deece66dULL);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::string log_text;

  for (int32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0, total_simple = 0, total_main = 0;
    int64_t total_tokens = 0, num_pruned = 0;

    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      size_t end = std::min(order.size(), begin + cfg.batch_size);
      int64_t batch_tokens = 0;
      for (size_t i = begin; i < end; ++i) batch_tokens += corpus[order[i]].tokens.size();

      ModelParams grads = ZerosLike(result.params);
      for (size_t i = begin; i < end; ++i) {
        const Utterance &utt = corpus[order[i]];
        UtteranceObjective obj = EvaluateUtterance(
            result.params, utt.text, utt.tokens, utt.ref_frames, cfg.loss,
            1.0 / static_cast<double>(batch_tokens), &grads);
        if (!std::isfinite(obj.value)) {
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                ", utterance " + std::to_string(order[i]));
        }
        total += obj.value;
        total_simple += obj.simple_loss;
        total_main += obj.main_loss;
        num_pruned += obj.pruned ? 1 : 0;
      }
      total_tokens += batch_tokens;
      AdamStep(grads, cfg.adam, &adam, &result.params);
      if (!AllFinite(result.params)) {
        throw DivergenceError("non-finite parameters at epoch " + std::to_string(epoch));
      }
    }

    EpochLog log;
    log.epoch = epoch;
    log.step = adam.step;
    log.loss_per_token = total / total_tokens;
    log.simple_loss_per_token = total_simple / total_tokens;
    log.main_loss_per_token = total_main / total_tokens;
    log.pruned_fraction = static_cast<double>(num_pruned) / corpus.size();
    result.log.push_back(log);

    if (!outputs.log_path.empty()) {
      log_text += EpochLogToJson(log) + "\n";
      WriteFile(outputs.log_path, log_text);
    }
    if (!outputs.checkpoint_path.empty()) {
      SaveCheckpoint(result.params, adam.step, outputs.checkpoint_path);
    }
  }
  result.step = adam.step;
  if (cfg.epochs == 0 && !outputs.checkpoint_path.empty()) {
    SaveCheckpoint(result.params, 0, outputs.checkpoint_path);
  }
  return result;
}

EvalReport RecomputeAggregates(EvalReport report) {
  int64_t edits = 0, ref_len = 0;
  for (const auto &r : report.records) {
    edits += r.edits;
    ref_len += r.ref_len;
  }
  report.token_error_rate =
      ref_len > 0 ? static_cast<double>(edits) / ref_len : 0.0;

  std::vector<std::pair<double, double>> pairs;
  std::map<int32_t, std::pair<double, int64_t>> by_rate;
  for (const auto &r : report.rate_records) {
    pairs.emplace_back(r.rate, r.realized_rate);
    auto &slot = by_rate[r.rate];
    slot.first += r.emitted;
    slot.second += 1;
  }
  report.rate_correlation.reset();
  try {
    report.rate_correlation = PearsonCorrelation(pairs);
  } catch (const ConfigError &) {
    // Undefined (too few pairs or a constant series); left unset.
  }
  report.mean_length_by_rate.clear();
  for (const auto &[rate, acc] : by_rate) {
    report.mean_length_by_rate.emplace_back(rate, acc.first / acc.second);
  }
  return report;
}

EvalReport RunEval(const ModelParams &params, const std::vector<Utterance> &corpus,
                   const DecodeConfig &decode, const std::vector<int32_t> &rates,
                   double ref_noise_std, uint64_t seed) {
  EvalReport report;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Utterance &utt = corpus[i];
    if (utt.tokens.empty()) throw ConfigError("eval utterance without tokens");
    ModelScorer scorer(params, utt.text, utt.ref_frames);
    DecodeOutput out = Decode(scorer, decode);
    EvalRecord rec;
    rec.index = static_cast<int32_t>(i);
    rec.edits = EditDistance(out.tokens, utt.tokens);
    rec.ref_len = static_cast<int32_t>(utt.tokens.size());
    rec.hyp = std::move(out.tokens);
    report.records.push_back(std::move(rec));
  }

  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Utterance &utt = corpus[i];
    const int32_t U = static_cast<int32_t>(utt.text.size());
    for (int32_t rate : rates) {
      Eigen::MatrixXd ref = RenderReferenceFrames(
          rate, 2 * U * rate, params.dims.ref_input_dim, ref_noise_std, rng);
      ModelScorer scorer(params, utt.text, ref);
      DecodeOutput out = Decode(scorer, decode);
      RateRecord rec;
      rec.index = static_cast<int32_t>(i);
      rec.rate = rate;
      rec.text_len = U;
      rec.emitted = static_cast<int32_t>(out.tokens.size());
      rec.realized_rate = static_cast<double>(rec.emitted) / U;
      report.rate_records.push_back(rec);
    }
  }
  return RecomputeAggregates(std::move(report));
}

std::string EvalReportToJson(const EvalReport &report) {
  json j;
  j["version"] = 1;
  j["token_error_rate"] = report.token_error_rate;
  j["rate_correlation"] = report.rate_correlation
                              ? json(*report.rate_correlation)
                              : json(nullptr);
  json by_rate = json::array();
  for (const auto &[rate, mean] : report.mean_length_by_rate) {
    by_rate.push_back({{"rate", rate}, {"mean_emitted", mean}});
  }
  j["mean_length_by_rate"] = std::move(by_rate);
  json records = json::array();
  for (const auto &r : report.records) {
    records.push_back({{"index", r.index},
                       {"hyp", r.hyp},
                       {"edits", r.edits},
                       {"ref_len", r.ref_len}});
  }
  j["records"] = std::move(records);
  json rate_records = json::array();
  for (const auto &r : report.rate_records) {
    rate_records.push_back({{"index", r.index},
                            {"rate", r.rate},
                            {"text_len", r.text_len},
                            {"emitted", r.emitted},
                            {"realized_rate", r.realized_rate}});
  }
  j["rate_records"] = std::move(rate_records);
  return j.dump();
}

}  // namespace transduce
