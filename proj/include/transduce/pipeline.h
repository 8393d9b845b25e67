// include/transduce/pipeline.h
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

#ifndef TRANSDUCE_PIPELINE_H_
#define TRANSDUCE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "Eigen/Core"
#include "transduce/config.h"
#include "transduce/corpus.h"
#include "transduce/decode.h"
#include "transduce/model.h"

namespace transduce {

struct UtteranceObjective {
  double value = 0;        // alpha1 * simple + alpha2 * main, in nats
  double simple_loss = 0;  // unscaled
  double main_loss = 0;    // unscaled; pruned when `pruned` is set
  bool pruned = false;
};

// Objective of one utterance: the simple-joiner loss chooses pruning windows,
// the main joiner is scored inside them (or everywhere when S >= T + 1).
// When `grads` is non-null, adds grad_scale * d value / d params into it.
UtteranceObjective EvaluateUtterance(const ModelParams &params,
                                     std::span<const int32_t> text,
                                     std::span<const int32_t> tokens,
                                     const Eigen::MatrixXd &ref_frames,
                                     const LossOptions &loss,
                                     double grad_scale, ModelParams *grads);

struct EpochLog {
  int32_t epoch = 0;
  int64_t step = 0;
  double loss_per_token = 0;         // objective / emitted tokens
  double simple_loss_per_token = 0;
  double main_loss_per_token = 0;
  double pruned_fraction = 0;        // share of utterances scored pruned
};

struct TrainResult {
  ModelParams params;
  int64_t step = 0;
  std::vector<EpochLog> log;
};

struct TrainOutputs {
  std::string checkpoint_path;  // rewritten after every epoch when set
  std::string log_path;         // JSONL, one line per epoch, when set
};

// Minibatch Adam on the per-token objective. Utterances are shuffled each
// epoch by a generator seeded from cfg.seed; the run is single threaded and
// deterministic. Throws DivergenceError on a non-finite loss.
TrainResult RunTrain(const RunConfig &cfg, const std::vector<Utterance> &corpus,
                     const TrainOutputs &outputs = {});

std::string EpochLogToJson(const EpochLog &log);

// The held-out set: the training generator with eval_utts utterances and
// the next corpus seed.
CorpusConfig HeldOutCorpusConfig(const RunConfig &cfg);

struct EvalRecord {
  int32_t index = 0;
  std::vector<int32_t> hyp;
  int32_t edits = 0;
  int32_t ref_len = 0;
};

struct RateRecord {
  int32_t index = 0;
  int32_t rate = 0;       // conditioned rate
  int32_t text_len = 0;
  int32_t emitted = 0;
  double realized_rate = 0;  // emitted tokens per text symbol
};

struct EvalReport {
  double token_error_rate = 0;            // sum(edits) / sum(ref_len)
  std::optional<double> rate_correlation; // unset when undefined
  std::vector<std::pair<int32_t, double>> mean_length_by_rate;
  std::vector<EvalRecord> records;
  std::vector<RateRecord> rate_records;
};

// Decodes every utterance with its own reference for the error rate, then
// decodes every text once per rate in `rates` with a freshly rendered
// reference for the rate sweep.
EvalReport RunEval(const ModelParams &params, const std::vector<Utterance> &corpus,
                   const DecodeConfig &decode, const std::vector<int32_t> &rates,
                   double ref_noise_std, uint64_t seed);

std::string EvalReportToJson(const EvalReport &report);

// Recomputes the aggregate fields from the per-utterance records.
EvalReport RecomputeAggregates(EvalReport report);

}  // namespace transduce

#endif  // TRANSDUCE_PIPELINE_H_
