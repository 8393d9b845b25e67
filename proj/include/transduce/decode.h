// include/transduce/decode.h
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

#ifndef TRANSDUCE_DECODE_H_
#define TRANSDUCE_DECODE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "transduce/lattice.h"
#include "transduce/model.h"

namespace transduce {

enum class DecodeMode { kGreedy, kTopK };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kGreedy;
  int32_t k = 5;
  double temperature = 1.0;
  int32_t max_symbols_per_position = 8;
  uint64_t seed = 0;

  // num_symbols is |V| + 1; k is only checked in top-k mode.
  void Validate(int32_t num_symbols) const;
};

DecodeMode ParseDecodeMode(const std::string &name);
std::string DecodeModeName(DecodeMode mode);

struct DecodeOutput {
  std::vector<int32_t> tokens;
  AlignmentPath alignment;
  std::vector<int32_t> symbols;   // chosen symbol per step, blank included
  std::vector<double> log_probs;  // model log-prob of each chosen symbol
};

// What the decoders need from a transducer: joint logits at text position u
// given the tokens emitted so far, and a way to feed the next token.
class StepScorer {
 public:
  virtual ~StepScorer() = default;

  virtual int32_t NumPositions() const = 0;  // U
  virtual int32_t VocabSize() const = 0;     // |V|; blank id is |V|
  // Back to the start-of-sequence state.
  virtual void Reset() = 0;
  // |V| + 1 logits at zero-based position u for the current decoder state.
  virtual Eigen::VectorXd Logits(int32_t u) = 0;
  virtual void Emit(int32_t token) = 0;
};

// Runs the trained model: encoder and reference once, decoder per emission.
class ModelScorer : public StepScorer {
 public:
  ModelScorer(const ModelParams &params, std::span<const int32_t> text,
              const Eigen::MatrixXd &ref_frames);

  int32_t NumPositions() const override;
  int32_t VocabSize() const override;
  void Reset() override;
  Eigen::VectorXd Logits(int32_t u) override;
  void Emit(int32_t token) override;

 private:
  const ModelParams &params_;
  Eigen::MatrixXd h_enc_;
  ReferenceEmbedding ref_;
  DecoderState state_;
  Eigen::VectorXd h_dec_;
};

// Walks u = 1..U taking the argmax symbol (lowest index on ties). Blank
// advances u; a token is emitted and fed to the decoder. After
// max_symbols_per_position emissions at one position a blank is forced.
DecodeOutput GreedyDecode(StepScorer &scorer, const DecodeConfig &cfg);

// Like GreedyDecode but samples among the k highest logits after dividing by
// the temperature, using a generator seeded from cfg.seed.
DecodeOutput TopKSampleDecode(StepScorer &scorer, const DecodeConfig &cfg);

// Dispatches on cfg.mode.
DecodeOutput Decode(StepScorer &scorer, const DecodeConfig &cfg);

DecodeOutput GreedyDecode(const ModelParams &params,
                          std::span<const int32_t> text,
                          const Eigen::MatrixXd &ref_frames,
                          const DecodeConfig &cfg);
DecodeOutput TopKSampleDecode(const ModelParams &params,
                              std::span<const int32_t> text,
                              const Eigen::MatrixXd &ref_frames,
                              const DecodeConfig &cfg);

// True when removing blanks from `symbols` gives `tokens` and the
// alignment is a complete path with matching steps.
bool IsConsistent(const DecodeOutput &out, int32_t num_positions,
                  int32_t blank_id);

}  // namespace transduce

#endif  // TRANSDUCE_DECODE_H_
