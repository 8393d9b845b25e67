// include/transduce/config.h
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

#ifndef TRANSDUCE_CONFIG_H_
#define TRANSDUCE_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "transduce/corpus.h"
#include "transduce/decode.h"
#include "transduce/model.h"

namespace transduce {

struct LossOptions {
  double alpha1 = 0.5;      // scale of the simple (bound-finding) loss
  double alpha2 = 1.0;      // scale of the pruned main loss
  int32_t prune_range = 8;  // S, window width in tokens
};

struct RunConfig {
  ModelDims model;
  LossOptions loss;
  AdamOptions adam;
  int32_t batch_size = 16;
  int32_t epochs = 30;
  uint64_t seed = 1234;
  DecodeConfig decode;
  CorpusConfig corpus;  // vocab sizes and ref_dim follow `model`
  int32_t eval_utts = 200;

  // Throws ConfigError on out-of-range values.
  void Validate() const;
};

// The defaults as a JSON document, with nested sections "model", "loss",
// "optim", "decode", "corpus" and top-level "seed", "eval_utts".
std::string DefaultConfigJson();

// Overlays `json_text` (may be empty) and then each "dotted.key=value"
// override onto the defaults. Values are parsed as JSON, falling back to a
// plain string. Unknown keys are a ConfigError.
RunConfig LoadRunConfig(const std::string &json_text,
                        const std::vector<std::string> &overrides);

std::string RunConfigToJson(const RunConfig &cfg);

}  // namespace transduce

#endif  // TRANSDUCE_CONFIG_H_
