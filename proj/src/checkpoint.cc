// src/checkpoint.cc
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

#include <string>

#include "json-util.h"
#include "nlohmann/json.hpp"
#include "transduce/errors.h"
#include "transduce/model.h"

namespace transduce {

namespace {

using nlohmann::json;

constexpr int32_t kCheckpointVersion = 1;

json DimsToJson(const ModelDims &d) {
  return json{{"text_vocab", d.text_vocab},
              {"vocab", d.vocab},
              {"d_model", d.d_model},
              {"joiner_dim", d.joiner_dim},
              {"ref_input_dim", d.ref_input_dim},
              {"ref_dim", d.ref_dim},
              {"num_encoder_blocks", d.num_encoder_blocks},
              {"ff_multiplier", d.ff_multiplier}};
}

ModelDims DimsFromJson(const json &j) {
  ModelDims d;
  d.text_vocab = j.at("text_vocab").get<int32_t>();
  d.vocab = j.at("vocab").get<int32_t>();
  d.d_model = j.at("d_model").get<int32_t>();
  d.joiner_dim = j.at("joiner_dim").get<int32_t>();
  d.ref_input_dim = j.at("ref_input_dim").get<int32_t>();
  d.ref_dim = j.at("ref_dim").get<int32_t>();
  d.num_encoder_blocks = j.at("num_encoder_blocks").get<int32_t>();
  d.ff_multiplier = j.at("ff_multiplier").get<int32_t>();
  return d;
}

}  // namespace

std::string CheckpointToJson(const ModelParams &params, int64_t step) {
  json tensors = json::object();
  VisitTensors(params, [&](const std::string &name, const auto &t) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) flat.push_back(t(r, c));
    }
    tensors[name] = std::move(flat);
  });
  json j;
  j["version"] = kCheckpointVersion;
  j["dims"] = DimsToJson(params.dims);
  j["tensors"] = std::move(tensors);
  j["step"] = step;
  return j.dump();
}

ModelParams CheckpointFromJson(const std::string &text, int64_t *step) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
  try {
    int32_t version = j.at("version").get<int32_t>();
    if (version != kCheckpointVersion) {
      throw IoError("checkpoint: unsupported version " + std::to_string(version));
    }
    ModelDims dims = DimsFromJson(j.at("dims"));
    dims.Validate();
    ModelParams params = InitParams(dims, 0);
    const json &tensors = j.at("tensors");
    size_t seen = 0;
    VisitTensors(params, [&](const std::string &name, auto &t) {
      if (!tensors.contains(name)) {
        throw IoError("checkpoint: missing tensor " + name);
      }
      const json &flat = tensors.at(name);
      if (!flat.is_array() || flat.size() != static_cast<size_t>(t.size())) {
        throw IoError("checkpoint: shape mismatch for " + name);
      }
      size_t k = 0;
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
          t(r, c) = flat[k++].get<double>();
        }
      }
      ++seen;
    });
    if (seen != tensors.size()) {
      throw IoError("checkpoint: unexpected extra tensors");
    }
    if (!AllFinite(params)) throw IoError("checkpoint: non-finite parameter");
    if (step) *step = j.at("step").get<int64_t>();
    return params;
  } catch (const json::exception &e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError &e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const ModelParams &params, int64_t step,
                    const std::string &path) {
  WriteFile(path, CheckpointToJson(params, step) + "\n");
}

ModelParams LoadCheckpoint(const std::string &path, int64_t *step) {
  return CheckpointFromJson(ReadFile(path), step);
}

}  // namespace transduce
