// src/config.cc
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

#include "transduce/config.h"

#include "nlohmann/json.hpp"
#include "transduce/errors.h"

namespace transduce {

namespace {

using nlohmann::json;

json ToJson(const RunConfig &c) {
  json j;
  j["version"] = 1;
  j["seed"] = c.seed;
  j["eval_utts"] = c.eval_utts;
  j["model"] = {{"text_vocab", c.model.text_vocab},
                {"vocab", c.model.vocab},
                {"d_model", c.model.d_model},
                {"joiner_dim", c.model.joiner_dim},
                {"ref_input_dim", c.model.ref_input_dim},
                {"ref_dim", c.model.ref_dim},
                {"num_encoder_blocks", c.model.num_encoder_blocks},
                {"ff_multiplier", c.model.ff_multiplier}};
  j["loss"] = {{"alpha1", c.loss.alpha1},
               {"alpha2", c.loss.alpha2},
               {"prune_range", c.loss.prune_range}};
  j["optim"] = {{"lr", c.adam.lr},
                {"beta1", c.adam.beta1},
                {"beta2", c.adam.beta2},
                {"eps", c.adam.eps},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs}};
  j["decode"] = {{"mode", DecodeModeName(c.decode.mode)},
                 {"k", c.decode.k},
                 {"temperature", c.decode.temperature},
                 {"max_symbols_per_position", c.decode.max_symbols_per_position},
                 {"seed", c.decode.seed}};
  j["corpus"] = {{"num_utts", c.corpus.num_utts},
                 {"min_text_len", c.corpus.min_text_len},
                 {"max_text_len", c.corpus.max_text_len},
                 {"rates", c.corpus.rates},
                 {"noise_std", c.corpus.noise_std},
                 {"seed", c.corpus.seed}};
  return j;
}

// Copies every key of `src` into `dst`, recursing into objects. Keys absent
// from `dst` are rejected.
void Overlay(const json &src, json *dst, const std::string &where) {
  if (!src.is_object()) throw ConfigError("config " + where + " must be an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!dst->contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json &slot = (*dst)[it.key()];
    if (slot.is_object()) {
      Overlay(it.value(), &slot, key);
    } else {
      slot = it.value();
    }
  }
}

template <typename T>
T Get(const json &j, const char *section, const char *key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError(std::string("config value ") + section + "." + key +
                      " has the wrong type");
  }
}

RunConfig FromJson(const json &j) {
  RunConfig c;
  try {
    c.seed = j.at("seed").get<uint64_t>();
    c.eval_utts = j.at("eval_utts").get<int32_t>();
  } catch (const json::exception &) {
    throw ConfigError("config values seed/eval_utts have the wrong type");
  }
  c.model.text_vocab = Get<int32_t>(j, "model", "text_vocab");
  c.model.vocab = Get<int32_t>(j, "model", "vocab");
  c.model.d_model = Get<int32_t>(j, "model", "d_model");
  c.model.joiner_dim = Get<int32_t>(j, "model", "joiner_dim");
  c.model.ref_input_dim = Get<int32_t>(j, "model", "ref_input_dim");
  c.model.ref_dim = Get<int32_t>(j, "model", "ref_dim");
  c.model.num_encoder_blocks = Get<int32_t>(j, "model", "num_encoder_blocks");
  c.model.ff_multiplier = Get<int32_t>(j, "model", "ff_multiplier");
  c.loss.alpha1 = Get<double>(j, "loss", "alpha1");
  c.loss.alpha2 = Get<double>(j, "loss", "alpha2");
  c.loss.prune_range = Get<int32_t>(j, "loss", "prune_range");
  c.adam.lr = Get<double>(j, "optim", "lr");
  c.adam.beta1 = Get<double>(j, "optim", "beta1");
  c.adam.beta2 = Get<double>(j, "optim", "beta2");
  c.adam.eps = Get<double>(j, "optim", "eps");
  c.batch_size = Get<int32_t>(j, "optim", "batch_size");
  c.epochs = Get<int32_t>(j, "optim", "epochs");
  c.decode.mode = ParseDecodeMode(Get<std::string>(j, "decode", "mode"));
  c.decode.k = Get<int32_t>(j, "decode", "k");
  c.decode.temperature = Get<double>(j, "decode", "temperature");
  c.decode.max_symbols_per_position =
      Get<int32_t>(j, "decode", "max_symbols_per_position");
  c.decode.seed = Get<uint64_t>(j, "decode", "seed");
  c.corpus.num_utts = Get<int32_t>(j, "corpus", "num_utts");
  c.corpus.min_text_len = Get<int32_t>(j, "corpus", "min_text_len");
  c.corpus.max_text_len = Get<int32_t>(j, "corpus", "max_text_len");
  c.corpus.rates = Get<std::vector<int32_t>>(j, "corpus", "rates");
  c.corpus.noise_std = Get<double>(j, "corpus", "noise_std");
  c.corpus.seed = Get<uint64_t>(j, "corpus", "seed");
  c.corpus.text_vocab = c.model.text_vocab;
  c.corpus.vocab = c.model.vocab;
  c.corpus.ref_dim = c.model.ref_input_dim;
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  model.Validate();
  adam.Validate();
  if (!(loss.alpha1 >= 0) || !(loss.alpha2 >= 0)) {
    throw ConfigError("loss.alpha1 and loss.alpha2 must be >= 0");
  }
  if (loss.prune_range < 1) throw ConfigError("loss.prune_range must be >= 1");
  if (batch_size < 1) throw ConfigError("optim.batch_size must be >= 1");
  if (epochs < 0) throw ConfigError("optim.epochs must be >= 0");
  if (eval_utts < 0) throw ConfigError("eval_utts must be >= 0");
  decode.Validate(model.vocab + 1);
  corpus.Validate();
}

std::string DefaultConfigJson() { return ToJson(RunConfig{}).dump(2); }

RunConfig LoadRunConfig(const std::string &json_text,
                        const std::vector<std::string> &overrides) {
  json merged = ToJson(RunConfig{});
  if (!json_text.empty()) {
    json user;
    try {
      user = json::parse(json_text);
    } catch (const json::exception &e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (user.contains("version") && user["version"] != 1) {
      throw ConfigError("unsupported config version");
    }
    Overlay(user, &merged, "");
  }
  for (const auto &o : overrides) {
    size_t eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + o + "' is not key=value");
    }
    std::string key = o.substr(0, eq);
    std::string text = o.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json *slot = &merged;
    size_t begin = 0;
    while (true) {
      size_t dot = key.find('.', begin);
      std::string part = key.substr(begin, dot - begin);
      if (!slot->is_object() || !slot->contains(part)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      slot = &(*slot)[part];
      if (dot == std::string::npos) break;
      begin = dot + 1;
    }
    if (slot->is_object()) throw ConfigError("'" + key + "' names a section");
    *slot = value;
  }
  RunConfig cfg = FromJson(merged);
  cfg.Validate();
  return cfg;
}

std::string RunConfigToJson(const RunConfig &cfg) { return ToJson(cfg).dump(2); }

}  // namespace transduce
