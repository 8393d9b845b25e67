// src/corpus.cc
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

#include "transduce/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json-util.h"
#include "nlohmann/json.hpp"
#include "transduce/errors.h"

namespace transduce {

using nlohmann::json;

nlohmann::json MatrixRowsToJson(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd MatrixRowsFromJson(const nlohmann::json &j, int64_t cols) {
  if (!j.is_array()) throw IoError("expected an array of frames");
  if (j.empty()) return Eigen::MatrixXd(0, std::max<int64_t>(cols, 0));
  if (!j[0].is_array()) throw IoError("expected an array of frames");
  if (cols < 0) cols = static_cast<int64_t>(j[0].size());
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || static_cast<int64_t>(j[r].size()) != cols) {
      throw IoError("frame " + std::to_string(r) + " has the wrong dimension");
    }
    for (int64_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw IoError("frame entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

std::string ReadFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw IoError("failed reading " + path);
  return ss.str();
}

void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << contents;
  if (!os) throw IoError("failed writing " + path);
}

std::vector<std::string> SplitLines(const std::string &text) {
  std::vector<std::string> lines;
  size_t begin = 0;
  while (begin < text.size()) {
    size_t end = text.find('\n', begin);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  return lines;
}

void CorpusConfig::Validate() const {
  if (num_utts < 0) throw ConfigError("num_utts must be >= 0");
  if (min_text_len < 1 || max_text_len < min_text_len) {
    throw ConfigError("text length range must satisfy 1 <= min <= max");
  }
  if (text_vocab < 2) throw ConfigError("text_vocab must be >= 2");
  if (vocab < 2 * text_vocab) {
    throw ConfigError("vocab must be >= 2 * text_vocab for the pair mapping");
  }
  if (rates.empty()) throw ConfigError("rate set is empty");
  for (int32_t r : rates) {
    if (r < 1) throw ConfigError("rates must be >= 1");
  }
  if (ref_dim < 1) throw ConfigError("ref_dim must be >= 1");
  if (!(noise_std >= 0)) throw ConfigError("noise_std must be >= 0");
}

std::vector<int32_t> ExpandText(const std::vector<int32_t> &text,
                                int32_t rate) {
  std::vector<int32_t> tokens;
  tokens.reserve(text.size() * 2 * rate);
  for (int32_t p : text) {
    for (int32_t i = 0; i < rate; ++i) {
      tokens.push_back(2 * p);
      tokens.push_back(2 * p + 1);
    }
  }
  return tokens;
}

Eigen::MatrixXd RenderReferenceFrames(int32_t rate, int32_t num_frames,
                                      int32_t dim, double noise_std,
                                      std::mt19937_64 &rng) {
  if (num_frames < 1 || dim < 1) {
    throw ConfigError("reference needs at least one frame of dim >= 1");
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd frames(num_frames, dim);
  for (int32_t i = 0; i < num_frames; ++i) {
    for (int32_t d = 0; d < dim; ++d) {
      frames(i, d) = rate + noise_std * noise(rng);
    }
  }
  return frames;
}

std::vector<Utterance> GenerateSynthetic(const CorpusConfig &cfg) {
  cfg.Validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int32_t> length(cfg.min_text_len,
                                                cfg.max_text_len);
  std::uniform_int_distribution<size_t> pick_rate(0, cfg.rates.size() - 1);
  std::uniform_int_distribution<int32_t> first_symbol(0, cfg.text_vocab - 1);
  std::uniform_int_distribution<int32_t> other_symbol(0, cfg.text_vocab - 2);

  std::vector<Utterance> utts;
  utts.reserve(cfg.num_utts);
  for (int32_t n = 0; n < cfg.num_utts; ++n) {
    Utterance utt;
    int32_t U = length(rng);
    int32_t rate = cfg.rates[pick_rate(rng)];
    utt.text.reserve(U);
    utt.text.push_back(first_symbol(rng));
    for (int32_t u = 1; u < U; ++u) {
      // Uniform over the symbols that differ from the previous one.
      int32_t s = other_symbol(rng);
      if (s >= utt.text.back()) ++s;
      utt.text.push_back(s);
    }
    utt.tokens = ExpandText(utt.text, rate);
    utt.rate = rate;
    utt.ref_frames =
        RenderReferenceFrames(rate, static_cast<int32_t>(utt.tokens.size()),
                              cfg.ref_dim, cfg.noise_std, rng);
    utts.push_back(std::move(utt));
  }
  return utts;
}

void EmbeddingConfig::Validate() const {
  if (num_sequences < 1 || frames_per_sequence < 1) {
    throw ConfigError("need at least one sequence with one frame");
  }
  if (dim < 1 || num_clusters < 1) {
    throw ConfigError("embedding dim and cluster count must be >= 1");
  }
  if (!(noise_std >= 0) || !(separation > 0)) {
    throw ConfigError("need noise_std >= 0 and separation > 0");
  }
  if (!(mean_segment_frames >= 1)) {
    throw ConfigError("mean_segment_frames must be >= 1");
  }
  if (!(frame_duration_s > 0)) throw ConfigError("frame_duration_s must be > 0");
}

Eigen::MatrixXd ClusterMeans(const EmbeddingConfig &cfg) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(cfg.num_clusters, cfg.dim);
  for (int32_t c = 0; c < cfg.num_clusters; ++c) {
    means(c, c % cfg.dim) = cfg.separation * (1.0 + c / cfg.dim);
  }
  return means;
}

std::vector<EmbeddingSequence> GenerateEmbeddings(const EmbeddingConfig &cfg) {
  cfg.Validate();
  std::mt19937_64 rng(cfg.seed);
  const Eigen::MatrixXd means = ClusterMeans(cfg);
  std::uniform_int_distribution<int32_t> cluster(0, cfg.num_clusters - 1);
  std::geometric_distribution<int32_t> extra(1.0 / cfg.mean_segment_frames);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<EmbeddingSequence> seqs(cfg.num_sequences);
  for (auto &seq : seqs) {
    seq.frame_duration_s = cfg.frame_duration_s;
    seq.frames.resize(cfg.frames_per_sequence, cfg.dim);
    seq.cluster_ids.resize(cfg.frames_per_sequence);
    int32_t i = 0;
    while (i < cfg.frames_per_sequence) {
      int32_t c = cluster(rng);
      int32_t len = 1 + extra(rng);
      for (int32_t j = 0; j < len && i < cfg.frames_per_sequence; ++j, ++i) {
        seq.cluster_ids[i] = c;
        for (int32_t d = 0; d < cfg.dim; ++d) {
          seq.frames(i, d) = means(c, d) + cfg.noise_std * noise(rng);
        }
      }
    }
  }
  return seqs;
}

Eigen::MatrixXd StackFrames(const std::vector<EmbeddingSequence> &seqs) {
  Eigen::Index rows = 0, cols = seqs.empty() ? 0 : seqs[0].frames.cols();
  for (const auto &s : seqs) {
    if (s.frames.cols() != cols) {
      throw ConfigError("embedding sequences differ in dimension");
    }
    rows += s.frames.rows();
  }
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index r = 0;
  for (const auto &s : seqs) {
    out.middleRows(r, s.frames.rows()) = s.frames;
    r += s.frames.rows();
  }
  return out;
}

namespace {

std::vector<int32_t> IntArray(const json &j, const char *field) {
  const json &a = j.at(field);
  if (!a.is_array()) {
    throw IoError(std::string("field '") + field + "' must be an array");
  }
  std::vector<int32_t> out;
  out.reserve(a.size());
  for (const auto &v : a) {
    if (!v.is_number_integer()) {
      throw IoError(std::string("field '") + field + "' must hold integers");
    }
    out.push_back(v.get<int32_t>());
  }
  return out;
}

}  // namespace

namespace {

// Records written before versioning carry no field; anything else must be 1.
void CheckVersion(const json &j) {
  if (j.contains("version") && j["version"] != 1) {
    throw IoError("unsupported record version " + j["version"].dump());
  }
}

}  // namespace

std::string UtteranceToJson(const Utterance &utt) {
  json j;
  j["version"] = 1;
  j["text"] = utt.text;
  j["tokens"] = utt.tokens;
  j["rate"] = utt.rate;
  j["ref"] = MatrixRowsToJson(utt.ref_frames);
  return j.dump();
}

Utterance UtteranceFromJson(const std::string &line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw IoError("record must be a JSON object");
  CheckVersion(j);
  for (const char *field : {"text", "tokens", "rate", "ref"}) {
    if (!j.contains(field)) {
      throw IoError(std::string("missing field '") + field + "'");
    }
  }
  Utterance utt;
  utt.text = IntArray(j, "text");
  utt.tokens = IntArray(j, "tokens");
  if (!j["rate"].is_number()) throw IoError("field 'rate' must be a number");
  utt.rate = j["rate"].get<double>();
  utt.ref_frames = MatrixRowsFromJson(j["ref"], -1);
  return utt;
}

void WriteJsonl(const std::string &path, const std::vector<Utterance> &utts) {
  std::string out;
  for (const auto &u : utts) {
    out += UtteranceToJson(u);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<Utterance> ReadJsonl(const std::string &path) {
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<Utterance> utts;
  utts.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      utts.push_back(UtteranceFromJson(lines[i]));
    } catch (const IoError &e) {
      throw IoError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return utts;
}

void WriteEmbeddingsJsonl(const std::string &path,
                          const std::vector<EmbeddingSequence> &seqs) {
  std::string out;
  for (const auto &s : seqs) {
    json j;
    j["version"] = 1;
    j["frames"] = MatrixRowsToJson(s.frames);
    j["frame_duration_s"] = s.frame_duration_s;
    out += j.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<EmbeddingSequence> ReadEmbeddingsJsonl(const std::string &path) {
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<EmbeddingSequence> seqs;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      json j = json::parse(lines[i]);
      CheckVersion(j);
      EmbeddingSequence s;
      s.frames = MatrixRowsFromJson(j.at("frames"), -1);
      s.frame_duration_s = j.at("frame_duration_s").get<double>();
      if (!(s.frame_duration_s > 0)) throw IoError("frame_duration_s must be > 0");
      if (!seqs.empty() && s.frames.cols() != seqs[0].frames.cols()) {
        throw IoError("frame dimension differs from earlier sequences");
      }
      seqs.push_back(std::move(s));
    } catch (const json::exception &e) {
      throw IoError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const IoError &e) {
      throw IoError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return seqs;
}

}  // namespace transduce
