// include/transduce/corpus.h
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

#ifndef TRANSDUCE_CORPUS_H_
#define TRANSDUCE_CORPUS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Core"

namespace transduce {

// One training example. `rate` is the number of times each text symbol's
// token pair is repeated, so tokens.size() == 2 * rate * text.size().
struct Utterance {
  std::vector<int32_t> text;
  std::vector<int32_t> tokens;
  double rate = 1;
  Eigen::MatrixXd ref_frames;  // one frame per row, ref_dim columns

  bool operator==(const Utterance &o) const {
    return text == o.text && tokens == o.tokens && rate == o.rate &&
           ref_frames.rows() == o.ref_frames.rows() &&
           ref_frames.cols() == o.ref_frames.cols() &&
           ref_frames == o.ref_frames;
  }
};

struct CorpusConfig {
  int32_t num_utts = 2000;
  int32_t min_text_len = 3;
  int32_t max_text_len = 8;
  int32_t text_vocab = 16;  // symbols 0..text_vocab-1
  int32_t vocab = 32;       // token ids 0..vocab-1
  std::vector<int32_t> rates = {1, 2, 3};
  int32_t ref_dim = 8;
  double noise_std = 0.1;
  uint64_t seed = 1;

  // Throws ConfigError.
  void Validate() const;
};

// Token pair for a text symbol: (2p, 2p + 1).
std::vector<int32_t> ExpandText(const std::vector<int32_t> &text, int32_t rate);

// `num_frames` frames of dimension `dim`, each rate * 1 + N(0, noise_std^2).
Eigen::MatrixXd RenderReferenceFrames(int32_t rate, int32_t num_frames,
                                      int32_t dim, double noise_std,
                                      std::mt19937_64 &rng);

// Synthetic text -> token corpus. Adjacent text symbols always differ, so a
// token sequence decomposes into per-symbol runs without ambiguity. The
// speaking rate appears only in ref_frames (one frame per target token).
std::vector<Utterance> GenerateSynthetic(const CorpusConfig &cfg);

struct EmbeddingSequence {
  Eigen::MatrixXd frames;  // one frame per row
  double frame_duration_s = 0.02;
  std::vector<int32_t> cluster_ids;  // generating cluster of each frame
};

struct EmbeddingConfig {
  int32_t num_sequences = 64;
  int32_t frames_per_sequence = 100;
  int32_t dim = 16;
  int32_t num_clusters = 8;
  double separation = 10.0;
  double noise_std = 0.5;
  double mean_segment_frames = 4.0;
  double frame_duration_s = 0.02;
  uint64_t seed = 1;

  void Validate() const;
};

// Mean of cluster c: separation * (1 + c / dim) on axis c mod dim. For
// c < dim these are the vertices of a scaled simplex.
Eigen::MatrixXd ClusterMeans(const EmbeddingConfig &cfg);

// Frames drawn from well separated Gaussian clusters. Each sequence is a
// run of segments; a segment holds one cluster for a geometric number of
// frames with the configured mean length.
std::vector<EmbeddingSequence> GenerateEmbeddings(const EmbeddingConfig &cfg);

// Stacks the frames of every sequence.
Eigen::MatrixXd StackFrames(const std::vector<EmbeddingSequence> &seqs);

// {"version":1,"text":[...],"tokens":[...],"rate":r,"ref":[[...],...]} per line.
std::string UtteranceToJson(const Utterance &utt);
Utterance UtteranceFromJson(const std::string &line);  // throws IoError

void WriteJsonl(const std::string &path, const std::vector<Utterance> &utts);
// Errors name the offending 1-based line number.
std::vector<Utterance> ReadJsonl(const std::string &path);

// {"version":1,"frames":[[...],...],"frame_duration_s":d} per line.
void WriteEmbeddingsJsonl(const std::string &path,
                          const std::vector<EmbeddingSequence> &seqs);
std::vector<EmbeddingSequence> ReadEmbeddingsJsonl(const std::string &path);

}  // namespace transduce

#endif  // TRANSDUCE_CORPUS_H_
