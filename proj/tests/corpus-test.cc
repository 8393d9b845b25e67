// tests/corpus-test.cc
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

#include <fstream>
#include <set>

#include "gtest/gtest.h"
#include "test-util.h"
#include "transduce/errors.h"

namespace transduce {
namespace {

TEST(ExpandText, Examples) {
  EXPECT_EQ(ExpandText({3}, 1), (std::vector<int32_t>{6, 7}));
  EXPECT_EQ(ExpandText({3}, 2), (std::vector<int32_t>{6, 7, 6, 7}));
  EXPECT_EQ(ExpandText({0, 2}, 3),
            (std::vector<int32_t>{0, 1, 0, 1, 0, 1, 4, 5, 4, 5, 4, 5}));
}

TEST(GenerateSynthetic, Invariants) {
  CorpusConfig cfg;
  cfg.num_utts = 300;
  std::vector<Utterance> utts = GenerateSynthetic(cfg);
  ASSERT_EQ(utts.size(), 300u);
  std::set<int32_t> rates;
  for (const auto &u : utts) {
    const int32_t U = static_cast<int32_t>(u.text.size());
    EXPECT_GE(U, cfg.min_text_len);
    EXPECT_LE(U, cfg.max_text_len);
    const int32_t r = static_cast<int32_t>(u.rate);
    rates.insert(r);
    EXPECT_EQ(u.tokens, ExpandText(u.text, r));
    EXPECT_DOUBLE_EQ(u.rate, static_cast<double>(u.tokens.size()) / (2 * U));
    EXPECT_EQ(u.ref_frames.rows(), static_cast<Eigen::Index>(u.tokens.size()));
    EXPECT_EQ(u.ref_frames.cols(), cfg.ref_dim);
    // The rate is carried by the reference: frames sit near r.
    EXPECT_NEAR(u.ref_frames.mean(), r, 0.1);
    for (size_t i = 0; i < u.text.size(); ++i) {
      EXPECT_GE(u.text[i], 0);
      EXPECT_LT(u.text[i], cfg.text_vocab);
      if (i > 0) {
        EXPECT_NE(u.text[i], u.text[i - 1]);
      }
    }
  }
  EXPECT_EQ(rates, (std::set<int32_t>{1, 2, 3}));
}

TEST(GenerateSynthetic, Deterministic) {
  CorpusConfig cfg;
  cfg.num_utts = 50;
  EXPECT_EQ(GenerateSynthetic(cfg), GenerateSynthetic(cfg));
  CorpusConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(GenerateSynthetic(cfg), GenerateSynthetic(other));
}

TEST(GenerateSynthetic, MappingIsInjective) {
  // Distinct texts at one rate never share a token sequence.
  std::set<std::vector<int32_t>> seen_tokens;
  std::set<std::vector<int32_t>> seen_texts;
  for (int32_t a = 0; a < 6; ++a) {
    for (int32_t b = 0; b < 6; ++b) {
      std::vector<int32_t> text{a, b};
      seen_texts.insert(text);
      seen_tokens.insert(ExpandText(text, 2));
    }
  }
  EXPECT_EQ(seen_tokens.size(), seen_texts.size());
}

TEST(GenerateSynthetic, RejectsBadConfig) {
  CorpusConfig cfg;
  cfg.vocab = 2 * cfg.text_vocab - 1;
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
  cfg = CorpusConfig{};
  cfg.rates = {};
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
  cfg = CorpusConfig{};
  cfg.min_text_len = 0;
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
}

TEST(GenerateEmbeddings, NoiselessFramesAreMeans) {
  EmbeddingConfig ec;
  ec.num_sequences = 3;
  ec.noise_std = 0;
  Eigen::MatrixXd means = ClusterMeans(ec);
  for (const auto &s : GenerateEmbeddings(ec)) {
    ASSERT_EQ(s.frames.rows(), ec.frames_per_sequence);
    for (Eigen::Index i = 0; i < s.frames.rows(); ++i) {
      EXPECT_EQ(s.frames.row(i), means.row(s.cluster_ids[i]));
    }
  }
}

TEST(GenerateEmbeddings, Deterministic) {
  EmbeddingConfig ec;
  ec.num_sequences = 3;
  auto a = GenerateEmbeddings(ec), b = GenerateEmbeddings(ec);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].frames, b[i].frames);
}

TEST(Jsonl, RoundTrip) {
  CorpusConfig cfg;
  cfg.num_utts = 20;
  std::vector<Utterance> utts = GenerateSynthetic(cfg);
  std::string path = testing::MakeTempDir("jsonl") + "/c.jsonl";
  WriteJsonl(path, utts);
  EXPECT_EQ(ReadJsonl(path), utts);
}

TEST(Jsonl, EmptyFileIsEmptyCorpus) {
  std::string path = testing::MakeTempDir("jsonl") + "/empty.jsonl";
  std::ofstream(path).close();
  EXPECT_TRUE(ReadJsonl(path).empty());
  EXPECT_TRUE(ReadEmbeddingsJsonl(path).empty());
}

TEST(Jsonl, TruncatedLineNamesLine) {
  CorpusConfig cfg;
  cfg.num_utts = 3;
  std::string path = testing::MakeTempDir("jsonl") + "/bad.jsonl";
  {
    std::ofstream out(path);
    auto utts = GenerateSynthetic(cfg);
    out << UtteranceToJson(utts[0]) << "\n";
    std::string line = UtteranceToJson(utts[1]);
    out << line.substr(0, line.size() / 2) << "\n";
  }
  try {
    ReadJsonl(path);
    FAIL() << "expected IoError";
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Jsonl, MissingFile) {
  EXPECT_THROW(ReadJsonl("/nonexistent/dir/c.jsonl"), IoError);
}

TEST(Jsonl, EmbeddingsRoundTrip) {
  EmbeddingConfig ec;
  ec.num_sequences = 3;
  auto seqs = GenerateEmbeddings(ec);
  std::string path = testing::MakeTempDir("emb") + "/e.jsonl";
  WriteEmbeddingsJsonl(path, seqs);
  auto back = ReadEmbeddingsJsonl(path);
  ASSERT_EQ(back.size(), seqs.size());
  for (size_t i = 0; i < seqs.size(); ++i) {
    EXPECT_EQ(back[i].frames, seqs[i].frames);
    EXPECT_EQ(back[i].frame_duration_s, 0.02);
  }
}

}  // namespace
}  // namespace transduce
