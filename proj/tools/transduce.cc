// tools/transduce.cc
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

// Command-line driver. Every subcommand is deterministic given its inputs
// and seed; machine-readable results go to files, a short summary to stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "transduce/checks.h"
#include "transduce/config.h"
#include "transduce/corpus.h"
#include "transduce/decode.h"
#include "transduce/errors.h"
#include "transduce/model.h"
#include "transduce/pipeline.h"
#include "transduce/quantizer.h"

namespace {

using namespace transduce;

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kConfigFailure = 2,
  kIoFailure = 3,
  kCheckFailure = 4,
  kDiverged = 5,
};

struct Args {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::string checkpoint;
  std::string input;
  std::string codebook;
  std::string kind = "utterances";
  uint64_t seed = 7;
  bool seed_set = false;
  bool inject_fault = false;
  int32_t k = 32;
  int32_t max_iters = 100;
  int32_t num_seqs = 64;
};

std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Spit(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

RunConfig LoadConfig(const Args &a) {
  std::vector<std::string> overrides = a.overrides;
  if (a.seed_set) overrides.push_back("seed=" + std::to_string(a.seed));
  return LoadRunConfig(a.config_path.empty() ? "" : Slurp(a.config_path),
                       overrides);
}

void RequireOut(const Args &a) {
  if (a.out.empty()) throw ConfigError("--out is required");
}

std::vector<Utterance> CorpusOrGenerated(const Args &a, const CorpusConfig &cfg) {
  if (!a.input.empty()) return ReadJsonl(a.input);
  return GenerateSynthetic(cfg);
}

int QuantizeFit(const Args &a) {
  RequireOut(a);
  std::vector<EmbeddingSequence> seqs;
  if (!a.input.empty()) {
    seqs = ReadEmbeddingsJsonl(a.input);
  } else {
    EmbeddingConfig ec;
    ec.num_sequences = a.num_seqs;
    ec.seed = a.seed;
    seqs = GenerateEmbeddings(ec);
  }
  Eigen::MatrixXd data = StackFrames(seqs);
  KMeansOptions opts;
  opts.k = a.k;
  opts.max_iters = a.max_iters;
  opts.seed = a.seed;
  KMeansResult res = FitKMeans(data, opts);
  SaveCodebook(res.codebook, a.out);
  std::printf("k=%d dim=%d frames=%lld iterations=%d converged=%s inertia=%.6f\n",
              res.codebook.k(), res.codebook.dim(),
              static_cast<long long>(data.rows()), res.iterations,
              res.converged ? "yes" : "no", res.inertia_history.back());
  return kOk;
}

int QuantizeEncode(const Args &a) {
  RequireOut(a);
  if (a.codebook.empty() || a.input.empty()) {
    throw ConfigError("quantize-encode needs --codebook and --input");
  }
  Codebook cb = LoadCodebook(a.codebook);
  std::string text;
  for (const auto &seq : ReadEmbeddingsJsonl(a.input)) {
    if (seq.frames.cols() != cb.dim()) {
      throw IoError("frame dim " + std::to_string(seq.frames.cols()) +
                    " does not match codebook dim " + std::to_string(cb.dim()));
    }
    nlohmann::json j = {{"version", 1}, {"tokens", AssignAll(cb, seq.frames)}};
    text += j.dump() + "\n";
  }
  Spit(a.out, text);
  return kOk;
}

int GenCorpus(const Args &a) {
  RequireOut(a);
  if (a.kind == "embeddings") {
    EmbeddingConfig ec;
    ec.num_sequences = a.num_seqs;
    ec.seed = a.seed;
    WriteEmbeddingsJsonl(a.out, GenerateEmbeddings(ec));
    return kOk;
  }
  if (a.kind != "utterances") throw ConfigError("unknown --kind " + a.kind);
  RunConfig cfg = LoadConfig(a);
  std::vector<Utterance> utts = GenerateSynthetic(cfg.corpus);
  WriteJsonl(a.out, utts);
  std::printf("wrote %zu utterances to %s\n", utts.size(), a.out.c_str());
  return kOk;
}

int Train(const Args &a) {
  RequireOut(a);
  RunConfig cfg = LoadConfig(a);
  std::vector<Utterance> corpus = CorpusOrGenerated(a, cfg.corpus);
  std::filesystem::create_directories(a.out);
  const std::string dir = a.out + "/";
  Spit(dir + "config.json", RunConfigToJson(cfg));
  TrainOutputs outputs{dir + "checkpoint.json", dir + "train_log.jsonl"};
  TrainResult res = RunTrain(cfg, corpus, outputs);
  const EpochLog last = res.log.empty() ? EpochLog{} : res.log.back();
  std::printf("epochs=%d steps=%lld loss_per_token=%.6f checkpoint=%s\n",
              cfg.epochs, static_cast<long long>(res.step), last.loss_per_token,
              outputs.checkpoint_path.c_str());
  return kOk;
}

int DecodeCmd(const Args &a) {
  RequireOut(a);
  if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  RunConfig cfg = LoadConfig(a);
  ModelParams params = LoadCheckpoint(a.checkpoint);
  std::vector<Utterance> corpus =
      a.input.empty() ? GenerateSynthetic(HeldOutCorpusConfig(cfg)) : ReadJsonl(a.input);
  std::string text;
  for (const auto &utt : corpus) {
    ModelScorer scorer(params, utt.text, utt.ref_frames);
    DecodeOutput out = Decode(scorer, cfg.decode);
    nlohmann::json j = {{"version", 1}, {"text", utt.text}, {"tokens", out.tokens}};
    text += j.dump() + "\n";
  }
  Spit(a.out, text);
  return kOk;
}

int Eval(const Args &a) {
  RequireOut(a);
  if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  RunConfig cfg = LoadConfig(a);
  ModelParams params = LoadCheckpoint(a.checkpoint);
  std::vector<Utterance> corpus =
      a.input.empty() ? GenerateSynthetic(HeldOutCorpusConfig(cfg)) : ReadJsonl(a.input);
  EvalReport report = RunEval(params, corpus, cfg.decode, cfg.corpus.rates,
                              cfg.corpus.noise_std, cfg.seed);
  Spit(a.out, EvalReportToJson(report) + "\n");
  std::printf("utterances=%zu token_error_rate=%.4f rate_correlation=%s\n",
              corpus.size(), report.token_error_rate,
              report.rate_correlation ? std::to_string(*report.rate_correlation).c_str()
                                      : "undefined");
  for (const auto &[rate, mean] : report.mean_length_by_rate) {
    std::printf("rate=%d mean_emitted=%.3f\n", rate, mean);
  }
  return kOk;
}

int FinishCheck(const Args &a, const CheckReport &report) {
  std::fputs(report.ToText().c_str(), stdout);
  if (!a.out.empty()) Spit(a.out, report.ToJson() + "\n");
  return report.AllPass() ? kOk : kCheckFailure;
}

int Gradcheck(const Args &a) {
  GradcheckOptions opts;
  opts.seed = a.seed;
  opts.inject_fault = a.inject_fault;
  return FinishCheck(a, RunGradcheck(opts));
}

int OracleCheck(const Args &a) {
  OracleCheckOptions opts;
  opts.seed = a.seed;
  return FinishCheck(a, RunOracleCheck(opts));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Neural transducer text-to-token toolkit"};
  app.require_subcommand(1);
  Args a;

  auto add_config = [&](CLI::App *sub) {
    sub->add_option("--config", a.config_path, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--set", a.overrides, "Override a config value, key=value")
        ->take_all();
  };
  auto add_seed = [&](CLI::App *sub) {
    sub->add_option_function<uint64_t>(
        "--seed", [&](const uint64_t &s) { a.seed = s; a.seed_set = true; },
        "Random seed");
  };

  int (*handler)(const Args &) = nullptr;

  auto *fit = app.add_subcommand("quantize-fit", "Fit a k-means codebook");
  fit->add_option("--input", a.input, "Embeddings JSONL (synthetic if omitted)");
  fit->add_option("--out", a.out, "Codebook JSON");
  fit->add_option("--k", a.k, "Number of clusters");
  fit->add_option("--max-iters", a.max_iters, "Lloyd iterations");
  fit->add_option("--num-seqs", a.num_seqs, "Synthetic sequences when no --input");
  add_seed(fit);
  fit->callback([&] { handler = QuantizeFit; });

  auto *enc = app.add_subcommand("quantize-encode", "Map embeddings to token ids");
  enc->add_option("--codebook", a.codebook, "Codebook JSON");
  enc->add_option("--input", a.input, "Embeddings JSONL");
  enc->add_option("--out", a.out, "Token JSONL");
  enc->callback([&] { handler = QuantizeEncode; });

  auto *gen = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  add_config(gen);
  add_seed(gen);
  gen->add_option("--out", a.out, "Output JSONL");
  gen->add_option("--kind", a.kind, "utterances or embeddings");
  gen->add_option("--num-seqs", a.num_seqs, "Embedding sequences");
  gen->callback([&] { handler = GenCorpus; });

  auto *train = app.add_subcommand("train", "Train a transducer");
  add_config(train);
  add_seed(train);
  train->add_option("--corpus,--input", a.input, "Training JSONL (synthetic if omitted)");
  train->add_option("--out", a.out, "Output directory");
  train->callback([&] { handler = Train; });

  auto *dec = app.add_subcommand("decode", "Decode a corpus");
  add_config(dec);
  add_seed(dec);
  dec->add_option("--checkpoint", a.checkpoint, "Model checkpoint");
  dec->add_option("--corpus,--input", a.input, "Corpus JSONL (held-out synthetic if omitted)");
  dec->add_option("--out", a.out, "Hypotheses JSONL");
  dec->callback([&] { handler = DecodeCmd; });

  auto *ev = app.add_subcommand("eval", "Token error rate and rate sweep");
  add_config(ev);
  add_seed(ev);
  ev->add_option("--checkpoint", a.checkpoint, "Model checkpoint");
  ev->add_option("--corpus,--input", a.input, "Corpus JSONL (held-out synthetic if omitted)");
  ev->add_option("--out", a.out, "Report JSON");
  ev->callback([&] { handler = Eval; });

  auto *gc = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  add_seed(gc);
  gc->add_option("--out", a.out, "Report JSON");
  gc->add_flag("--inject-fault", a.inject_fault, "Perturb analytic gradients");
  gc->callback([&] { handler = Gradcheck; });

  auto *oc = app.add_subcommand("oracle-check", "Lattice oracle suite");
  add_seed(oc);
  oc->add_option("--out", a.out, "Report JSON");
  oc->callback([&] { handler = OracleCheck; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigFailure;
  }

  try {
    return handler(a);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const DivergenceError &e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
