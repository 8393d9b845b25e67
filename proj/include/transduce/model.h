// include/transduce/model.h
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

#ifndef TRANSDUCE_MODEL_H_
#define TRANSDUCE_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "Eigen/Core"
#include "transduce/loss.h"

namespace transduce {

/*
  A small reference-conditioned transducer.

    text encoder       embedding + pre-norm feed-forward blocks
                       x + W2 swish(W1 LN(x) + b1) + b2, position-wise
    token decoder      single-gate recurrent cell over [embedding; state]
                       z = sigmoid(Wz [x; h] + bz)
                       h' = (1 - z) * h + z * tanh(Wc [x; h] + bc)
    reference encoder  h_ref = W mean(frames) + b
    joiner             W_out tanh(CLN(W_in [h_enc; h_dec] + b_in, h_ref)) + b_out
                       CLN(a, r) = normalize(a) * (1 + W_scale r)

  The encoder blocks stand in for conformer blocks, the recurrent cell for a
  uni-directional LSTM, and mean pooling for an ECAPA-TDNN; each keeps the
  interface of the module it replaces. The conditional layer norm conditions
  the scale only.

  A second, additive "simple" joiner (linear maps of h_enc and h_dec, summed)
  produces the cheap lattice used to choose pruning windows.
 */
struct ModelDims {
  int32_t text_vocab = 16;     // input symbols
  int32_t vocab = 32;          // output tokens; blank = vocab, sos = vocab + 1
  int32_t d_model = 32;        // encoder / decoder width
  int32_t joiner_dim = 64;     // joiner hidden width
  int32_t ref_input_dim = 8;   // reference frame dimension
  int32_t ref_dim = 16;        // reference embedding width
  int32_t num_encoder_blocks = 2;
  int32_t ff_multiplier = 4;

  int32_t BlankId() const { return vocab; }
  int32_t SosId() const { return vocab + 1; }
  void Validate() const;
  bool operator==(const ModelDims &) const = default;
};

struct EncoderBlockParams {
  Eigen::VectorXd ln_gain, ln_bias;
  Eigen::MatrixXd ff1_weight;  // (m * d) x d
  Eigen::VectorXd ff1_bias;
  Eigen::MatrixXd ff2_weight;  // d x (m * d)
  Eigen::VectorXd ff2_bias;
};

struct ModelParams {
  ModelDims dims;
  Eigen::MatrixXd text_embedding;   // text_vocab x d
  std::vector<EncoderBlockParams> encoder;
  Eigen::MatrixXd token_embedding;  // (vocab + 2) x d; row vocab is unused
  Eigen::MatrixXd gate_weight;      // d x 2d
  Eigen::VectorXd gate_bias;
  Eigen::MatrixXd cand_weight;      // d x 2d
  Eigen::VectorXd cand_bias;
  Eigen::MatrixXd ref_weight;       // ref_dim x ref_input_dim
  Eigen::VectorXd ref_bias;
  Eigen::MatrixXd joiner_enc_weight;  // joiner_dim x d (W_in, encoder half)
  Eigen::MatrixXd joiner_dec_weight;  // joiner_dim x d (W_in, decoder half)
  Eigen::VectorXd joiner_bias;
  Eigen::MatrixXd cln_scale_weight;   // joiner_dim x ref_dim
  Eigen::MatrixXd out_weight;         // (vocab + 1) x joiner_dim
  Eigen::VectorXd out_bias;
  Eigen::MatrixXd simple_enc_weight;  // (vocab + 1) x d
  Eigen::VectorXd simple_enc_bias;
  Eigen::MatrixXd simple_dec_weight;  // (vocab + 1) x d
};

// Calls fn(name, tensor) for every trainable tensor in a fixed order.
template <typename Params, typename Fn>
void VisitTensors(Params &p, Fn &&fn) {
  fn(std::string("text_embedding"), p.text_embedding);
  for (size_t i = 0; i != p.encoder.size(); ++i) {
    std::string prefix = "encoder." + std::to_string(i) + ".";
    fn(prefix + "ln_gain", p.encoder[i].ln_gain);
    fn(prefix + "ln_bias", p.encoder[i].ln_bias);
    fn(prefix + "ff1.weight", p.encoder[i].ff1_weight);
    fn(prefix + "ff1.bias", p.encoder[i].ff1_bias);
    fn(prefix + "ff2.weight", p.encoder[i].ff2_weight);
    fn(prefix + "ff2.bias", p.encoder[i].ff2_bias);
  }
  fn(std::string("token_embedding"), p.token_embedding);
  fn(std::string("decoder.gate.weight"), p.gate_weight);
  fn(std::string("decoder.gate.bias"), p.gate_bias);
  fn(std::string("decoder.cand.weight"), p.cand_weight);
  fn(std::string("decoder.cand.bias"), p.cand_bias);
  fn(std::string("reference.weight"), p.ref_weight);
  fn(std::string("reference.bias"), p.ref_bias);
  fn(std::string("joiner.enc_weight"), p.joiner_enc_weight);
  fn(std::string("joiner.dec_weight"), p.joiner_dec_weight);
  fn(std::string("joiner.bias"), p.joiner_bias);
  fn(std::string("joiner.cln_scale"), p.cln_scale_weight);
  fn(std::string("joiner.out_weight"), p.out_weight);
  fn(std::string("joiner.out_bias"), p.out_bias);
  fn(std::string("simple.enc_weight"), p.simple_enc_weight);
  fn(std::string("simple.enc_bias"), p.simple_enc_bias);
  fn(std::string("simple.dec_weight"), p.simple_dec_weight);
}

// Flat view of one tensor; data is column-major rows x cols.
struct TensorView {
  std::string name;
  double *data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
};

std::vector<TensorView> Tensors(ModelParams &params);

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights; layer-norm gains 1 and
// biases 0.
ModelParams InitParams(const ModelDims &dims, uint64_t seed);

ModelParams ZerosLike(const ModelParams &params);

int64_t NumParameters(const ModelParams &params);

// `params += scale * other`.
void AddScaled(const ModelParams &other, double scale, ModelParams *params);

bool AllFinite(const ModelParams &params);

struct DecoderState {
  Eigen::VectorXd hidden;
  int32_t last_token = 0;
};

struct ReferenceEmbedding {
  Eigen::VectorXd h_ref;
};

// d x U, column u is h_enc for text position u + 1.
Eigen::MatrixXd EncodeText(const ModelParams &params,
                           std::span<const int32_t> text);

// `ref_frames` holds one frame per row.
ReferenceEmbedding EncodeReference(const ModelParams &params,
                                   const Eigen::MatrixXd &ref_frames);

// Zero hidden state with last_token = sos.
DecoderState InitialDecoderState(const ModelDims &dims);

// Feeds prev_token (a token or sos, never blank). Returns h_dec and the new
// state.
std::pair<Eigen::VectorXd, DecoderState> DecodeStep(const ModelParams &params,
                                                    int32_t prev_token,
                                                    const DecoderState &state);

// Logits over vocab + blank for a single (h_enc, h_dec) pair.
Eigen::VectorXd Joiner(const ModelParams &params,
                       const Eigen::Ref<const Eigen::VectorXd> &h_enc,
                       const Eigen::Ref<const Eigen::VectorXd> &h_dec,
                       const ReferenceEmbedding &ref);

/*
  Forward activations of one utterance under teacher forcing, kept for
  reverse-mode differentiation. Typical use:

    TransducerGraph g(params, text, target, ref_frames);
    LogitsLattice simple = g.SimpleLogits();
    PrunedLogits pruned = g.PrunedJoinerLogits(bounds);  // or FullLogits()
    ... losses ...
    g.Backward(simple_grad, pruned_grad, &grads);

  Backward() uses the node layout of the most recent FullLogits() or
  PrunedJoinerLogits() call.
 */
class TransducerGraph {
 public:
  TransducerGraph(const ModelParams &params, std::span<const int32_t> text,
                  std::span<const int32_t> target,
                  const Eigen::MatrixXd &ref_frames);

  int32_t U() const { return U_; }
  int32_t T() const { return T_; }

  LogitsLattice SimpleLogits() const;
  LogitsLattice FullLogits();
  PrunedLogits PrunedJoinerLogits(const PruneBounds &bounds);

  // Adds parameter gradients into *grads. Either span may be empty to skip
  // that branch.
  void Backward(std::span<const double> simple_grad,
                std::span<const double> joiner_grad, ModelParams *grads) const;

 private:
  struct EncoderBlockCache {
    Eigen::MatrixXd input, xhat, ln_out, pre, act;
    Eigen::RowVectorXd rstd;
  };

  void RunJoiner(std::vector<std::pair<int32_t, int32_t>> nodes, double *out);

  const ModelParams &params_;
  std::vector<int32_t> text_;
  std::vector<int32_t> decoder_inputs_;  // sos, y_1..y_T
  int32_t U_, T_;

  std::vector<EncoderBlockCache> enc_cache_;
  Eigen::MatrixXd h_enc_;        // d x U
  Eigen::MatrixXd dec_in_;       // 2d x (T+1)
  Eigen::MatrixXd dec_gate_;     // d x (T+1)
  Eigen::MatrixXd dec_cand_;     // d x (T+1)
  Eigen::MatrixXd h_dec_;        // d x (T+1)
  Eigen::VectorXd ref_mean_;
  Eigen::VectorXd h_ref_;
  Eigen::VectorXd scale_;        // 1 + W_scale h_ref
  Eigen::MatrixXd joiner_enc_;   // joiner_dim x U, includes bias
  Eigen::MatrixXd joiner_dec_;   // joiner_dim x (T+1)

  std::vector<std::pair<int32_t, int32_t>> nodes_;
  Eigen::MatrixXd node_norm_;    // joiner_dim x N
  Eigen::RowVectorXd node_rstd_;
  Eigen::MatrixXd node_out_;     // tanh output, joiner_dim x N
};

// Teacher-forced lattice of shape (U, T+1, vocab+1).
LogitsLattice FullLogitsLattice(const ModelParams &params,
                                std::span<const int32_t> text,
                                std::span<const int32_t> target,
                                const Eigen::MatrixXd &ref_frames);

// Gradients of every parameter given d loss / d logits of FullLogitsLattice().
ModelParams Backprop(const ModelParams &params, std::span<const int32_t> text,
                     std::span<const int32_t> target,
                     const Eigen::MatrixXd &ref_frames,
                     std::span<const double> grad_logits);

struct AdamOptions {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;

  void Validate() const;
};

struct AdamState {
  ModelParams m, v;
  int64_t step = 0;
};

AdamState InitAdam(const ModelParams &params);

// Increments state->step, then applies the bias-corrected Adam update.
void AdamStep(const ModelParams &grads, const AdamOptions &opts,
              AdamState *state, ModelParams *params);

// {"version":1,"dims":{...},"tensors":{name:[row-major values]},"step":n}
std::string CheckpointToJson(const ModelParams &params, int64_t step);
ModelParams CheckpointFromJson(const std::string &text, int64_t *step);
void SaveCheckpoint(const ModelParams &params, int64_t step,
                    const std::string &path);
ModelParams LoadCheckpoint(const std::string &path, int64_t *step = nullptr);

}  // namespace transduce

#endif  // TRANSDUCE_MODEL_H_
