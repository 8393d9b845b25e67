// src/model.cc
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

#include "transduce/model.h"

#include <cmath>
#include <random>
#include <string>

#include "transduce/errors.h"

namespace transduce {

namespace {

constexpr double kLayerNormEps = 1e-5;

Eigen::MatrixXd Uniform(Eigen::Index rows, Eigen::Index cols, double fan_in,
                        std::mt19937_64 &rng) {
  double bound = 1.0 / std::sqrt(fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill so the draw order matches the checkpoint layout.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

Eigen::VectorXd UniformVec(Eigen::Index n, double fan_in, std::mt19937_64 &rng) {
  return Uniform(n, 1, fan_in, rng);
}

Eigen::ArrayXXd Sigmoid(const Eigen::ArrayXXd &x) {
  return 1.0 / (1.0 + (-x).exp());
}

// Column-wise layer normalization without affine parameters.
void NormalizeColumns(const Eigen::MatrixXd &x, Eigen::MatrixXd *xhat,
                      Eigen::RowVectorXd *rstd) {
  const double n = static_cast<double>(x.rows());
  Eigen::RowVectorXd mean = x.colwise().sum() / n;
  *xhat = x.rowwise() - mean;
  *rstd = ((xhat->array().square().colwise().sum() / n) + kLayerNormEps)
              .rsqrt()
              .matrix();
  *xhat = xhat->array().rowwise() * rstd->array();
}

// Backward of NormalizeColumns: given d/dxhat returns d/dx.
Eigen::MatrixXd NormalizeColumnsBackward(const Eigen::MatrixXd &dxhat,
                                         const Eigen::MatrixXd &xhat,
                                         const Eigen::RowVectorXd &rstd) {
  const double n = static_cast<double>(xhat.rows());
  Eigen::RowVectorXd mean_d = dxhat.colwise().sum() / n;
  Eigen::RowVectorXd mean_dx =
      (dxhat.array() * xhat.array()).colwise().sum().matrix() / n;
  Eigen::ArrayXXd dx = dxhat.array().rowwise() - mean_d.array();
  dx -= xhat.array().rowwise() * mean_dx.array();
  dx.rowwise() *= rstd.array();
  return dx.matrix();
}

void CheckIds(std::span<const int32_t> ids, int32_t limit, const char *what) {
  for (int32_t id : ids) {
    if (id < 0 || id >= limit) {
      throw ConfigError(std::string(what) + " id " + std::to_string(id) +
                        " out of range [0, " + std::to_string(limit) + ")");
    }
  }
}

}  // namespace

void ModelDims::Validate() const {
  if (text_vocab < 1 || vocab < 1 || d_model < 1 || joiner_dim < 2 ||
      ref_input_dim < 1 || ref_dim < 1 || num_encoder_blocks < 0 ||
      ff_multiplier < 1) {
    throw ConfigError("model dimensions must be positive");
  }
}

std::vector<TensorView> Tensors(ModelParams &params) {
  std::vector<TensorView> views;
  VisitTensors(params, [&](const std::string &name, auto &t) {
    views.push_back({name, t.data(), t.rows(), t.cols()});
  });
  return views;
}

ModelParams InitParams(const ModelDims &dims, uint64_t seed) {
  dims.Validate();
  std::mt19937_64 rng(seed);
  const int32_t d = dims.d_model, h = dims.joiner_dim, V1 = dims.vocab + 1;
  const int32_t ff = dims.ff_multiplier * d;

  ModelParams p;
  p.dims = dims;
  p.text_embedding = Uniform(dims.text_vocab, d, 1, rng);
  for (int32_t b = 0; b < dims.num_encoder_blocks; ++b) {
    EncoderBlockParams blk;
    blk.ln_gain = Eigen::VectorXd::Ones(d);
    blk.ln_bias = Eigen::VectorXd::Zero(d);
    blk.ff1_weight = Uniform(ff, d, d, rng);
    blk.ff1_bias = UniformVec(ff, d, rng);
    blk.ff2_weight = Uniform(d, ff, ff, rng);
    blk.ff2_bias = UniformVec(d, ff, rng);
    p.encoder.push_back(std::move(blk));
  }
  p.token_embedding = Uniform(dims.vocab + 2, d, 1, rng);
  p.gate_weight = Uniform(d, 2 * d, 2 * d, rng);
  p.gate_bias = UniformVec(d, 2 * d, rng);
  p.cand_weight = Uniform(d, 2 * d, 2 * d, rng);
  p.cand_bias = UniformVec(d, 2 * d, rng);
  p.ref_weight = Uniform(dims.ref_dim, dims.ref_input_dim, dims.ref_input_dim, rng);
  p.ref_bias = UniformVec(dims.ref_dim, dims.ref_input_dim, rng);
  p.joiner_enc_weight = Uniform(h, d, 2 * d, rng);
  p.joiner_dec_weight = Uniform(h, d, 2 * d, rng);
  p.joiner_bias = UniformVec(h, 2 * d, rng);
  p.cln_scale_weight = Uniform(h, dims.ref_dim, dims.ref_dim, rng);
  p.out_weight = Uniform(V1, h, h, rng);
  p.out_bias = UniformVec(V1, h, rng);
  p.simple_enc_weight = Uniform(V1, d, d, rng);
  p.simple_enc_bias = UniformVec(V1, d, rng);
  p.simple_dec_weight = Uniform(V1, d, d, rng);
  return p;
}

ModelParams ZerosLike(const ModelParams &params) {
  ModelParams z = params;
  VisitTensors(z, [](const std::string &, auto &t) { t.setZero(); });
  return z;
}

int64_t NumParameters(const ModelParams &params) {
  int64_t n = 0;
  VisitTensors(params, [&](const std::string &, const auto &t) { n += t.size(); });
  return n;
}

void AddScaled(const ModelParams &other, double scale, ModelParams *params) {
  std::vector<TensorView> dst = Tensors(*params);
  std::vector<TensorView> src = Tensors(const_cast<ModelParams &>(other));
  if (dst.size() != src.size()) throw ConfigError("parameter sets differ");
  for (size_t i = 0; i != dst.size(); ++i) {
    if (dst[i].size() != src[i].size()) throw ConfigError("parameter sets differ");
    for (Eigen::Index k = 0; k < dst[i].size(); ++k) {
      dst[i].data[k] += scale * src[i].data[k];
    }
  }
}

bool AllFinite(const ModelParams &params) {
  bool ok = true;
  VisitTensors(params, [&](const std::string &, const auto &t) {
    ok = ok && t.allFinite();
  });
  return ok;
}

Eigen::MatrixXd EncodeText(const ModelParams &params,
                           std::span<const int32_t> text) {
  if (text.empty()) throw ConfigError("text must hold at least one symbol");
  CheckIds(text, params.dims.text_vocab, "text symbol");
  const int32_t U = static_cast<int32_t>(text.size());
  Eigen::MatrixXd x(params.dims.d_model, U);
  for (int32_t u = 0; u < U; ++u) {
    x.col(u) = params.text_embedding.row(text[u]).transpose();
  }
  for (const auto &blk : params.encoder) {
    Eigen::MatrixXd xhat;
    Eigen::RowVectorXd rstd;
    NormalizeColumns(x, &xhat, &rstd);
    Eigen::MatrixXd ln =
        (xhat.array().colwise() * blk.ln_gain.array()).colwise() +
        blk.ln_bias.array();
    Eigen::ArrayXXd pre = ((blk.ff1_weight * ln).colwise() + blk.ff1_bias).array();
    Eigen::MatrixXd act = (pre * Sigmoid(pre)).matrix();
    x += (blk.ff2_weight * act).colwise() + blk.ff2_bias;
  }
  return x;
}

ReferenceEmbedding EncodeReference(const ModelParams &params,
                                   const Eigen::MatrixXd &ref_frames) {
  if (ref_frames.rows() < 1) throw ConfigError("reference has no frames");
  if (ref_frames.cols() != params.dims.ref_input_dim) {
    throw ConfigError("reference frame dimension " +
                      std::to_string(ref_frames.cols()) + " != " +
                      std::to_string(params.dims.ref_input_dim));
  }
  Eigen::VectorXd mean = ref_frames.colwise().mean().transpose();
  return {params.ref_weight * mean + params.ref_bias};
}

DecoderState InitialDecoderState(const ModelDims &dims) {
  return {Eigen::VectorXd::Zero(dims.d_model), dims.SosId()};
}

std::pair<Eigen::VectorXd, DecoderState> DecodeStep(const ModelParams &params,
                                                    int32_t prev_token,
                                                    const DecoderState &state) {
  const auto &dims = params.dims;
  if (prev_token == dims.BlankId()) {
    throw ConfigError("blank is never fed to the decoder");
  }
  if (prev_token < 0 || prev_token > dims.SosId()) {
    throw ConfigError("decoder input id out of range");
  }
  const int32_t d = dims.d_model;
  if (state.hidden.size() != d) throw ConfigError("decoder state has wrong size");
  Eigen::VectorXd in(2 * d);
  in << params.token_embedding.row(prev_token).transpose(), state.hidden;
  Eigen::ArrayXd z =
      Sigmoid((params.gate_weight * in + params.gate_bias).array());
  Eigen::ArrayXd c = (params.cand_weight * in + params.cand_bias).array().tanh();
  Eigen::VectorXd h = ((1 - z) * state.hidden.array() + z * c).matrix();
  return {h, DecoderState{h, prev_token}};
}

Eigen::VectorXd Joiner(const ModelParams &params,
                       const Eigen::Ref<const Eigen::VectorXd> &h_enc,
                       const Eigen::Ref<const Eigen::VectorXd> &h_dec,
                       const ReferenceEmbedding &ref) {
  const auto &dims = params.dims;
  if (h_enc.size() != dims.d_model || h_dec.size() != dims.d_model ||
      ref.h_ref.size() != dims.ref_dim) {
    throw ConfigError("joiner input shapes do not match the model");
  }
  Eigen::MatrixXd a = params.joiner_enc_weight * h_enc +
                      params.joiner_dec_weight * h_dec + params.joiner_bias;
  Eigen::MatrixXd norm;
  Eigen::RowVectorXd rstd;
  NormalizeColumns(a, &norm, &rstd);
  Eigen::VectorXd scale =
      Eigen::VectorXd::Ones(dims.joiner_dim) + params.cln_scale_weight * ref.h_ref;
  Eigen::VectorXd o = (norm.array() * scale.array()).tanh().matrix();
  return params.out_weight * o + params.out_bias;
}

TransducerGraph::TransducerGraph(const ModelParams &params,
                                 std::span<const int32_t> text,
                                 std::span<const int32_t> target,
                                 const Eigen::MatrixXd &ref_frames)
    : params_(params),
      text_(text.begin(), text.end()),
      U_(static_cast<int32_t>(text.size())),
      T_(static_cast<int32_t>(target.size())) {
  const auto &dims = params.dims;
  CheckIds(target, dims.vocab, "target token");

  if (U_ < 1) throw ConfigError("text must hold at least one symbol");
  CheckIds(text, dims.text_vocab, "text symbol");

  // Text encoder.
  h_enc_.resize(dims.d_model, U_);
  for (int32_t u = 0; u < U_; ++u) {
    h_enc_.col(u) = params.text_embedding.row(text_[u]).transpose();
  }
  for (const auto &blk : params.encoder) {
    EncoderBlockCache c;
    c.input = h_enc_;
    NormalizeColumns(c.input, &c.xhat, &c.rstd);
    c.ln_out = (c.xhat.array().colwise() * blk.ln_gain.array()).colwise() +
               blk.ln_bias.array();
    c.pre = (blk.ff1_weight * c.ln_out).colwise() + blk.ff1_bias;
    c.act = (c.pre.array() * Sigmoid(c.pre.array())).matrix();
    h_enc_ += (blk.ff2_weight * c.act).colwise() + blk.ff2_bias;
    enc_cache_.push_back(std::move(c));
  }

  // Token decoder under teacher forcing: inputs sos, y_1, ..., y_T.
  const int32_t d = dims.d_model;
  decoder_inputs_.push_back(dims.SosId());
  decoder_inputs_.insert(decoder_inputs_.end(), target.begin(), target.end());
  dec_in_.resize(2 * d, T_ + 1);
  dec_gate_.resize(d, T_ + 1);
  dec_cand_.resize(d, T_ + 1);
  h_dec_.resize(d, T_ + 1);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
  for (int32_t t = 0; t <= T_; ++t) {
    dec_in_.col(t) << params.token_embedding.row(decoder_inputs_[t]).transpose(), h;
    Eigen::ArrayXd z =
        Sigmoid((params.gate_weight * dec_in_.col(t) + params.gate_bias).array());
    Eigen::ArrayXd c =
        (params.cand_weight * dec_in_.col(t) + params.cand_bias).array().tanh();
    h = ((1 - z) * h.array() + z * c).matrix();
    dec_gate_.col(t) = z.matrix();
    dec_cand_.col(t) = c.matrix();
    h_dec_.col(t) = h;
  }

  // Reference encoder.
  if (ref_frames.rows() < 1) throw ConfigError("reference has no frames");
  if (ref_frames.cols() != dims.ref_input_dim) {
    throw ConfigError("reference frame dimension mismatch");
  }
  ref_mean_ = ref_frames.colwise().mean().transpose();
  h_ref_ = params.ref_weight * ref_mean_ + params.ref_bias;
  scale_ = Eigen::VectorXd::Ones(dims.joiner_dim) + params.cln_scale_weight * h_ref_;

  joiner_enc_ = (params.joiner_enc_weight * h_enc_).colwise() + params.joiner_bias;
  joiner_dec_ = params.joiner_dec_weight * h_dec_;
}

LogitsLattice TransducerGraph::SimpleLogits() const {
  Eigen::MatrixXd enc =
      ((params_.simple_enc_weight * h_enc_).colwise() + params_.simple_enc_bias)
          .transpose();
  Eigen::MatrixXd dec = (params_.simple_dec_weight * h_dec_).transpose();
  return SimpleJoinerLogits(enc, dec);
}

void TransducerGraph::RunJoiner(std::vector<std::pair<int32_t, int32_t>> nodes,
                                double *out) {
  nodes_ = std::move(nodes);
  const Eigen::Index N = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd a(params_.dims.joiner_dim, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    a.col(n) = joiner_enc_.col(nodes_[n].first) + joiner_dec_.col(nodes_[n].second);
  }
  NormalizeColumns(a, &node_norm_, &node_rstd_);
  node_out_ = (node_norm_.array().colwise() * scale_.array()).tanh().matrix();
  Eigen::Map<Eigen::MatrixXd> logits(out, params_.dims.vocab + 1, N);
  logits = (params_.out_weight * node_out_).colwise() + params_.out_bias;
}

LogitsLattice TransducerGraph::FullLogits() {
  LogitsLattice lat(U_, T_, params_.dims.vocab);
  std::vector<std::pair<int32_t, int32_t>> nodes;
  nodes.reserve(static_cast<size_t>(U_) * (T_ + 1));
  for (int32_t u = 0; u < U_; ++u) {
    for (int32_t t = 0; t <= T_; ++t) nodes.emplace_back(u, t);
  }
  RunJoiner(std::move(nodes), lat.data.data());
  return lat;
}

PrunedLogits TransducerGraph::PrunedJoinerLogits(const PruneBounds &bounds) {
  PrunedLogits lat(U_, T_, params_.dims.vocab, bounds);
  std::vector<std::pair<int32_t, int32_t>> nodes;
  nodes.reserve(static_cast<size_t>(U_) * lat.Width());
  for (int32_t u = 0; u < U_; ++u) {
    for (int32_t j = 0; j < lat.Width(); ++j) {
      nodes.emplace_back(u, lat.TokenIndex(u, j));
    }
  }
  RunJoiner(std::move(nodes), lat.data.data());
  return lat;
}

void TransducerGraph::Backward(std::span<const double> simple_grad,
                               std::span<const double> joiner_grad,
                               ModelParams *grads) const {
  const auto &p = params_;
  const auto &dims = p.dims;
  const int32_t V1 = dims.vocab + 1;
  const int32_t d = dims.d_model;

  Eigen::MatrixXd d_enc = Eigen::MatrixXd::Zero(d, U_);
  Eigen::MatrixXd d_dec = Eigen::MatrixXd::Zero(d, T_ + 1);

  if (!simple_grad.empty()) {
    if (simple_grad.size() != static_cast<size_t>(U_) * (T_ + 1) * V1) {
      throw ConfigError("simple gradient has the wrong size");
    }
    Eigen::MatrixXd d_enc_proj = Eigen::MatrixXd::Zero(V1, U_);
    Eigen::MatrixXd d_dec_proj = Eigen::MatrixXd::Zero(V1, T_ + 1);
    Eigen::Map<const Eigen::MatrixXd> g(simple_grad.data(), V1,
                                        static_cast<Eigen::Index>(U_) * (T_ + 1));
    for (int32_t u = 0; u < U_; ++u) {
      for (int32_t t = 0; t <= T_; ++t) {
        auto col = g.col(static_cast<Eigen::Index>(u) * (T_ + 1) + t);
        d_enc_proj.col(u) += col;
        d_dec_proj.col(t) += col;
      }
    }
    grads->simple_enc_weight += d_enc_proj * h_enc_.transpose();
    grads->simple_enc_bias += d_enc_proj.rowwise().sum();
    grads->simple_dec_weight += d_dec_proj * h_dec_.transpose();
    d_enc += p.simple_enc_weight.transpose() * d_enc_proj;
    d_dec += p.simple_dec_weight.transpose() * d_dec_proj;
  }

  if (!joiner_grad.empty()) {
    const Eigen::Index N = static_cast<Eigen::Index>(nodes_.size());
    if (joiner_grad.size() != static_cast<size_t>(N) * V1) {
      throw ConfigError("joiner gradient does not match the last joiner call");
    }
    Eigen::Map<const Eigen::MatrixXd> g(joiner_grad.data(), V1, N);
    grads->out_weight += g * node_out_.transpose();
    grads->out_bias += g.rowwise().sum();
    Eigen::ArrayXXd d_pre_tanh =
        (p.out_weight.transpose() * g).array() * (1 - node_out_.array().square());
    Eigen::VectorXd d_scale =
        (d_pre_tanh * node_norm_.array()).rowwise().sum().matrix();
    Eigen::MatrixXd d_norm = (d_pre_tanh.colwise() * scale_.array()).matrix();
    Eigen::MatrixXd d_a = NormalizeColumnsBackward(d_norm, node_norm_, node_rstd_);

    Eigen::MatrixXd d_jenc = Eigen::MatrixXd::Zero(dims.joiner_dim, U_);
    Eigen::MatrixXd d_jdec = Eigen::MatrixXd::Zero(dims.joiner_dim, T_ + 1);
    for (Eigen::Index n = 0; n < N; ++n) {
      d_jenc.col(nodes_[n].first) += d_a.col(n);
      d_jdec.col(nodes_[n].second) += d_a.col(n);
    }
    grads->joiner_enc_weight += d_jenc * h_enc_.transpose();
    grads->joiner_bias += d_jenc.rowwise().sum();
    grads->joiner_dec_weight += d_jdec * h_dec_.transpose();
    d_enc += p.joiner_enc_weight.transpose() * d_jenc;
    d_dec += p.joiner_dec_weight.transpose() * d_jdec;

    grads->cln_scale_weight += d_scale * h_ref_.transpose();
    Eigen::VectorXd d_ref = p.cln_scale_weight.transpose() * d_scale;
    grads->ref_weight += d_ref * ref_mean_.transpose();
    grads->ref_bias += d_ref;
  }

  // Decoder, back through time.
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(d);
  for (int32_t t = T_; t >= 0; --t) {
    Eigen::ArrayXd dh = (d_dec.col(t) + dh_next).array();
    Eigen::ArrayXd z = dec_gate_.col(t).array();
    Eigen::ArrayXd c = dec_cand_.col(t).array();
    Eigen::ArrayXd h_prev = dec_in_.col(t).tail(d).array();
    Eigen::VectorXd dz_pre = (dh * (c - h_prev) * z * (1 - z)).matrix();
    Eigen::VectorXd dc_pre = (dh * z * (1 - c.square())).matrix();
    grads->gate_weight += dz_pre * dec_in_.col(t).transpose();
    grads->gate_bias += dz_pre;
    grads->cand_weight += dc_pre * dec_in_.col(t).transpose();
    grads->cand_bias += dc_pre;
    Eigen::VectorXd d_in = p.gate_weight.transpose() * dz_pre +
                           p.cand_weight.transpose() * dc_pre;
    grads->token_embedding.row(decoder_inputs_[t]) += d_in.head(d).transpose();
    dh_next = (dh * (1 - z)).matrix() + d_in.tail(d);
  }

  // Encoder blocks in reverse.
  Eigen::MatrixXd dx = d_enc;
  for (int32_t b = static_cast<int32_t>(p.encoder.size()) - 1; b >= 0; --b) {
    const auto &blk = p.encoder[b];
    const auto &c = enc_cache_[b];
    auto &gb = grads->encoder[b];
    gb.ff2_weight += dx * c.act.transpose();
    gb.ff2_bias += dx.rowwise().sum();
    Eigen::ArrayXXd sig = Sigmoid(c.pre.array());
    Eigen::MatrixXd d_pre = ((blk.ff2_weight.transpose() * dx).array() * sig *
                             (1 + c.pre.array() * (1 - sig)))
                                .matrix();
    gb.ff1_weight += d_pre * c.ln_out.transpose();
    gb.ff1_bias += d_pre.rowwise().sum();
    Eigen::MatrixXd d_ln = blk.ff1_weight.transpose() * d_pre;
    gb.ln_gain += (d_ln.array() * c.xhat.array()).rowwise().sum().matrix();
    gb.ln_bias += d_ln.rowwise().sum();
    Eigen::MatrixXd d_xhat = (d_ln.array().colwise() * blk.ln_gain.array()).matrix();
    dx += NormalizeColumnsBackward(d_xhat, c.xhat, c.rstd);
  }
  for (int32_t u = 0; u < U_; ++u) {
    grads->text_embedding.row(text_[u]) += dx.col(u).transpose();
  }
}

LogitsLattice FullLogitsLattice(const ModelParams &params,
                                std::span<const int32_t> text,
                                std::span<const int32_t> target,
                                const Eigen::MatrixXd &ref_frames) {
  TransducerGraph graph(params, text, target, ref_frames);
  return graph.FullLogits();
}

ModelParams Backprop(const ModelParams &params, std::span<const int32_t> text,
                     std::span<const int32_t> target,
                     const Eigen::MatrixXd &ref_frames,
                     std::span<const double> grad_logits) {
  TransducerGraph graph(params, text, target, ref_frames);
  graph.FullLogits();
  ModelParams grads = ZerosLike(params);
  graph.Backward({}, grad_logits, &grads);
  return grads;
}

void AdamOptions::Validate() const {
  if (!(lr > 0)) throw ConfigError("learning rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw ConfigError("Adam epsilon must be > 0");
}

AdamState InitAdam(const ModelParams &params) {
  return {ZerosLike(params), ZerosLike(params), 0};
}

void AdamStep(const ModelParams &grads, const AdamOptions &opts,
              AdamState *state, ModelParams *params) {
  opts.Validate();
  ++state->step;
  const double c1 = 1 - std::pow(opts.beta1, static_cast<double>(state->step));
  const double c2 = 1 - std::pow(opts.beta2, static_cast<double>(state->step));
  std::vector<TensorView> w = Tensors(*params);
  std::vector<TensorView> g = Tensors(const_cast<ModelParams &>(grads));
  std::vector<TensorView> m = Tensors(state->m);
  std::vector<TensorView> v = Tensors(state->v);
  if (g.size() != w.size() || m.size() != w.size() || v.size() != w.size()) {
    throw ConfigError("optimizer state does not match the parameters");
  }
  for (size_t i = 0; i != w.size(); ++i) {
    if (g[i].size() != w[i].size()) {
      throw ConfigError("gradient shape mismatch for " + w[i].name);
    }
    for (Eigen::Index k = 0; k < w[i].size(); ++k) {
      double gk = g[i].data[k];
      m[i].data[k] = opts.beta1 * m[i].data[k] + (1 - opts.beta1) * gk;
      v[i].data[k] = opts.beta2 * v[i].data[k] + (1 - opts.beta2) * gk * gk;
      double m_hat = m[i].data[k] / c1;
      double v_hat = v[i].data[k] / c2;
      w[i].data[k] -= opts.lr * m_hat / (std::sqrt(v_hat) + opts.eps);
    }
  }
}

}  // namespace transduce
