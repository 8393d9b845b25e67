// src/checks.cc
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

#include "transduce/checks.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "nlohmann/json.hpp"
#include "transduce/config.h"
#include "transduce/lattice.h"
#include "transduce/loss.h"
#include "transduce/model.h"
#include "transduce/pipeline.h"

namespace transduce {

namespace {

using Rng = std::mt19937_64;

int32_t UniformInt(Rng &rng, int32_t lo, int32_t hi) {
  return std::uniform_int_distribution<int32_t>(lo, hi)(rng);
}

std::vector<int32_t> RandomTarget(Rng &rng, int32_t T, int32_t vocab) {
  std::vector<int32_t> y(T);
  for (auto &v : y) v = UniformInt(rng, 0, vocab - 1);
  return y;
}

LogitsLattice RandomLogits(Rng &rng, int32_t U, int32_t T, int32_t vocab,
                           double scale) {
  LogitsLattice logits(U, T, vocab);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto &x : logits.data) x = normal(rng);
  return logits;
}

// Max relative error of `analytic` against central differences of f over
// every entry of `x`.
template <typename F>
double MaxFiniteDifferenceError(std::vector<double> &x,
                                const std::vector<double> &analytic,
                                double floor, F &&f) {
  const double h = kFiniteDifferenceStep;
  double worst = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f();
    x[i] = saved - h;
    const double minus = f();
    x[i] = saved;
    const double numeric = (plus - minus) / (2 * h);
    worst = std::max(worst, RelativeError(analytic[i], numeric, floor));
  }
  return worst;
}

}  // namespace

void CheckReport::Add(std::string name, double value, double threshold) {
  // NaN never passes.
  lines.push_back({std::move(name), value, threshold, value <= threshold});
}

bool CheckReport::AllPass() const {
  return !lines.empty() &&
         std::all_of(lines.begin(), lines.end(),
                     [](const CheckLine &l) { return l.pass; });
}

std::string CheckReport::ToJson() const {
  nlohmann::json j;
  j["version"] = 1;
  j["suite"] = suite;
  j["seed"] = seed;
  j["pass"] = AllPass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &l : lines) {
    nlohmann::json v = std::isfinite(l.value) ? nlohmann::json(l.value)
                                              : nlohmann::json(std::to_string(l.value));
    arr.push_back({{"name", l.name},
                   {"value", v},
                   {"threshold", l.threshold},
                   {"pass", l.pass}});
  }
  j["checks"] = std::move(arr);
  return j.dump(2);
}

std::string CheckReport::ToText() const {
  std::string out;
  char buf[256];
  for (const auto &l : lines) {
    std::snprintf(buf, sizeof(buf), "%-4s %-40s %.3e (<= %.1e)\n",
                  l.pass ? "ok" : "FAIL", l.name.c_str(), l.value, l.threshold);
    out += buf;
  }
  out += std::string(suite) + (AllPass() ? ": pass\n" : ": FAIL\n");
  return out;
}

double RelativeError(double analytic, double numeric, double floor) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

CheckReport RunGradcheck(const GradcheckOptions &opts) {
  CheckReport report;
  report.suite = "gradcheck";
  report.seed = opts.seed;
  Rng rng(opts.seed);

  double exact_worst = 0, pruned_worst = 0;
  for (int32_t n = 0; n < opts.loss_instances; ++n) {
    const int32_t U = UniformInt(rng, 1, 4);
    const int32_t T = UniformInt(rng, 1, 4);
    const int32_t V = UniformInt(rng, 1, 5);
    std::vector<int32_t> y = RandomTarget(rng, T, V);
    LogitsLattice logits = RandomLogits(rng, U, T, V, 1.0);

    LossResult exact = TransducerLoss(logits, y);
    if (opts.inject_fault && n == 0) exact.grad_logits[0] += 1e-2;
    exact_worst = std::max(
        exact_worst,
        MaxFiniteDifferenceError(logits.data, exact.grad_logits, kGradientFloor,
                                 [&] { return TransducerLoss(logits, y).loss; }));

    // Windows from the lattice's own posteriors, anchored so a path survives.
    const int32_t S_min = std::max(2, (T + U - 1) / U + 1);
    const int32_t S = UniformInt(rng, std::min(S_min, T + 1), T + 1);
    PruneBounds bounds = AnchorPruneBounds(ComputePruneBounds(exact.gamma, S), T);
    PrunedLogits pruned = RestrictToBounds(logits, bounds);
    LossResult pl = PrunedTransducerLoss(pruned, y);
    if (!std::isfinite(pl.loss)) {
      pruned_worst = std::numeric_limits<double>::infinity();
      continue;
    }
    pruned_worst = std::max(
        pruned_worst,
        MaxFiniteDifferenceError(pruned.data, pl.grad_logits, kGradientFloor,
                                 [&] { return PrunedTransducerLoss(pruned, y).loss; }));
  }
  report.Add("loss.exact.max_rel_err", exact_worst, kLossGradTolerance);
  report.Add("loss.pruned.max_rel_err", pruned_worst, kLossGradTolerance);

  // End to end: objective of EvaluateUtterance at U = T = 3, alternating
  // full and pruned main losses.
  const ModelDims &dims = opts.model_dims;
  std::vector<std::pair<std::string, double>> per_tensor;
  for (int32_t n = 0; n < opts.model_instances; ++n) {
    ModelParams params = InitParams(dims, opts.seed + 101 * (n + 1));
    const int32_t U = 3, T = 3;
    std::vector<int32_t> text = RandomTarget(rng, U, dims.text_vocab);
    std::vector<int32_t> tokens = RandomTarget(rng, T, dims.vocab);
    Eigen::MatrixXd ref(5, dims.ref_input_dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < ref.size(); ++i) ref.data()[i] = normal(rng);

    LossOptions loss;
    loss.alpha1 = 0.5;
    loss.alpha2 = 1.0;
    loss.prune_range = (n % 2 == 0) ? T + 1 : 2 + (n / 2) % 2;

    ModelParams grads = ZerosLike(params);
    EvaluateUtterance(params, text, tokens, ref, loss, 1.0, &grads);
    std::vector<TensorView> p_views = Tensors(params);
    std::vector<TensorView> g_views = Tensors(grads);
    if (per_tensor.empty()) {
      for (const auto &v : p_views) per_tensor.emplace_back(v.name, 0.0);
    }
    if (opts.inject_fault && n == 0) g_views.back().data[0] += 1e-2;

    for (size_t k = 0; k < p_views.size(); ++k) {
      const TensorView &pv = p_views[k];
      std::vector<double> x(pv.data, pv.data + pv.size());
      std::vector<double> g(g_views[k].data, g_views[k].data + pv.size());
      auto objective = [&] {
        std::copy(x.begin(), x.end(), pv.data);
        return EvaluateUtterance(params, text, tokens, ref, loss, 1.0, nullptr).value;
      };
      double err = MaxFiniteDifferenceError(x, g, kGradientFloor, objective);
      std::copy(x.begin(), x.end(), pv.data);
      per_tensor[k].second = std::max(per_tensor[k].second, err);
    }
  }
  for (const auto &[name, err] : per_tensor) {
    report.Add("model." + name, err, kModelGradTolerance);
  }
  return report;
}

CheckReport RunOracleCheck(const OracleCheckOptions &opts) {
  CheckReport report;
  report.suite = "oracle-check";
  report.seed = opts.seed;
  Rng rng(opts.seed);

  double enum_err = 0, duality_err = 0, diag_err = 0, arc_err = 0;
  for (int32_t n = 0; n < opts.num_lattices; ++n) {
    const int32_t U = UniformInt(rng, 1, opts.max_text);
    const int32_t T = UniformInt(rng, 1, opts.max_tokens);
    const int32_t V = UniformInt(rng, 1, opts.max_vocab);
    std::vector<int32_t> y = RandomTarget(rng, T, V);
    ProbLattice lat = ToProbLattice(RandomLogits(rng, U, T, V, 2.0), y);

    AlphaBeta ab = ForwardBackward(lat);
    enum_err = std::max(enum_err, std::abs(ab.log_likelihood - BruteForceLikelihood(lat)));
    duality_err = std::max(duality_err, std::abs(ab.log_likelihood - ab.beta(0, 0)));

    Occupancy occ = ComputeOccupancy(lat, ab);
    for (int32_t d = 0; d <= U - 1 + T; ++d) {
      double sum = 0;
      for (int32_t u = 0; u < U; ++u) {
        int32_t t = d - u;
        if (t >= 0 && t <= T) sum += occ.gamma(u, t);
      }
      diag_err = std::max(diag_err, std::abs(sum - 1.0));
    }
    // Node posterior equals the posterior mass of its outgoing arcs.
    for (int32_t u = 0; u < U; ++u) {
      for (int32_t t = 0; t <= T; ++t) {
        double out = occ.blank_arc(u, t) + (t < T ? occ.emit_arc(u, t) : 0.0);
        arc_err = std::max(arc_err, std::abs(out - occ.gamma(u, t)));
      }
    }
  }
  report.Add("forward_vs_enumeration.max_abs_err", enum_err, kOracleTolerance);
  report.Add("forward_backward_duality.max_abs_err", duality_err, kOracleTolerance);
  report.Add("antidiagonal_occupancy.max_abs_err", diag_err, kOracleTolerance);
  report.Add("arc_node_occupancy.max_abs_err", arc_err, kOracleTolerance);

  // Widening windows can only add alignments, so the pruned loss must fall
  // monotonically onto the exact loss.
  double increase = 0, below_exact = 0, final_gap = 0;
  for (int32_t n = 0; n < opts.sweep_instances; ++n) {
    const int32_t U = UniformInt(rng, 1, 4);
    const int32_t T = UniformInt(rng, 1, opts.sweep_max_tokens);
    const int32_t V = UniformInt(rng, 1, 5);
    std::vector<int32_t> y = RandomTarget(rng, T, V);
    LogitsLattice logits = RandomLogits(rng, U, T, V, 2.0);
    LossResult exact = TransducerLoss(logits, y);

    PruneBounds base = ComputePruneBounds(exact.gamma, 1);
    double prev = std::numeric_limits<double>::infinity();
    for (int32_t S = 1; S <= T + 1; ++S) {
      PruneBounds bounds = WidenPruneBounds(base, T, S);
      double loss = PrunedTransducerLoss(RestrictToBounds(logits, bounds), y).loss;
      if (loss > prev) increase = std::max(increase, loss - prev);
      if (loss < exact.loss) below_exact = std::max(below_exact, exact.loss - loss);
      prev = loss;
    }
    final_gap = std::max(final_gap, std::abs(prev - exact.loss));
  }
  report.Add("prune_sweep.max_increase", increase, kMonotoneSlack);
  report.Add("prune_sweep.max_below_exact", below_exact, kMonotoneSlack);
  report.Add("prune_sweep.full_window_gap", final_gap, kOracleTolerance);
  return report;
}

}  // namespace transduce
