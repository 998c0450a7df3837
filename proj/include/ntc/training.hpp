#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ntc/adam.hpp"
#include "ntc/common.hpp"
#include "ntc/dataset.hpp"
#include "ntc/net.hpp"
#include "ntc/rng.hpp"

namespace ntc {

// Mean absolute error over one prediction row. grad, when given, receives
// sign(pred - target) / n, the subgradient with 0 at exact ties.
inline double prediction_loss(const double* pred, const float* target, int n, double* grad) {
  double loss = 0;
  for (int i = 0; i < n; ++i) {
    const double d = pred[i] - double(target[i]);
    loss += std::abs(d);
    if (grad) grad[i] = d > 0 ? 1.0 / n : (d < 0 ? -1.0 / n : 0.0);
  }
  return loss / n;
}

// Sum of two 7 way cross entropies over the logit halves. grad, when given,
// receives softmax minus one-hot per head. All zero logits give 2 ln 7.
inline double classification_loss(const double* logit, int i1, int i2, double* grad) {
  double loss = 0;
  for (int head = 0; head < 2; ++head) {
    const int base = head * 7;
    const int label = head == 0 ? i1 : i2;
    double mx = logit[base];
    for (int i = 1; i < 7; ++i) mx = std::max(mx, logit[base + i]);
    double z = 0;
    for (int i = 0; i < 7; ++i) z += std::exp(logit[base + i] - mx);
    loss += std::log(z) - (logit[base + label] - mx);
    if (grad)
      for (int i = 0; i < 7; ++i)
        grad[base + i] = std::exp(logit[base + i] - mx) / z - (i == label ? 1.0 : 0.0);
  }
  return loss;
}

struct TrainConfig {
  int iterations = 20000;
  int batch = 100;
  AdamConfig adam;
  uint64_t seed = 1;
  double holdout_frac = 0.05;
  int eval_every = 1000;
};

struct AccuracyPoint {
  int iteration = 0;
  double acc1 = 0, acc2 = 0;
};

struct TrainResult {
  std::vector<double> loss_curve;  // per iteration batch loss
  std::vector<AccuracyPoint> accuracy;
  double final_acc1 = 0, final_acc2 = 0;
  uint64_t train_count = 0, holdout_count = 0;
};

namespace detail {

inline void fill_batch(const Dataset& ds, const std::vector<uint64_t>& order, size_t start,
                       int nb, Batch& b) {
  const size_t an = size_t(ds.dims.above_n), ln = size_t(ds.dims.left_n);
  b.n = nb;
  b.above.resize(size_t(nb) * an);
  b.left.resize(size_t(nb) * ln);
  for (int s = 0; s < nb; ++s) {
    const uint64_t r = order[start + size_t(s)];
    for (size_t j = 0; j < an; ++j) b.above[size_t(s) * an + j] = double(ds.above[r * an + j]);
    for (size_t j = 0; j < ln; ++j) b.left[size_t(s) * ln + j] = double(ds.left[r * ln + j]);
  }
}

inline int row_argmax7(const double* p) {
  int arg = 0;
  for (int i = 1; i < 7; ++i)
    if (p[i] > p[arg]) arg = i;
  return arg;
}

}  // namespace detail

// Top-1 agreement of each logit head with the recorded best pair labels.
inline AccuracyPoint eval_accuracy(const Model& m, const Dataset& ds,
                                   const std::vector<uint64_t>& idx) {
  AccuracyPoint a;
  if (idx.empty()) return a;
  ForwardCache c;
  Batch b;
  uint64_t hit1 = 0, hit2 = 0;
  const int chunk = 256;
  for (size_t start = 0; start < idx.size(); start += chunk) {
    const int nb = int(std::min(size_t(chunk), idx.size() - start));
    detail::fill_batch(ds, idx, start, nb, b);
    forward(m, b, c);
    for (int s = 0; s < nb; ++s) {
      const double* lg = c.logit.data() + size_t(s) * 14;
      const uint64_t r = idx[start + size_t(s)];
      if (detail::row_argmax7(lg) == int(ds.i1[r])) ++hit1;
      if (detail::row_argmax7(lg + 7) == int(ds.i2[r])) ++hit2;
    }
  }
  a.acc1 = double(hit1) / double(idx.size());
  a.acc2 = double(hit2) / double(idx.size());
  return a;
}

// Joint training: batch mean of MAE plus dual cross entropy with equal
// weights. The seeded shuffle fixes both the holdout split and the batch
// order, so a rerun reproduces the curve exactly.
inline TrainResult train(Model& m, const Dataset& ds, const TrainConfig& cfg) {
  if (ds.count == 0) throw error("cannot train on an empty dataset");
  if (ds.dims.net_h != m.bh || ds.dims.net_w != m.bw)
    throw error("dataset geometry does not match model");

  Rng rng(cfg.seed);
  std::vector<uint64_t> order(ds.count);
  std::iota(order.begin(), order.end(), uint64_t(0));
  rng.shuffle(order);
  uint64_t ho = uint64_t(double(ds.count) * cfg.holdout_frac);
  if (ds.count < 40) ho = 0;
  std::vector<uint64_t> holdout(order.end() - long(ho), order.end());
  order.resize(ds.count - ho);
  if (order.empty()) throw error("no training records after holdout split");

  const int hw = m.bh * m.bw;
  const int nb = int(std::min<uint64_t>(uint64_t(cfg.batch), order.size()));
  Adam opt(m.param_count(), cfg.adam);
  Model grads = make_grad_holder(m);
  ForwardCache c;
  Batch b;
  std::vector<double> dpred, dlogit;
  TrainResult out;
  out.train_count = order.size();
  out.holdout_count = ho;
  out.loss_curve.reserve(size_t(cfg.iterations));

  size_t cursor = 0;
  for (int it = 0; it < cfg.iterations; ++it) {
    if (cursor + size_t(nb) > order.size()) {
      rng.shuffle(order);
      cursor = 0;
    }
    detail::fill_batch(ds, order, cursor, nb, b);
    forward(m, b, c);

    dpred.assign(size_t(nb) * size_t(hw), 0.0);
    dlogit.assign(size_t(nb) * 14, 0.0);
    double loss = 0;
    for (int s = 0; s < nb; ++s) {
      const uint64_t r = order[cursor + size_t(s)];
      loss += prediction_loss(c.pred.data() + size_t(s) * size_t(hw),
                              ds.target.data() + r * size_t(hw), hw,
                              dpred.data() + size_t(s) * size_t(hw));
      loss += classification_loss(c.logit.data() + size_t(s) * 14, int(ds.i1[r]),
                                  int(ds.i2[r]), dlogit.data() + size_t(s) * 14);
    }
    loss /= nb;
    for (double& g : dpred) g /= nb;
    for (double& g : dlogit) g /= nb;

    for (auto sp : grads.params()) std::fill(sp.p, sp.p + sp.n, 0.0);
    backward(m, c, dpred, dlogit, grads);
    opt.step(m.params(), grads.params());
    out.loss_curve.push_back(loss);
    cursor += size_t(nb);

    if (cfg.eval_every > 0 && !holdout.empty() &&
        ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations)) {
      AccuracyPoint a = eval_accuracy(m, ds, holdout);
      a.iteration = it + 1;
      out.accuracy.push_back(a);
    }
  }
  if (!out.accuracy.empty()) {
    out.final_acc1 = out.accuracy.back().acc1;
    out.final_acc2 = out.accuracy.back().acc2;
  }
  return out;
}

// Deterministic split reused by offline evaluations that need the same
// holdout records train() kept aside.
inline std::vector<uint64_t> holdout_indices(uint64_t count, double frac, uint64_t seed) {
  Rng rng(seed);
  std::vector<uint64_t> order(count);
  std::iota(order.begin(), order.end(), uint64_t(0));
  rng.shuffle(order);
  uint64_t ho = uint64_t(double(count) * frac);
  if (count < 40) ho = 0;
  return {order.end() - long(ho), order.end()};
}

}  // namespace ntc
