#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ntc/common.hpp"
#include "ntc/context.hpp"
#include "ntc/gemm.hpp"
#include "ntc/rng.hpp"

namespace ntc {

constexpr double kLeakySlope = 0.01;

struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    size_t n = 1;
    for (int d : shape) n *= size_t(d);
    data.assign(n, 0.0);
  }
  size_t numel() const { return data.size(); }
  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline std::vector<double> softmax(const std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double sum = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

// ---- layers ----------------------------------------------------------------

struct FcLayer {
  int out_dim = 0, in_dim = 0;
  std::vector<double> w;  // out x in
  std::vector<double> b;  // out

  void alloc() {
    w.assign(size_t(out_dim) * size_t(in_dim), 0.0);
    b.assign(size_t(out_dim), 0.0);
  }
};

struct ConvLayer {
  int in_ch = 0, out_ch = 0, kh = 3, kw = 3, sh = 1, sw = 1;
  int in_h = 0, in_w = 0;
  int out_h = 0, out_w = 0, pad_t = 0, pad_l = 0;
  std::vector<double> w;  // out_ch x in_ch x kh x kw
  std::vector<double> b;  // out_ch

  // out = ceil(in / stride); pad split with the extra row/col at the end.
  void derive() {
    out_h = (in_h + sh - 1) / sh;
    out_w = (in_w + sw - 1) / sw;
    int th = std::max((out_h - 1) * sh + kh - in_h, 0);
    int tw = std::max((out_w - 1) * sw + kw - in_w, 0);
    pad_t = th / 2;
    pad_l = tw / 2;
  }
  void alloc() {
    w.assign(size_t(out_ch) * size_t(in_ch) * size_t(kh) * size_t(kw), 0.0);
    b.assign(size_t(out_ch), 0.0);
  }
  size_t in_size() const { return size_t(in_ch) * size_t(in_h) * size_t(in_w); }
  size_t out_size() const { return size_t(out_ch) * size_t(out_h) * size_t(out_w); }
};

inline void im2col(const double* x, const ConvLayer& l, double* cols) {
  const int K = l.in_ch * l.kh * l.kw, P = l.out_h * l.out_w;
  for (int c = 0; c < l.in_ch; ++c)
    for (int i = 0; i < l.kh; ++i)
      for (int j = 0; j < l.kw; ++j) {
        double* row = cols + size_t((c * l.kh + i) * l.kw + j) * size_t(P);
        for (int oy = 0; oy < l.out_h; ++oy) {
          int iy = oy * l.sh - l.pad_t + i;
          for (int ox = 0; ox < l.out_w; ++ox) {
            int ix = ox * l.sw - l.pad_l + j;
            row[oy * l.out_w + ox] =
                (iy >= 0 && iy < l.in_h && ix >= 0 && ix < l.in_w)
                    ? x[size_t(c) * size_t(l.in_h) * size_t(l.in_w) + size_t(iy) * size_t(l.in_w) + size_t(ix)]
                    : 0.0;
          }
        }
      }
  (void)K;
}

inline void col2im_add(const double* cols, const ConvLayer& l, double* dx) {
  const int P = l.out_h * l.out_w;
  for (int c = 0; c < l.in_ch; ++c)
    for (int i = 0; i < l.kh; ++i)
      for (int j = 0; j < l.kw; ++j) {
        const double* row = cols + size_t((c * l.kh + i) * l.kw + j) * size_t(P);
        for (int oy = 0; oy < l.out_h; ++oy) {
          int iy = oy * l.sh - l.pad_t + i;
          if (iy < 0 || iy >= l.in_h) continue;
          for (int ox = 0; ox < l.out_w; ++ox) {
            int ix = ox * l.sw - l.pad_l + j;
            if (ix < 0 || ix >= l.in_w) continue;
            dx[size_t(c) * size_t(l.in_h) * size_t(l.in_w) + size_t(iy) * size_t(l.in_w) + size_t(ix)] +=
                row[oy * l.out_w + ox];
          }
        }
      }
}

// ---- model -----------------------------------------------------------------

enum class ArchKind : uint8_t { fc = 0, conv = 1 };

// One f_{h,w}. Thin blocks use two wide FC layers over the flattened context;
// 16x16 and 32x32 run a conv stack per context strip, merge, then one FC. Both
// heads read the last shared representation.
struct Model {
  int bh = 0, bw = 0;
  ArchKind kind = ArchKind::fc;
  int above_h = 0, above_w = 0, left_h = 0, left_w = 0;

  FcLayer fc1, fc2;                         // fc path
  std::array<ConvLayer, 4> above_conv{};    // conv path
  std::array<ConvLayer, 4> left_conv{};
  FcLayer trunk;
  FcLayer head_pred, head_logit;

  int penultimate_width() const { return kind == ArchKind::fc ? fc2.out_dim : trunk.out_dim; }

  struct Span {
    double* p;
    size_t n;
  };
  std::vector<Span> params() {
    std::vector<Span> v;
    auto add = [&](std::vector<double>& x) { v.push_back({x.data(), x.size()}); };
    if (kind == ArchKind::fc) {
      add(fc1.w);
      add(fc1.b);
      add(fc2.w);
      add(fc2.b);
    } else {
      for (auto& l : above_conv) {
        add(l.w);
        add(l.b);
      }
      for (auto& l : left_conv) {
        add(l.w);
        add(l.b);
      }
      add(trunk.w);
      add(trunk.b);
    }
    add(head_pred.w);
    add(head_pred.b);
    add(head_logit.w);
    add(head_logit.b);
    return v;
  }
  size_t param_count() {
    size_t n = 0;
    for (auto& s : params()) n += s.n;
    return n;
  }
};

inline bool is_trained_size(int bh, int bw) {
  return (bh == 4 && (bw == 4 || bw == 8 || bw == 16 || bw == 32)) ||
         (bh == 8 && (bw == 8 || bw == 16)) || (bh == 16 && bw == 16) ||
         (bh == 32 && bw == 32);
}

inline const std::array<std::pair<int, int>, 8>& trained_sizes() {
  static const std::array<std::pair<int, int>, 8> s = {
      {{4, 4}, {4, 8}, {4, 16}, {4, 32}, {8, 8}, {8, 16}, {16, 16}, {32, 32}}};
  return s;
}

inline Model build_model(int bh, int bw) {
  if (!is_trained_size(bh, bw)) throw error("no architecture for this block size");
  Model m;
  m.bh = bh;
  m.bw = bw;
  auto [n_a, n_l] = context_shape(bh, bw);
  m.above_h = n_a;
  m.above_w = n_l + bw;
  m.left_h = bh;
  m.left_w = n_l;
  if (std::min(bh, bw) <= 8) {
    m.kind = ArchKind::fc;
    int in = m.above_h * m.above_w + m.left_h * m.left_w;
    m.fc1 = {1200, in};
    m.fc2 = {1200, 1200};
    m.fc1.alloc();
    m.fc2.alloc();
  } else {
    m.kind = ArchKind::conv;
    const int filters[4] = {32, 64, 128, 128};
    const bool big = bh == 32;
    // strides per layer; the 16x16 net stops shrinking one axis late in each
    // branch, the 32x32 net halves both axes everywhere.
    const int a_sh[4] = {2, 2, big ? 2 : 1, big ? 2 : 1};
    const int a_sw[4] = {2, 2, 2, 2};
    const int l_sh[4] = {2, 2, 2, 2};
    const int l_sw[4] = {2, 2, big ? 2 : 1, big ? 2 : 1};
    int ch = 1, hh = m.above_h, ww = m.above_w;
    for (int i = 0; i < 4; ++i) {
      auto& l = m.above_conv[size_t(i)];
      l.in_ch = ch;
      l.out_ch = filters[i];
      l.sh = a_sh[i];
      l.sw = a_sw[i];
      l.in_h = hh;
      l.in_w = ww;
      l.derive();
      l.alloc();
      ch = l.out_ch;
      hh = l.out_h;
      ww = l.out_w;
    }
    int flat_above = ch * hh * ww;
    ch = 1;
    hh = m.left_h;
    ww = m.left_w;
    for (int i = 0; i < 4; ++i) {
      auto& l = m.left_conv[size_t(i)];
      l.in_ch = ch;
      l.out_ch = filters[i];
      l.sh = l_sh[i];
      l.sw = l_sw[i];
      l.in_h = hh;
      l.in_w = ww;
      l.derive();
      l.alloc();
      ch = l.out_ch;
      hh = l.out_h;
      ww = l.out_w;
    }
    int flat_left = ch * hh * ww;
    m.trunk = {big ? 1024 : 500, flat_above + flat_left};
    m.trunk.alloc();
  }
  m.head_pred = {bh * bw, m.penultimate_width()};
  m.head_logit = {14, m.penultimate_width()};
  m.head_pred.alloc();
  m.head_logit.alloc();
  return m;
}

// Glorot uniform on weights, zero biases, one fixed draw order.
inline void init_weights(Model& m, uint64_t seed) {
  Rng rng(seed);
  auto fc = [&](FcLayer& l) {
    double a = std::sqrt(6.0 / double(l.in_dim + l.out_dim));
    for (double& x : l.w) x = rng.uniform(-a, a);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  };
  auto cv = [&](ConvLayer& l) {
    double a = std::sqrt(6.0 / double((l.in_ch + l.out_ch) * l.kh * l.kw));
    for (double& x : l.w) x = rng.uniform(-a, a);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  };
  if (m.kind == ArchKind::fc) {
    fc(m.fc1);
    fc(m.fc2);
  } else {
    for (auto& l : m.above_conv) cv(l);
    for (auto& l : m.left_conv) cv(l);
    fc(m.trunk);
  }
  fc(m.head_pred);
  fc(m.head_logit);
}

inline Model make_grad_holder(const Model& m) {
  Model g = m;
  for (auto s : g.params()) std::fill(s.p, s.p + s.n, 0.0);
  return g;
}

// ---- forward / backward ----------------------------------------------------

struct Batch {
  int n = 0;
  std::vector<double> above;  // n * above_h*above_w
  std::vector<double> left;   // n * left_h*left_w
};

struct ForwardCache {
  const Model* model = nullptr;
  int n = 0;
  std::vector<double> x;              // fc concat input
  std::vector<double> z1, a1, z2, a2;
  std::vector<double> above_in, left_in;              // conv raw inputs
  std::array<std::vector<double>, 4> az, aa, lz, la;  // conv pre/post per layer
  std::vector<double> concat;
  std::vector<double> zt, at;
  std::vector<double> pred;   // n x bh*bw
  std::vector<double> logit;  // n x 14
};

namespace detail {

inline void fc_forward(const FcLayer& l, const double* x, int n, double* z) {
  gemm_rm(false, true, n, l.out_dim, l.in_dim, 1.0, x, l.in_dim, l.w.data(), l.in_dim, 0.0, z,
          l.out_dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < l.out_dim; ++j) z[size_t(i) * size_t(l.out_dim) + size_t(j)] += l.b[size_t(j)];
}

inline void lrelu(const double* z, double* a, size_t n) {
  for (size_t i = 0; i < n; ++i) a[i] = z[i] > 0 ? z[i] : kLeakySlope * z[i];
}

inline void lrelu_back(const double* z, const double* da, double* dz, size_t n) {
  for (size_t i = 0; i < n; ++i) dz[i] = da[i] * (z[i] > 0 ? 1.0 : kLeakySlope);
}

// dW += dZ^T X ; db += column sums ; dX = dZ W (optional)
inline void fc_backward(const FcLayer& l, const double* x, const double* dz, int n, FcLayer& gl,
                        double* dx, double beta_dx) {
  gemm_rm(true, false, l.out_dim, l.in_dim, n, 1.0, dz, l.out_dim, x, l.in_dim, 1.0,
          gl.w.data(), l.in_dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < l.out_dim; ++j) gl.b[size_t(j)] += dz[size_t(i) * size_t(l.out_dim) + size_t(j)];
  if (dx)
    gemm_rm(false, false, n, l.in_dim, l.out_dim, 1.0, dz, l.out_dim, l.w.data(), l.in_dim,
            beta_dx, dx, l.in_dim);
}

inline void conv_forward(const ConvLayer& l, const double* x, int n, double* z,
                         std::vector<double>& scratch) {
  const int K = l.in_ch * l.kh * l.kw, P = l.out_h * l.out_w;
  scratch.resize(size_t(K) * size_t(P));
  for (int s = 0; s < n; ++s) {
    const double* xs = x + size_t(s) * l.in_size();
    double* zs = z + size_t(s) * l.out_size();
    im2col(xs, l, scratch.data());
    gemm_rm(false, false, l.out_ch, P, K, 1.0, l.w.data(), K, scratch.data(), P, 0.0, zs, P);
    for (int c = 0; c < l.out_ch; ++c)
      for (int p = 0; p < P; ++p) zs[size_t(c) * size_t(P) + size_t(p)] += l.b[size_t(c)];
  }
}

inline void conv_backward(const ConvLayer& l, const double* x, const double* dz, int n,
                          ConvLayer& gl, double* dx, std::vector<double>& scratch,
                          std::vector<double>& scratch2) {
  const int K = l.in_ch * l.kh * l.kw, P = l.out_h * l.out_w;
  scratch.resize(size_t(K) * size_t(P));
  scratch2.resize(size_t(K) * size_t(P));
  if (dx) std::fill(dx, dx + size_t(n) * l.in_size(), 0.0);
  for (int s = 0; s < n; ++s) {
    const double* xs = x + size_t(s) * l.in_size();
    const double* dzs = dz + size_t(s) * l.out_size();
    im2col(xs, l, scratch.data());
    gemm_rm(false, true, l.out_ch, K, P, 1.0, dzs, P, scratch.data(), P, 1.0, gl.w.data(), K);
    for (int c = 0; c < l.out_ch; ++c)
      for (int p = 0; p < P; ++p) gl.b[size_t(c)] += dzs[size_t(c) * size_t(P) + size_t(p)];
    if (dx) {
      gemm_rm(true, false, K, P, l.out_ch, 1.0, l.w.data(), K, dzs, P, 0.0, scratch2.data(), P);
      col2im_add(scratch2.data(), l, dx + size_t(s) * l.in_size());
    }
  }
}

}  // namespace detail

inline void forward(const Model& m, const Batch& in, ForwardCache& c) {
  const size_t asz = size_t(m.above_h) * size_t(m.above_w);
  const size_t lsz = size_t(m.left_h) * size_t(m.left_w);
  if (in.above.size() != size_t(in.n) * asz) throw net_error(0, "above input size mismatch");
  if (in.left.size() != size_t(in.n) * lsz) throw net_error(0, "left input size mismatch");
  c.model = &m;
  c.n = in.n;
  const int n = in.n;
  const double* pen = nullptr;
  if (m.kind == ArchKind::fc) {
    const size_t ind = asz + lsz;
    c.x.resize(size_t(n) * ind);
    for (int s = 0; s < n; ++s) {
      std::copy_n(in.above.data() + size_t(s) * asz, asz, c.x.data() + size_t(s) * ind);
      std::copy_n(in.left.data() + size_t(s) * lsz, lsz, c.x.data() + size_t(s) * ind + asz);
    }
    c.z1.resize(size_t(n) * 1200);
    c.a1.resize(size_t(n) * 1200);
    c.z2.resize(size_t(n) * 1200);
    c.a2.resize(size_t(n) * 1200);
    detail::fc_forward(m.fc1, c.x.data(), n, c.z1.data());
    detail::lrelu(c.z1.data(), c.a1.data(), c.z1.size());
    detail::fc_forward(m.fc2, c.a1.data(), n, c.z2.data());
    detail::lrelu(c.z2.data(), c.a2.data(), c.z2.size());
    pen = c.a2.data();
  } else {
    std::vector<double> scratch;
    c.above_in = in.above;
    c.left_in = in.left;
    const double* cur = c.above_in.data();
    for (int i = 0; i < 4; ++i) {
      const auto& l = m.above_conv[size_t(i)];
      c.az[size_t(i)].resize(size_t(n) * l.out_size());
      c.aa[size_t(i)].resize(size_t(n) * l.out_size());
      detail::conv_forward(l, cur, n, c.az[size_t(i)].data(), scratch);
      detail::lrelu(c.az[size_t(i)].data(), c.aa[size_t(i)].data(), c.az[size_t(i)].size());
      cur = c.aa[size_t(i)].data();
    }
    cur = c.left_in.data();
    for (int i = 0; i < 4; ++i) {
      const auto& l = m.left_conv[size_t(i)];
      c.lz[size_t(i)].resize(size_t(n) * l.out_size());
      c.la[size_t(i)].resize(size_t(n) * l.out_size());
      detail::conv_forward(l, cur, n, c.lz[size_t(i)].data(), scratch);
      detail::lrelu(c.lz[size_t(i)].data(), c.la[size_t(i)].data(), c.lz[size_t(i)].size());
      cur = c.la[size_t(i)].data();
    }
    const size_t fa = m.above_conv[3].out_size(), fl = m.left_conv[3].out_size();
    c.concat.resize(size_t(n) * (fa + fl));
    for (int s = 0; s < n; ++s) {
      std::copy_n(c.aa[3].data() + size_t(s) * fa, fa, c.concat.data() + size_t(s) * (fa + fl));
      std::copy_n(c.la[3].data() + size_t(s) * fl, fl,
                  c.concat.data() + size_t(s) * (fa + fl) + fa);
    }
    c.zt.resize(size_t(n) * size_t(m.trunk.out_dim));
    c.at.resize(size_t(n) * size_t(m.trunk.out_dim));
    detail::fc_forward(m.trunk, c.concat.data(), n, c.zt.data());
    detail::lrelu(c.zt.data(), c.at.data(), c.zt.size());
    pen = c.at.data();
  }
  c.pred.resize(size_t(n) * size_t(m.head_pred.out_dim));
  c.logit.resize(size_t(n) * 14);
  detail::fc_forward(m.head_pred, pen, n, c.pred.data());
  detail::fc_forward(m.head_logit, pen, n, c.logit.data());
}

// grad_pred: n x bh*bw, grad_logit: n x 14; parameter gradients accumulate
// into g, so zero it between steps.
inline void backward(const Model& m, const ForwardCache& c, const std::vector<double>& grad_pred,
                     const std::vector<double>& grad_logit, Model& g) {
  if (c.model != &m) throw net_error(-1, "cache does not belong to this model");
  const int n = c.n;
  if (grad_pred.size() != size_t(n) * size_t(m.head_pred.out_dim) ||
      grad_logit.size() != size_t(n) * 14)
    throw net_error(-1, "head gradient size mismatch");
  const int pw = m.penultimate_width();
  const double* pen = m.kind == ArchKind::fc ? c.a2.data() : c.at.data();
  std::vector<double> dpen(size_t(n) * size_t(pw));
  detail::fc_backward(m.head_pred, pen, grad_pred.data(), n, g.head_pred, dpen.data(), 0.0);
  detail::fc_backward(m.head_logit, pen, grad_logit.data(), n, g.head_logit, dpen.data(), 1.0);
  if (m.kind == ArchKind::fc) {
    std::vector<double> dz2(size_t(n) * 1200), da1(size_t(n) * 1200), dz1(size_t(n) * 1200);
    detail::lrelu_back(c.z2.data(), dpen.data(), dz2.data(), dz2.size());
    detail::fc_backward(m.fc2, c.a1.data(), dz2.data(), n, g.fc2, da1.data(), 0.0);
    detail::lrelu_back(c.z1.data(), da1.data(), dz1.data(), dz1.size());
    detail::fc_backward(m.fc1, c.x.data(), dz1.data(), n, g.fc1, nullptr, 0.0);
    return;
  }
  std::vector<double> dzt(size_t(n) * size_t(pw));
  detail::lrelu_back(c.zt.data(), dpen.data(), dzt.data(), dzt.size());
  const size_t fa = m.above_conv[3].out_size(), fl = m.left_conv[3].out_size();
  std::vector<double> dconcat(size_t(n) * (fa + fl));
  detail::fc_backward(m.trunk, c.concat.data(), dzt.data(), n, g.trunk, dconcat.data(), 0.0);
  std::vector<double> da(size_t(n) * fa), dl(size_t(n) * fl);
  for (int s = 0; s < n; ++s) {
    std::copy_n(dconcat.data() + size_t(s) * (fa + fl), fa, da.data() + size_t(s) * fa);
    std::copy_n(dconcat.data() + size_t(s) * (fa + fl) + fa, fl, dl.data() + size_t(s) * fl);
  }
  std::vector<double> scratch, scratch2;
  auto branch = [&](const std::array<ConvLayer, 4>& ls, std::array<ConvLayer, 4>& gls,
                    const std::array<std::vector<double>, 4>& zs,
                    const std::array<std::vector<double>, 4>& as, const double* x0,
                    std::vector<double> dtop) {
    for (int i = 3; i >= 0; --i) {
      const auto& l = ls[size_t(i)];
      std::vector<double> dz(size_t(n) * l.out_size());
      detail::lrelu_back(zs[size_t(i)].data(), dtop.data(), dz.data(), dz.size());
      const double* xin = i == 0 ? x0 : as[size_t(i - 1)].data();
      if (i == 0) {
        detail::conv_backward(l, xin, dz.data(), n, gls[size_t(i)], nullptr, scratch, scratch2);
      } else {
        std::vector<double> dx(size_t(n) * l.in_size());
        detail::conv_backward(l, xin, dz.data(), n, gls[size_t(i)], dx.data(), scratch,
                              scratch2);
        dtop = std::move(dx);
      }
    }
  };
  branch(m.above_conv, g.above_conv, c.az, c.aa, c.above_in.data(), std::move(da));
  branch(m.left_conv, g.left_conv, c.lz, c.la, c.left_in.data(), std::move(dl));
}

// Single sample convenience used by the codec.
inline void forward_single(const Model& m, const GridD& above, const GridD& left, GridD& pred,
                           std::array<double, 14>& logits) {
  if (above.rows != m.above_h || above.cols != m.above_w)
    throw net_error(0, "above context shape mismatch");
  if (left.rows != m.left_h || left.cols != m.left_w)
    throw net_error(0, "left context shape mismatch");
  Batch b;
  b.n = 1;
  b.above = above.v;
  b.left = left.v;
  ForwardCache c;
  forward(m, b, c);
  pred = GridD(m.bh, m.bw);
  pred.v = c.pred;
  for (int i = 0; i < 14; ++i) logits[size_t(i)] = c.logit[size_t(i)];
}

}  // namespace ntc
