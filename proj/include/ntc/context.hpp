#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

// Causal neighbourhood of a block: an above strip that spans the corner plus
// the block width, and a left strip beside the block. Thin blocks keep a
// square-ish band, bigger ones take half the block dimension.
struct ContextShape {
  int n_a, n_l;
};

inline ContextShape context_shape(int h, int w) {
  if (std::min(h, w) <= 8) {
    int n = std::min(h, w);
    return {n, n};
  }
  return {h / 2, w / 2};
}

// Repeated sweeps: forward pass borrows from left then up, backward pass from
// right then down. Converges whenever at least one cell starts filled.
inline void fill_unavailable(GridD& g, GridU8& have, double fallback) {
  bool any = false;
  for (uint8_t f : have.v) any = any || f;
  if (!any) {
    for (double& v : g.v) v = fallback;
    for (uint8_t& f : have.v) f = 1;
    return;
  }
  size_t missing = 0;
  for (uint8_t f : have.v) missing += f ? 0 : 1;
  while (missing > 0) {
    for (int r = 0; r < g.rows && missing > 0; ++r)
      for (int c = 0; c < g.cols; ++c) {
        if (have.at(r, c)) continue;
        if (c > 0 && have.at(r, c - 1)) {
          g.at(r, c) = g.at(r, c - 1);
        } else if (r > 0 && have.at(r - 1, c)) {
          g.at(r, c) = g.at(r - 1, c);
        } else {
          continue;
        }
        have.at(r, c) = 1;
        --missing;
      }
    for (int r = g.rows - 1; r >= 0 && missing > 0; --r)
      for (int c = g.cols - 1; c >= 0; --c) {
        if (have.at(r, c)) continue;
        if (c + 1 < g.cols && have.at(r, c + 1)) {
          g.at(r, c) = g.at(r, c + 1);
        } else if (r + 1 < g.rows && have.at(r + 1, c)) {
          g.at(r, c) = g.at(r + 1, c);
        } else {
          continue;
        }
        have.at(r, c) = 1;
        --missing;
      }
  }
}

struct BlockContext {
  GridD above;  // n_a x (n_l + w)
  GridD left;   // h x n_l
  int n_a, n_l;
};

// decoded: per pixel flag grid for the whole plane, 1 where the
// reconstruction already holds final samples.
inline BlockContext extract_context(const Plane& recon, const GridU8& decoded, int y, int x,
                                    int h, int w) {
  auto [n_a, n_l] = context_shape(h, w);
  const double mid = double(1u << (recon.bitdepth - 1));
  BlockContext ctx;
  ctx.n_a = n_a;
  ctx.n_l = n_l;
  ctx.above = GridD(n_a, n_l + w);
  ctx.left = GridD(h, n_l);
  GridU8 ha(n_a, n_l + w), hl(h, n_l);
  for (int r = 0; r < n_a; ++r)
    for (int c = 0; c < n_l + w; ++c) {
      int py = y - n_a + r, px = x - n_l + c;
      if (py >= 0 && py < recon.height && px >= 0 && px < recon.width && decoded.at(py, px)) {
        ctx.above.at(r, c) = double(recon.at(py, px));
        ha.at(r, c) = 1;
      }
    }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < n_l; ++c) {
      int py = y + r, px = x - n_l + c;
      if (py >= 0 && py < recon.height && px >= 0 && px < recon.width && decoded.at(py, px)) {
        ctx.left.at(r, c) = double(recon.at(py, px));
        hl.at(r, c) = 1;
      }
    }
  fill_unavailable(ctx.above, ha, mid);
  fill_unavailable(ctx.left, hl, mid);
  return ctx;
}

// ---- geometry adaptation ---------------------------------------------------
// Eight trained shapes serve all supported block sizes: tall blocks are
// transposed onto their wide twin, and the largest sizes are downsampled.

struct GeoAdapt {
  bool transpose = false;
  int down_h = 1, down_w = 1;
  int net_h = 0, net_w = 0;
};

inline std::optional<GeoAdapt> geo_adapt(int h, int w) {
  auto direct = [](int bh, int bw) {
    return (bh == 4 && (bw == 4 || bw == 8 || bw == 16 || bw == 32)) ||
           (bh == 8 && (bw == 8 || bw == 16)) || (bh == 16 && bw == 16) ||
           (bh == 32 && bw == 32);
  };
  GeoAdapt a;
  int bh = h, bw = w;
  if (bh > bw) {
    a.transpose = true;
    std::swap(bh, bw);
  }
  if (direct(bh, bw)) {
    a.net_h = bh;
    a.net_w = bw;
    return a;
  }
  if (bh == 16 && bw == 32) {
    a.down_w = 2;
    a.net_h = 16;
    a.net_w = 16;
    return a;
  }
  if (bh == 64 && bw == 64) {
    a.down_h = a.down_w = 2;
    a.net_h = 32;
    a.net_w = 32;
    return a;
  }
  return std::nullopt;
}

// Swapping axes of the scene: the old left strip becomes the strict above
// part, the old strict above becomes the left strip, the corner transposes.
inline BlockContext transpose_context(const BlockContext& ctx, int h, int w) {
  BlockContext out;
  out.n_a = ctx.n_l;
  out.n_l = ctx.n_a;
  out.above = GridD(ctx.n_l, ctx.n_a + h);
  out.left = GridD(w, ctx.n_a);
  for (int r = 0; r < ctx.n_l; ++r)
    for (int c = 0; c < ctx.n_a; ++c) out.above.at(r, c) = ctx.above.at(c, r);
  for (int r = 0; r < ctx.n_l; ++r)
    for (int c = 0; c < h; ++c) out.above.at(r, ctx.n_a + c) = ctx.left.at(c, r);
  for (int r = 0; r < w; ++r)
    for (int c = 0; c < ctx.n_a; ++c) out.left.at(r, c) = ctx.above.at(c, ctx.n_l + r);
  return out;
}

inline GridD downsample_rows(const GridD& g) {
  GridD out(g.rows / 2, g.cols);
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < g.cols; ++c) out.at(r, c) = 0.5 * (g.at(2 * r, c) + g.at(2 * r + 1, c));
  return out;
}

inline GridD downsample_cols(const GridD& g) {
  GridD out(g.rows, g.cols / 2);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out.at(r, c) = 0.5 * (g.at(r, 2 * c) + g.at(r, 2 * c + 1));
  return out;
}

inline GridD upsample_rows(const GridD& g) {
  GridD out(g.rows * 2, g.cols);
  for (int c = 0; c < g.cols; ++c) {
    for (int r = 0; r < g.rows; ++r) {
      out.at(2 * r, c) = g.at(r, c);
      out.at(2 * r + 1, c) =
          r + 1 < g.rows ? 0.5 * (g.at(r, c) + g.at(r + 1, c)) : g.at(r, c);
    }
  }
  return out;
}

inline GridD upsample_cols(const GridD& g) {
  GridD out(g.rows, g.cols * 2);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      out.at(r, 2 * c) = g.at(r, c);
      out.at(r, 2 * c + 1) =
          c + 1 < g.cols ? 0.5 * (g.at(r, c) + g.at(r, c + 1)) : g.at(r, c);
    }
  }
  return out;
}

// Network facing input: transposed and downsampled context strips, normalized
// by the context mean and half the sample range.
struct NetInput {
  GridD above, left;
  double mu = 0;
  int net_h = 0, net_w = 0;
};

inline NetInput adapt_context(const BlockContext& ctx, const GeoAdapt& geo, int h, int w,
                              int bitdepth) {
  BlockContext c = geo.transpose ? transpose_context(ctx, h, w) : ctx;
  GridD above = c.above, left = c.left;
  if (geo.down_h == 2) {
    above = downsample_rows(above);
    left = downsample_rows(left);
  }
  if (geo.down_w == 2) {
    above = downsample_cols(above);
    left = downsample_cols(left);
  }
  double sum = 0;
  for (double v : above.v) sum += v;
  for (double v : left.v) sum += v;
  double mu = sum / double(above.v.size() + left.v.size());
  const double half = double(1u << (bitdepth - 1));
  NetInput in;
  in.mu = mu;
  in.net_h = geo.net_h;
  in.net_w = geo.net_w;
  in.above = std::move(above);
  in.left = std::move(left);
  for (double& v : in.above.v) v = (v - mu) / half;
  for (double& v : in.left.v) v = (v - mu) / half;
  return in;
}

// Block samples mapped into the same network domain, for training targets.
inline GridD adapt_target(const GridD& block, const GeoAdapt& geo, double mu, int bitdepth) {
  GridD y = geo.transpose ? block.transposed() : block;
  if (geo.down_h == 2) y = downsample_rows(y);
  if (geo.down_w == 2) y = downsample_cols(y);
  const double half = double(1u << (bitdepth - 1));
  for (double& v : y.v) v = (v - mu) / half;
  return y;
}

// Network output back to block domain: denormalize, clip, upsample, undo the
// transpose, round to integer sample values.
inline GridD postprocess_prediction(const GridD& p_net, const GeoAdapt& geo, double mu,
                                    int bitdepth) {
  const double half = double(1u << (bitdepth - 1));
  const double maxv = double((1u << bitdepth) - 1);
  GridD p = p_net;
  for (double& v : p.v) v = std::clamp(v * half + mu, 0.0, maxv);
  if (geo.down_h == 2) p = upsample_rows(p);
  if (geo.down_w == 2) p = upsample_cols(p);
  if (geo.transpose) p = p.transposed();
  for (double& v : p.v) v = double(std::lround(v));
  return p;
}

}  // namespace ntc
