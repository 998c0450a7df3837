#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ntc/bitstream.hpp"
#include "ntc/codec.hpp"
#include "ntc/common.hpp"

namespace ntc {

// Peak signal to noise ratio in dB against the plane's nominal peak.
// Identical planes return infinity; callers print it as a sentinel.
inline double psnr(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height || a.bitdepth != b.bitdepth)
    throw error("psnr on mismatched planes");
  double sse = 0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = double(a.v[i]) - double(b.v[i]);
    sse += d * d;
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = sse / double(a.v.size());
  const double peak = double(a.max_value());
  return 10.0 * std::log10(peak * peak / mse);
}

namespace detail {

// Cubic through exactly 4 points by Vandermonde solve with partial pivoting.
inline std::array<double, 4> cubic_through(const std::array<double, 4>& x,
                                           const std::array<double, 4>& y) {
  double a[4][5];
  for (int r = 0; r < 4; ++r) {
    double p = 1;
    for (int c = 0; c < 4; ++c) {
      a[r][c] = p;
      p *= x[size_t(r)];
    }
    a[r][4] = y[size_t(r)];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) throw error("degenerate rate-distortion points");
    if (piv != col)
      for (int c = 0; c < 5; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 4> out;
  for (int r = 0; r < 4; ++r) out[size_t(r)] = a[r][4] / a[r][r];
  return out;
}

inline double cubic_integral(const std::array<double, 4>& c, double lo, double hi) {
  auto anti = [&](double x) {
    return x * (c[0] + x * (c[1] / 2 + x * (c[2] / 3 + x * c[3] / 4)));
  };
  return anti(hi) - anti(lo);
}

}  // namespace detail

// Average rate difference in percent over the overlapping quality range:
// log10 rate is interpolated as a cubic in PSNR for each curve and the two
// integrals are compared. Negative means the test curve spends fewer bits.
inline double bd_rate(const std::array<double, 4>& anchor_rate,
                      const std::array<double, 4>& anchor_psnr,
                      const std::array<double, 4>& test_rate,
                      const std::array<double, 4>& test_psnr) {
  std::array<double, 4> la, lt;
  for (int i = 0; i < 4; ++i) {
    if (anchor_rate[size_t(i)] <= 0 || test_rate[size_t(i)] <= 0)
      throw error("bd_rate needs positive rates");
    if (!std::isfinite(anchor_psnr[size_t(i)]) || !std::isfinite(test_psnr[size_t(i)]))
      throw error("bd_rate needs finite psnr values");
    la[size_t(i)] = std::log10(anchor_rate[size_t(i)]);
    lt[size_t(i)] = std::log10(test_rate[size_t(i)]);
  }
  auto minmax = [](const std::array<double, 4>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return std::pair<double, double>(lo, hi);
  };
  const auto [alo, ahi] = minmax(anchor_psnr);
  const auto [tlo, thi] = minmax(test_psnr);
  const double lo = std::max(alo, tlo), hi = std::min(ahi, thi);
  if (hi <= lo) throw error("bd_rate psnr ranges do not overlap");
  const auto ca = detail::cubic_through(anchor_psnr, la);
  const auto ct = detail::cubic_through(test_psnr, lt);
  const double avg =
      (detail::cubic_integral(ct, lo, hi) - detail::cubic_integral(ca, lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

// ---- evaluation CSV --------------------------------------------------------

struct EvalRow {
  std::string image;
  Scheme scheme = Scheme::default_pair;
  int qp = 0;
  uint64_t bits = 0;
  double bpp = 0;
  double psnr_db = 0;
  BitCounts counts;
  EncodeStats stats;
};

inline std::string csv_header() {
  std::string h = "image,scheme,qp,bits,bpp,psnr";
  for (size_t i = 0; i < kSyntaxCatCount; ++i)
    h += std::string(",bits_") + syntax_cat_name(SyntaxCat(i));
  h += ",leaf_blocks,nn_blocks,classic_blocks,lfnst_blocks,nn_lfnst_blocks";
  h += ",pair_coded_blocks,remainder_zero,remainder_hit_rate,nn_share";
  return h;
}

inline std::string csv_row(const EvalRow& r) {
  char buf[64];
  std::string s = r.image;
  s += ",";
  s += scheme_name(r.scheme);
  s += "," + std::to_string(r.qp);
  s += "," + std::to_string(r.bits);
  std::snprintf(buf, sizeof buf, ",%.6f", r.bpp);
  s += buf;
  if (std::isfinite(r.psnr_db))
    std::snprintf(buf, sizeof buf, ",%.4f", r.psnr_db);
  else
    std::snprintf(buf, sizeof buf, ",inf");
  s += buf;
  for (size_t i = 0; i < kSyntaxCatCount; ++i) s += "," + std::to_string(r.counts.bits[i]);
  s += "," + std::to_string(r.stats.leaf_blocks);
  s += "," + std::to_string(r.stats.nn_blocks);
  s += "," + std::to_string(r.stats.classic_blocks);
  s += "," + std::to_string(r.stats.lfnst_blocks);
  s += "," + std::to_string(r.stats.nn_lfnst_blocks);
  s += "," + std::to_string(r.stats.pair_coded_blocks);
  s += "," + std::to_string(r.stats.remainder_zero);
  const double hit = r.stats.pair_coded_blocks
                         ? double(r.stats.remainder_zero) / double(r.stats.pair_coded_blocks)
                         : 0.0;
  std::snprintf(buf, sizeof buf, ",%.4f", hit);
  s += buf;
  const double share =
      r.stats.leaf_blocks ? double(r.stats.nn_blocks) / double(r.stats.leaf_blocks) : 0.0;
  std::snprintf(buf, sizeof buf, ",%.4f", share);
  s += buf;
  return s;
}

}  // namespace ntc
