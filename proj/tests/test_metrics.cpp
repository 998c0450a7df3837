#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <limits>

#include "ntc/metrics.hpp"
#include "ntc/rng.hpp"

using namespace ntc;

namespace {

using Arr4 = std::array<double, 4>;

// Independent oracle: Lagrange-evaluated cubics through the same points,
// integrated by dense trapezoid sums instead of a closed form.
double lagrange_eval(const Arr4& x, const Arr4& y, double t) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    double li = 1;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      li *= (t - x[size_t(j)]) / (x[size_t(i)] - x[size_t(j)]);
    }
    s += y[size_t(i)] * li;
  }
  return s;
}

double bd_rate_oracle(const Arr4& ar, const Arr4& ap, const Arr4& tr, const Arr4& tp) {
  Arr4 la, lt;
  for (int i = 0; i < 4; ++i) {
    la[size_t(i)] = std::log10(ar[size_t(i)]);
    lt[size_t(i)] = std::log10(tr[size_t(i)]);
  }
  auto lo_hi = [](const Arr4& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return std::pair<double, double>(lo, hi);
  };
  auto [alo, ahi] = lo_hi(ap);
  auto [tlo, thi] = lo_hi(tp);
  const double lo = std::max(alo, tlo), hi = std::min(ahi, thi);
  const int n = 20000;
  double sum = 0;
  for (int k = 0; k <= n; ++k) {
    const double t = lo + (hi - lo) * double(k) / double(n);
    const double d = lagrange_eval(tp, lt, t) - lagrange_eval(ap, la, t);
    sum += (k == 0 || k == n) ? 0.5 * d : d;
  }
  const double avg = sum / double(n);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

Plane const_plane(int w, int h, int bd, int v) {
  Plane p(w, h, bd);
  for (auto& s : p.v) s = sample_t(v);
  return p;
}

}  // namespace

TEST_CASE("psnr against the nominal peak") {
  Plane a = const_plane(16, 16, 8, 100);
  Plane b = const_plane(16, 16, 8, 101);  // MSE exactly 1
  REQUIRE(psnr(a, b) == Catch::Approx(10.0 * std::log10(255.0 * 255.0)).epsilon(1e-12));
  REQUIRE(psnr(a, a) == std::numeric_limits<double>::infinity());
  Plane c10 = const_plane(16, 16, 10, 512);
  Plane d10 = const_plane(16, 16, 10, 513);
  REQUIRE(psnr(c10, d10) == Catch::Approx(10.0 * std::log10(1023.0 * 1023.0)).epsilon(1e-12));
  Plane small(8, 8, 8, 0);
  REQUIRE_THROWS_AS(psnr(a, small), error);
  REQUIRE_THROWS_AS(psnr(a, c10), error);
}

TEST_CASE("identical curves have zero rate difference") {
  Arr4 rate = {10000, 20000, 40000, 80000};
  Arr4 q = {30.0, 33.0, 36.0, 39.0};
  REQUIRE(bd_rate(rate, q, rate, q) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("a uniform ten percent rate saving reads as minus ten") {
  Arr4 rate = {12000, 21000, 39000, 81000};
  Arr4 q = {29.5, 33.1, 36.2, 38.8};
  Arr4 cheaper;
  for (int i = 0; i < 4; ++i) cheaper[size_t(i)] = 0.9 * rate[size_t(i)];
  REQUIRE(bd_rate(rate, q, cheaper, q) == Catch::Approx(-10.0).margin(0.01));
  REQUIRE(bd_rate(rate, q, rate, q) == Catch::Approx(0.0).margin(0.01));
}

TEST_CASE("closed form integration matches a dense numeric oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Arr4 ar, ap, tr, tp;
    double r = rng.uniform(5000.0, 20000.0);
    double p = rng.uniform(28.0, 31.0);
    for (int i = 0; i < 4; ++i) {
      ar[size_t(i)] = r;
      ap[size_t(i)] = p;
      r *= rng.uniform(1.6, 2.4);
      p += rng.uniform(2.0, 4.0);
    }
    r = rng.uniform(4000.0, 18000.0);
    p = rng.uniform(27.5, 30.5);
    for (int i = 0; i < 4; ++i) {
      tr[size_t(i)] = r;
      tp[size_t(i)] = p;
      r *= rng.uniform(1.6, 2.4);
      p += rng.uniform(2.0, 4.0);
    }
    const double got = bd_rate(ar, ap, tr, tp);
    const double want = bd_rate_oracle(ar, ap, tr, tp);
    REQUIRE(got == Catch::Approx(want).margin(0.01));
  }
}

TEST_CASE("swapping anchor and test inverts the saving") {
  Rng rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    Arr4 ar, ap, tr, tp;
    double r = rng.uniform(5000.0, 20000.0);
    double p = rng.uniform(28.0, 31.0);
    for (int i = 0; i < 4; ++i) {
      ar[size_t(i)] = r;
      ap[size_t(i)] = p;
      r *= rng.uniform(1.7, 2.3);
      p += rng.uniform(2.5, 3.5);
    }
    for (int i = 0; i < 4; ++i) {
      tr[size_t(i)] = ar[size_t(i)] * rng.uniform(0.85, 1.15);
      tp[size_t(i)] = ap[size_t(i)] + rng.uniform(-0.5, 0.5);
    }
    const double fwd = bd_rate(ar, ap, tr, tp);
    const double rev = bd_rate(tr, tp, ar, ap);
    const double prod = (1.0 + fwd / 100.0) * (1.0 + rev / 100.0);
    REQUIRE(std::abs(prod - 1.0) < 5e-4);
  }
}

TEST_CASE("ill posed rate distortion inputs are rejected") {
  Arr4 rate = {10000, 20000, 40000, 80000};
  Arr4 q = {30.0, 33.0, 36.0, 39.0};
  Arr4 far = {50.0, 53.0, 56.0, 59.0};
  REQUIRE_THROWS_AS(bd_rate(rate, q, rate, far), error);  // no overlap
  Arr4 dup = {30.0, 30.0, 36.0, 39.0};
  REQUIRE_THROWS_AS(bd_rate(rate, dup, rate, q), error);  // singular fit
  Arr4 zero = {0.0, 20000, 40000, 80000};
  REQUIRE_THROWS_AS(bd_rate(zero, q, rate, q), error);
  Arr4 inf_q = {30.0, 33.0, 36.0, std::numeric_limits<double>::infinity()};
  REQUIRE_THROWS_AS(bd_rate(rate, q, rate, inf_q), error);
}

TEST_CASE("evaluation csv layout is stable") {
  REQUIRE(csv_header() ==
          "image,scheme,qp,bits,bpp,psnr"
          ",bits_header,bits_split_flag,bits_rect_flag,bits_mode_flag,bits_classic_mode"
          ",bits_lfnst_idx,bits_pair_explicit,bits_pair_remainder,bits_coeff"
          ",leaf_blocks,nn_blocks,classic_blocks,lfnst_blocks,nn_lfnst_blocks"
          ",pair_coded_blocks,remainder_zero,remainder_hit_rate,nn_share");

  EvalRow r;
  r.image = "img";
  r.scheme = Scheme::prediction;
  r.qp = 32;
  r.bits = 1000;
  r.bpp = 0.5;
  r.psnr_db = 33.25;
  for (size_t i = 0; i < kSyntaxCatCount; ++i) r.counts.bits[i] = i + 1;
  r.stats.leaf_blocks = 10;
  r.stats.nn_blocks = 4;
  r.stats.classic_blocks = 6;
  r.stats.lfnst_blocks = 3;
  r.stats.nn_lfnst_blocks = 2;
  r.stats.pair_coded_blocks = 5;
  r.stats.remainder_zero = 2;
  REQUIRE(csv_row(r) ==
          "img,prediction,32,1000,0.500000,33.2500,1,2,3,4,5,6,7,8,9"
          ",10,4,6,3,2,5,2,0.4000,0.4000");

  r.psnr_db = std::numeric_limits<double>::infinity();
  REQUIRE(csv_row(r).find(",inf,") != std::string::npos);
}
