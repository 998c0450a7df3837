#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ntc/codec.hpp"
#include "ntc/dataset.hpp"
#include "ntc/klt.hpp"
#include "ntc/model_io.hpp"
#include "ntc/rng.hpp"

using namespace ntc;

namespace {

Plane test_image(int w, int h, uint64_t seed) {
  Plane p(w, h, 8);
  Rng rng(seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 96.0 + 60.0 * std::sin(0.23 * x) * std::cos(0.19 * y) +
                 0.35 * double(x) + 0.2 * double(y) + rng.uniform(-6.0, 6.0);
      p.at(y, x) = sample_t(std::clamp(int(std::lround(v)), 0, 255));
    }
  return p;
}

struct Fixture {
  ModelSet models = make_seeded_models(900);
  TransformBank bank = make_random_bank(901);
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

bool planes_equal(const Plane& a, const Plane& b) {
  return a.width == b.width && a.height == b.height && a.bitdepth == b.bitdepth && a.v == b.v;
}

}  // namespace

TEST_CASE("every scheme round-trips to the encoder reconstruction") {
  auto& fx = fixture();
  Plane img = test_image(32, 32, 1);
  for (Scheme s : {Scheme::default_pair, Scheme::fully_explicit, Scheme::inference,
                   Scheme::prediction}) {
    for (int qp : {22, 37}) {
      CodecConfig cfg;
      cfg.qp = qp;
      cfg.scheme = s;
      EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank, 0x1234, 0x5678);
      DecodeResult dr = decode_image(er.bytes, &fx.models, fx.bank, 0x1234, 0x5678);
      INFO("scheme " << scheme_name(s) << " qp " << qp);
      REQUIRE(planes_equal(dr.recon, er.recon));
      REQUIRE(dr.header.qp == qp);
      REQUIRE(dr.header.scheme == s);
      REQUIRE(dr.header.width == 32);
      REQUIRE(dr.header.model_hash == 0x1234);
      REQUIRE(dr.header.bank_hash == 0x5678);
    }
  }
}

TEST_CASE("encoding is deterministic") {
  auto& fx = fixture();
  Plane img = test_image(32, 32, 2);
  CodecConfig cfg;
  cfg.qp = 27;
  cfg.scheme = Scheme::fully_explicit;
  EncodeResult a = encode_image(img, cfg, &fx.models, fx.bank);
  EncodeResult b = encode_image(img, cfg, &fx.models, fx.bank);
  REQUIRE(a.bytes == b.bytes);
  REQUIRE(a.rd_cost == b.rd_cost);
  REQUIRE(planes_equal(a.recon, b.recon));
}

TEST_CASE("per category bit counts add up to the stream length") {
  auto& fx = fixture();
  Plane img = test_image(48, 32, 3);
  for (Scheme s : {Scheme::default_pair, Scheme::prediction}) {
    CodecConfig cfg;
    cfg.qp = 32;
    cfg.scheme = s;
    EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank);
    REQUIRE(er.counts.total() == uint64_t(er.bytes.size()) * 8);
    uint64_t sum = 0;
    for (uint64_t b : er.counts.bits) sum += b;
    REQUIRE(sum == er.counts.total());
    REQUIRE(er.counts[SyntaxCat::header] >= 26 * 8);
    REQUIRE(er.counts[SyntaxCat::coeff] > 0);
  }
}

TEST_CASE("rectangular partitioning modes round-trip and never hurt") {
  auto& fx = fixture();
  Plane img = test_image(64, 32, 4);
  for (RectMode rm : {RectMode::off, RectMode::optional, RectMode::forced}) {
    CodecConfig cfg;
    cfg.qp = 32;
    cfg.scheme = Scheme::inference;
    cfg.rect = rm;
    EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank);
    DecodeResult dr = decode_image(er.bytes, &fx.models, fx.bank);
    REQUIRE(planes_equal(dr.recon, er.recon));
    REQUIRE(dr.header.rect == rm);
    if (rm == RectMode::off) REQUIRE(er.counts[SyntaxCat::rect_flag] == 0);
    if (rm != RectMode::off) REQUIRE(er.stats.leaf_blocks > 0);
  }
}

TEST_CASE("images that are not powers of two split implicitly") {
  auto& fx = fixture();
  Plane img = test_image(20, 12, 5);
  CodecConfig cfg;
  cfg.qp = 27;
  cfg.scheme = Scheme::fully_explicit;
  EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank);
  DecodeResult dr = decode_image(er.bytes, &fx.models, fx.bank);
  REQUIRE(planes_equal(dr.recon, er.recon));
  REQUIRE(dr.header.width == 20);
  REQUIRE(dr.header.height == 12);
  REQUIRE(er.stats.leaf_blocks >= 4);  // 240 px cannot be covered by fewer 8x8 leaves
}

TEST_CASE("classic-only streams decode without any models") {
  auto& fx = fixture();
  Plane img = test_image(24, 24, 6);
  CodecConfig cfg;
  cfg.qp = 32;
  cfg.nn = false;
  EncodeResult er = encode_image(img, cfg, nullptr, fx.bank);
  REQUIRE(er.stats.nn_blocks == 0);
  REQUIRE(er.stats.classic_blocks == er.stats.leaf_blocks);
  DecodeResult dr = decode_image(er.bytes, nullptr, fx.bank);
  REQUIRE(planes_equal(dr.recon, er.recon));
  // A zero stored hash never trips the check even when the caller expects one.
  DecodeResult dr2 = decode_image(er.bytes, nullptr, fx.bank, 0xdeadbeef, 0);
  REQUIRE(planes_equal(dr2.recon, er.recon));
}

TEST_CASE("hash mismatches are rejected before any block parsing") {
  auto& fx = fixture();
  Plane img = test_image(16, 16, 7);
  CodecConfig cfg;
  cfg.qp = 32;
  EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank, 0xaaaa, 0xbbbb);
  REQUIRE_THROWS_WITH(decode_image(er.bytes, &fx.models, fx.bank, 0xcccc, 0xbbbb),
                      Catch::Matchers::ContainsSubstring("model hash"));
  REQUIRE_THROWS_WITH(decode_image(er.bytes, &fx.models, fx.bank, 0xaaaa, 0xdddd),
                      Catch::Matchers::ContainsSubstring("bank hash"));
  // Matching or unchecked hashes pass.
  REQUIRE_NOTHROW(decode_image(er.bytes, &fx.models, fx.bank, 0xaaaa, 0xbbbb));
  REQUIRE_NOTHROW(decode_image(er.bytes, &fx.models, fx.bank));
}

TEST_CASE("corrupt headers fail with a named element") {
  auto& fx = fixture();
  Plane img = test_image(16, 16, 8);
  CodecConfig cfg;
  cfg.qp = 32;
  EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank);

  auto mutate = [&](size_t off, uint8_t val) {
    std::vector<uint8_t> bad = er.bytes;
    bad[off] = val;
    return bad;
  };
  auto element_of = [&](const std::vector<uint8_t>& bytes) -> std::string {
    try {
      decode_image(bytes, &fx.models, fx.bank);
    } catch (const bitstream_error& e) {
      return e.element();
    }
    return "";
  };
  // Layout: magic[0..3] version[4] width[5..6] height[7..8] depth[9] qp[10]
  // scheme[11] rect[12] hashes[13..28].
  REQUIRE(element_of(mutate(0, 'X')) == "magic");
  REQUIRE(element_of(mutate(4, 9)) == "version");
  REQUIRE(element_of(mutate(6, 0x01)) == "dimensions");  // width 1 not a multiple of 4
  REQUIRE(element_of(mutate(9, 40)) == "bitdepth");
  REQUIRE(element_of(mutate(10, 60)) == "qp");
  REQUIRE(element_of(mutate(11, 7)) == "scheme");
  REQUIRE(element_of(mutate(12, 5)) == "rect_mode");

  std::vector<uint8_t> truncated(er.bytes.begin(), er.bytes.begin() + 12);
  REQUIRE_THROWS_AS(decode_image(truncated, &fx.models, fx.bank), bitstream_error);
  std::vector<uint8_t> body_cut(er.bytes.begin(), er.bytes.begin() + 30);
  REQUIRE_THROWS_AS(decode_image(body_cut, &fx.models, fx.bank), bitstream_error);
  REQUIRE_THROWS_AS(decode_image(std::vector<uint8_t>{}, &fx.models, fx.bank),
                    bitstream_error);
}

TEST_CASE("collection produces complete observations and bank samples") {
  auto& fx = fixture();
  Plane img = test_image(32, 32, 9);
  CodecConfig cfg;
  cfg.qp = 27;
  cfg.scheme = Scheme::default_pair;
  Collector col;
  col.want_obs = true;
  col.want_bank = true;
  EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank, 0, 0, &col);
  (void)er;

  REQUIRE_FALSE(col.obs.empty());
  uint64_t n44 = 0;
  for (const auto& o : col.obs) {
    DatasetDims d = DatasetDims::of(o.net_h, o.net_w);
    REQUIRE(int(o.above.size()) == d.above_n);
    REQUIRE(int(o.left.size()) == d.left_n);
    REQUIRE(int(o.target.size()) == d.target_n);
    REQUIRE(o.i1 < 7);
    REQUIRE(o.i2 < 7);
    REQUIRE(o.qp == 27);
    REQUIRE(std::isfinite(o.cost0));
    REQUIRE(o.cost0 >= 0.0);
    for (float v : o.above) REQUIRE(std::isfinite(v));
    for (float v : o.left) REQUIRE(std::isfinite(v));
    for (float v : o.target) REQUIRE(std::isfinite(v));
    double best = o.cost0;
    for (double c : o.costs) {
      REQUIRE(std::isfinite(c));
      REQUIRE(c >= 0.0);
      best = std::min(best, c);
    }
    // The recorded labels point at the cheapest non-identity choice.
    double labeled1 = o.costs[size_t(o.i1)];
    double labeled2 = o.costs[7 + size_t(o.i2)];
    double min1 = *std::min_element(o.costs.begin(), o.costs.begin() + 7);
    double min2 = *std::min_element(o.costs.begin() + 7, o.costs.end());
    REQUIRE(labeled1 == min1);
    REQUIRE(labeled2 == min2);
    if (o.net_h == 4 && o.net_w == 4) ++n44;
  }
  // Every 4x4 position of the quadtree walk is evaluated once.
  REQUIRE(n44 >= 64);

  bool any_bank = false;
  size_t expect_len[2] = {16, 48};
  for (size_t set = 0; set < col.bank.groups.size(); ++set)
    for (size_t fam = 0; fam < 2; ++fam)
      for (const auto& v : col.bank.groups[set][fam]) {
        any_bank = true;
        REQUIRE(v.size() == expect_len[fam]);
        for (double x : v) REQUIRE(std::isfinite(x));
      }
  REQUIRE(any_bank);
}

TEST_CASE("bank reservoirs stay bounded") {
  auto& fx = fixture();
  Plane img = test_image(48, 48, 10);
  CodecConfig cfg;
  cfg.qp = 22;
  cfg.nn = false;
  Collector col;
  col.want_bank = true;
  col.bank_cap = 5;
  encode_image(img, cfg, nullptr, fx.bank, 0, 0, &col);
  for (const auto& set : col.bank.groups)
    for (const auto& fam : set) REQUIRE(fam.size() <= 5);
}

TEST_CASE("encoders validate their inputs") {
  auto& fx = fixture();
  CodecConfig cfg;
  Plane bad(18, 16, 8);  // width not a multiple of 4
  REQUIRE_THROWS_AS(encode_image(bad, cfg, &fx.models, fx.bank), error);
  Plane img = test_image(16, 16, 11);
  CodecConfig badqp;
  badqp.qp = 99;
  REQUIRE_THROWS_AS(encode_image(img, badqp, &fx.models, fx.bank), error);
  CodecConfig nn;
  nn.nn = true;
  REQUIRE_THROWS_AS(encode_image(img, nn, nullptr, fx.bank), error);
  Plane deep(16, 16, 17);
  REQUIRE_THROWS_AS(encode_image(deep, cfg, &fx.models, fx.bank), error);
}

TEST_CASE("larger images with all block sizes round-trip") {
  auto& fx = fixture();
  Plane img = test_image(64, 64, 12);
  CodecConfig cfg;
  cfg.qp = 37;
  cfg.scheme = Scheme::prediction;
  EncodeResult er = encode_image(img, cfg, &fx.models, fx.bank);
  DecodeResult dr = decode_image(er.bytes, &fx.models, fx.bank);
  REQUIRE(planes_equal(dr.recon, er.recon));
  REQUIRE(er.stats.leaf_blocks > 0);
  REQUIRE(er.stats.nn_blocks + er.stats.classic_blocks == er.stats.leaf_blocks);
  REQUIRE(er.stats.lfnst_blocks >= er.stats.nn_lfnst_blocks);
  // Reconstruction should be a plausible image, not garbage.
  double mse = 0;
  for (size_t i = 0; i < img.v.size(); ++i) {
    double d = double(img.v[i]) - double(er.recon.v[i]);
    mse += d * d;
  }
  mse /= double(img.v.size());
  REQUIRE(mse < 400.0);
}
