#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ntc/bitstream.hpp"
#include "ntc/coeffs.hpp"
#include "ntc/quant.hpp"
#include "ntc/rng.hpp"

using namespace ntc;

TEST_CASE("bit writer emits msb-first and round-trips") {
  BitWriter bw;
  bw.put_bits(0b1011, 4, SyntaxCat::header);
  bw.put_bit(1, SyntaxCat::coeff);
  bw.put_bits(0x5a, 8, SyntaxCat::coeff);
  REQUIRE(bw.bit_count() == 13);
  REQUIRE(bw.bytes()[0] == 0b10111010); // 1011 1 0101...
  BitReader br(bw.bytes(), bw.bit_count());
  REQUIRE(br.get_bits(4) == 0b1011);
  REQUIRE(br.get_bit() == 1);
  REQUIRE(br.get_bits(8) == 0x5a);
  REQUIRE(br.bits_left() == 0);
}

TEST_CASE("bit reader reports the element and offset at overrun") {
  BitWriter bw;
  bw.put_bits(0b101, 3);
  BitReader br(bw.bytes(), bw.bit_count());
  br.set_element("last_pos");
  br.get_bits(3);
  try {
    br.get_bit();
    FAIL("expected overrun");
  } catch (const bitstream_error& e) {
    REQUIRE(e.element() == "last_pos");
    REQUIRE(e.bit_offset() == 3);
  }
}

TEST_CASE("append merges payloads and per-element tallies") {
  BitWriter a, b;
  a.put_bits(0b110, 3, SyntaxCat::header);
  b.put_bits(0b01, 2, SyntaxCat::mode_flag);
  b.put_bits(0b111, 3, SyntaxCat::coeff);
  a.append(b);
  REQUIRE(a.bit_count() == 8);
  REQUIRE(a.bytes()[0] == 0b11001111);
  REQUIRE(a.counts().bits[size_t(SyntaxCat::header)] == 3);
  REQUIRE(a.counts().bits[size_t(SyntaxCat::mode_flag)] == 2);
  REQUIRE(a.counts().bits[size_t(SyntaxCat::coeff)] == 3);
  REQUIRE(a.counts().total() == 8);
}

TEST_CASE("per-element tallies sum to the stream length") {
  Rng rng(123);
  BitWriter bw;
  for (int i = 0; i < 500; ++i) {
    auto cat = SyntaxCat(rng.below(size_t(SyntaxCat::count_)));
    bw.put_bits(rng.next_u64(), 1 + int(rng.below(9)), cat);
  }
  REQUIRE(bw.counts().total() == bw.bit_count());
}

TEST_CASE("zigzag maps positives to odd codes and round-trips") {
  REQUIRE(zigzag_encode(0) == 0);
  REQUIRE(zigzag_encode(1) == 1);
  REQUIRE(zigzag_encode(-1) == 2);
  REQUIRE(zigzag_encode(2) == 3);
  REQUIRE(zigzag_encode(-2) == 4);
  for (int64_t s = -300; s <= 300; ++s) REQUIRE(zigzag_decode(zigzag_encode(s)) == s);
}

TEST_CASE("exp-golomb codewords match the order-0 construction") {
  // value v is coded as ilog2(v+1) zeros, then v+1 in binary.
  struct Case { uint64_t v; const char* bits; };
  const Case cases[] = {
      {0, "1"},      {1, "010"},    {2, "011"},     {3, "00100"},
      {4, "00101"},  {5, "00110"},  {6, "00111"},   {7, "0001000"},
      {62, "00000111111"}, {63, "0000001000000"},
  };
  for (const auto& c : cases) {
    BitWriter bw;
    write_ue(bw, c.v);
    std::string got;
    for (size_t i = 0; i < bw.bit_count(); ++i)
      got += char('0' + ((bw.bytes()[i >> 3] >> (7 - (i & 7))) & 1));
    CAPTURE(c.v);
    REQUIRE(got == c.bits);
    REQUIRE(int(bw.bit_count()) == ue_length(c.v));
  }
}

TEST_CASE("signed exp-golomb round-trips the full test range") {
  BitWriter bw;
  for (int64_t v = -10000; v <= 10000; ++v) write_se(bw, v);
  BitReader br(bw.bytes(), bw.bit_count());
  for (int64_t v = -10000; v <= 10000; ++v) REQUIRE(read_se(br) == v);
  REQUIRE(br.bits_left() == 0);
}

TEST_CASE("truncated binary n=7 lengths are 2,3,3,3,3,3,3") {
  const int want[7] = {2, 3, 3, 3, 3, 3, 3};
  for (uint32_t s = 0; s < 7; ++s) {
    REQUIRE(tb_length(s, 7) == want[s]);
    BitWriter bw;
    write_tb(bw, s, 7, SyntaxCat::pair_explicit);
    REQUIRE(int(bw.bit_count()) == want[s]);
  }
}

TEST_CASE("truncated binary is exact and complete for n in 1..64") {
  for (uint32_t n = 1; n <= 64; ++n) {
    CAPTURE(n);
    double kraft = 0.0;
    for (uint32_t s = 0; s < n; ++s) {
      BitWriter bw;
      write_tb(bw, s, n, SyntaxCat::pair_explicit);
      REQUIRE(int(bw.bit_count()) == tb_length(s, n));
      BitReader br(bw.bytes(), bw.bit_count());
      REQUIRE(read_tb(br, n) == s);
      REQUIRE(br.bits_left() == 0);
      kraft += std::ldexp(1.0, -tb_length(s, n));
    }
    REQUIRE(kraft == 1.0);
  }
}

TEST_CASE("truncated binary concatenations parse unambiguously") {
  Rng rng(77);
  for (uint32_t n : {2u, 3u, 5u, 7u, 12u, 33u, 64u}) {
    std::vector<uint32_t> syms;
    BitWriter bw;
    for (int i = 0; i < 200; ++i) {
      uint32_t s = uint32_t(rng.below(n));
      syms.push_back(s);
      write_tb(bw, s, n, SyntaxCat::pair_explicit);
    }
    BitReader br(bw.bytes(), bw.bit_count());
    for (uint32_t s : syms) REQUIRE(read_tb(br, n) == s);
    REQUIRE(br.bits_left() == 0);
  }
}

TEST_CASE("quantizer step doubles every six qp and hits qp22 exactly") {
  REQUIRE(Quantizer(4).qstep == 1.0);
  REQUIRE(Quantizer(22).qstep == 8.0);
  REQUIRE(Quantizer(10).qstep == 2.0);
  for (int qp = 0; qp <= 45; ++qp)
    REQUIRE(Quantizer(qp + 6).qstep == Catch::Approx(2.0 * Quantizer(qp).qstep).epsilon(1e-12));
}

TEST_CASE("quantizer deadzone worked example at qp22") {
  Quantizer q(22);
  REQUIRE(q.quantize(20.0) == 2);
  REQUIRE(q.dequantize(2) == 16.0);
  REQUIRE(q.quantize(-20.0) == -2);
  // Threshold to the first nonzero level sits at qstep*2/3.
  REQUIRE(q.quantize(5.32) == 0);
  REQUIRE(q.quantize(5.34) == 1);
  REQUIRE(q.quantize(-5.34) == -1);
  REQUIRE(q.quantize(0.0) == 0);
}

TEST_CASE("rd lambda anchors at qp12 and doubles every three qp") {
  REQUIRE(rd_lambda(12) == Catch::Approx(0.57).epsilon(1e-12));
  for (int qp : {22, 27, 32, 37})
    REQUIRE(rd_lambda(qp + 3) == Catch::Approx(2.0 * rd_lambda(qp)).epsilon(1e-12));
}

TEST_CASE("dc-only 4x4 block costs eight coefficient bits") {
  GridI levels(4, 4, 0);
  levels.at(0, 0) = 1;
  // 1 cbf + 4 last-position + 3 for the +1 level.
  REQUIRE(count_coefficient_bits(levels) == 8);
  BitWriter bw;
  code_coefficients(levels, bw);
  REQUIRE(bw.bit_count() == 8);
}

TEST_CASE("all-zero block costs one coefficient bit") {
  GridI levels(8, 8, 0);
  REQUIRE(count_coefficient_bits(levels) == 1);
  BitWriter bw;
  code_coefficients(levels, bw);
  BitReader br(bw.bytes(), bw.bit_count());
  REQUIRE(decode_coefficients(br, 8, 8) == levels);
}

TEST_CASE("coefficient coding round-trips random sparse blocks") {
  Rng rng(991);
  for (auto [h, w] : {std::pair{4, 4}, {8, 8}, {4, 16}, {32, 8}, {64, 64}}) {
    for (int trial = 0; trial < 20; ++trial) {
      GridI levels(h, w, 0);
      int nz = int(rng.below(size_t(h * w / 2 + 1)));
      for (int i = 0; i < nz; ++i) {
        int r = int(rng.below(size_t(h)));
        int c = int(rng.below(size_t(w)));
        levels.at(r, c) = int(rng.below(41)) - 20;
      }
      BitWriter bw;
      code_coefficients(levels, bw);
      REQUIRE(int(bw.bit_count()) == count_coefficient_bits(levels));
      BitReader br(bw.bytes(), bw.bit_count());
      REQUIRE(decode_coefficients(br, h, w) == levels);
      REQUIRE(br.bits_left() == 0);
    }
  }
}

TEST_CASE("quantize then dequantize bounds the error by the step") {
  Rng rng(5);
  Quantizer q(27);
  for (int i = 0; i < 1000; ++i) {
    double c = rng.uniform(-500.0, 500.0);
    int32_t lvl = q.quantize(c);
    REQUIRE(std::abs(q.dequantize(lvl) - c) <= q.qstep);
  }
}
