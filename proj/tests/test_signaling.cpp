#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ntc/signaling.hpp"

using namespace ntc;

TEST_CASE("scheme names round-trip through the parser") {
  for (Scheme s : {Scheme::default_pair, Scheme::fully_explicit, Scheme::inference,
                   Scheme::prediction})
    REQUIRE(scheme_from_string(scheme_name(s)) == s);
  REQUIRE(scheme_from_string("default") == Scheme::default_pair);
  REQUIRE(scheme_from_string("explicit") == Scheme::fully_explicit);
  REQUIRE(scheme_from_string("inference") == Scheme::inference);
  REQUIRE(scheme_from_string("prediction") == Scheme::prediction);
  REQUIRE_THROWS_AS(scheme_from_string("bogus"), error);
}

TEST_CASE("lfnst index code is 0, 10, 11") {
  for (int idx : {0, 1, 2}) {
    BitWriter bw;
    write_lfnst_idx(bw, idx);
    REQUIRE(int(bw.bit_count()) == lfnst_idx_bits(idx));
    BitReader br(bw.bytes(), bw.bit_count());
    REQUIRE(read_lfnst_idx(br) == idx);
    REQUIRE(br.bits_left() == 0);
  }
  REQUIRE(lfnst_idx_bits(0) == 1);
  REQUIRE(lfnst_idx_bits(1) == 2);
  REQUIRE(lfnst_idx_bits(2) == 2);
}

TEST_CASE("head argmax reads disjoint halves and breaks ties low") {
  LogitVector u{};
  REQUIRE(head_argmax(u, 1) == 0);
  REQUIRE(head_argmax(u, 2) == 0);
  u[3] = 5.0;
  u[7 + 6] = 2.0;
  REQUIRE(head_argmax(u, 1) == 3);
  REQUIRE(head_argmax(u, 2) == 6);
  // Equal maxima pick the lowest index.
  u[5] = 5.0;
  REQUIRE(head_argmax(u, 1) == 3);
  u[2] = 5.0;
  REQUIRE(head_argmax(u, 1) == 2);
}

TEST_CASE("pair signaling costs zero bits when nothing is coded") {
  for (int pair = 0; pair < kNumPairs; ++pair)
    for (int pred = 0; pred < kNumPairs; ++pred) {
      REQUIRE(pair_bits(Scheme::default_pair, pair, pred) == 0);
      REQUIRE(pair_bits(Scheme::inference, pair, pred) == 0);
    }
}

TEST_CASE("explicit pair bits follow the truncated binary lengths") {
  for (int pair = 0; pair < kNumPairs; ++pair)
    REQUIRE(pair_bits(Scheme::fully_explicit, pair, 3) == (pair == 0 ? 2 : 3));
}

TEST_CASE("prediction scheme spends two bits exactly on a hit") {
  for (int pred = 0; pred < kNumPairs; ++pred) {
    REQUIRE(pair_bits(Scheme::prediction, pred, pred) == 2);
    for (int pair = 0; pair < kNumPairs; ++pair)
      if (pair != pred) REQUIRE(pair_bits(Scheme::prediction, pair, pred) == 3);
  }
}

TEST_CASE("remainder coding round-trips the full 7x7 grid") {
  for (int pred = 0; pred < kNumPairs; ++pred)
    for (int pair = 0; pair < kNumPairs; ++pair) {
      BitWriter bw;
      write_pair(bw, Scheme::prediction, pair, pred);
      REQUIRE(int(bw.bit_count()) == pair_bits(Scheme::prediction, pair, pred));
      BitReader br(bw.bytes(), bw.bit_count());
      REQUIRE(read_pair(br, Scheme::prediction, pred) == pair);
      REQUIRE(br.bits_left() == 0);
    }
}

TEST_CASE("explicit coding round-trips every pair independent of prediction") {
  for (int pred = 0; pred < kNumPairs; ++pred)
    for (int pair = 0; pair < kNumPairs; ++pair) {
      BitWriter bw;
      write_pair(bw, Scheme::fully_explicit, pair, pred);
      BitReader br(bw.bytes(), bw.bit_count());
      REQUIRE(read_pair(br, Scheme::fully_explicit, 6 - pred) == pair);
    }
}

TEST_CASE("zero-bit schemes decode from the side information alone") {
  BitWriter bw;
  write_pair(bw, Scheme::default_pair, 4, 2);
  write_pair(bw, Scheme::inference, 4, 2);
  REQUIRE(bw.bit_count() == 0);
  BitReader br(bw.bytes(), 0);
  REQUIRE(read_pair(br, Scheme::default_pair, 5) == 0);
  REQUIRE(read_pair(br, Scheme::inference, 5) == 5);
}

TEST_CASE("remainder of the rd pick against the prediction is cyclic") {
  // r = (pair - pred) mod 7 and pair = (pred + r) mod 7 are inverses.
  for (int pred = 0; pred < kNumPairs; ++pred)
    for (int r = 0; r < kNumPairs; ++r) {
      int pair = (pred + r) % kNumPairs;
      REQUIRE((pair - pred + kNumPairs) % kNumPairs == r);
    }
}
