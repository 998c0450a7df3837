#pragma once

#include <array>
#include <string>

#include "ntc/bitstream.hpp"
#include "ntc/common.hpp"
#include "ntc/lfnst.hpp"

namespace ntc {

// How the pair choice for network predicted blocks reaches the decoder.
//   default_pair:   no bits, pair is always 0
//   fully_explicit: truncated binary of the pair itself
//   inference:      no bits, decoder reruns the network argmax
//   prediction:     truncated binary of the distance to the network argmax
enum class Scheme : uint8_t {
  default_pair = 0,
  fully_explicit = 1,
  inference = 2,
  prediction = 3,
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::default_pair: return "default";
    case Scheme::fully_explicit: return "explicit";
    case Scheme::inference: return "inference";
    case Scheme::prediction: return "prediction";
  }
  throw error("bad scheme value");
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "default") return Scheme::default_pair;
  if (s == "explicit") return Scheme::fully_explicit;
  if (s == "inference") return Scheme::inference;
  if (s == "prediction") return Scheme::prediction;
  throw error("unknown scheme: " + s);
}

// 14 logits, two independent 7 way heads: [0,7) scores pairs under matrix 1,
// [7,14) under matrix 2.
using LogitVector = std::array<double, 14>;

inline int head_argmax(const LogitVector& u, int lfnst_idx) {
  const int base = lfnst_idx == 1 ? 0 : 7;
  int arg = 0;
  for (int i = 1; i < kNumPairs; ++i)
    if (u[size_t(base + i)] > u[size_t(base + arg)]) arg = i;
  return arg;
}

// ---- lfnst index, code {0:"0", 1:"10", 2:"11"} -----------------------------

inline void write_lfnst_idx(BitWriter& bw, int idx) {
  if (idx == 0) {
    bw.put_bit(0, SyntaxCat::lfnst_idx);
  } else {
    bw.put_bit(1, SyntaxCat::lfnst_idx);
    bw.put_bit(idx == 2 ? 1 : 0, SyntaxCat::lfnst_idx);
  }
}

inline int read_lfnst_idx(BitReader& br) {
  br.set_element("lfnst_idx");
  if (br.get_bit() == 0) return 0;
  return br.get_bit() ? 2 : 1;
}

inline int lfnst_idx_bits(int idx) { return idx == 0 ? 1 : 2; }

// ---- pair signaling per scheme ---------------------------------------------

inline int pair_bits(Scheme scheme, int pair, int predicted) {
  switch (scheme) {
    case Scheme::default_pair:
    case Scheme::inference: return 0;
    case Scheme::fully_explicit: return tb_length(uint32_t(pair), kNumPairs);
    case Scheme::prediction:
      return tb_length(uint32_t((pair - predicted + kNumPairs) % kNumPairs), kNumPairs);
  }
  throw error("bad scheme value");
}

inline void write_pair(BitWriter& bw, Scheme scheme, int pair, int predicted) {
  switch (scheme) {
    case Scheme::default_pair:
    case Scheme::inference: return;
    case Scheme::fully_explicit:
      write_tb(bw, uint32_t(pair), kNumPairs, SyntaxCat::pair_explicit);
      return;
    case Scheme::prediction:
      write_tb(bw, uint32_t((pair - predicted + kNumPairs) % kNumPairs), kNumPairs,
               SyntaxCat::pair_remainder);
      return;
  }
  throw error("bad scheme value");
}

inline int read_pair(BitReader& br, Scheme scheme, int predicted) {
  switch (scheme) {
    case Scheme::default_pair: return 0;
    case Scheme::inference: return predicted;
    case Scheme::fully_explicit:
      br.set_element("pair_explicit");
      return int(read_tb(br, kNumPairs));
    case Scheme::prediction: {
      br.set_element("pair_remainder");
      int r = int(read_tb(br, kNumPairs));
      return (predicted + r) % kNumPairs;
    }
  }
  throw error("bad scheme value");
}

}  // namespace ntc
