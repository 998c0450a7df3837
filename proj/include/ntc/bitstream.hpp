#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

// Rate accounting buckets. Every bit written belongs to exactly one, so the
// per-element tallies always sum to the stream length.
enum class SyntaxCat : uint8_t {
  header = 0,
  split_flag,
  rect_flag,
  mode_flag,
  classic_mode,
  lfnst_idx,
  pair_explicit,
  pair_remainder,
  coeff,
  count_
};

constexpr size_t kSyntaxCatCount = size_t(SyntaxCat::count_);

inline const char* syntax_cat_name(SyntaxCat c) {
  static const char* names[kSyntaxCatCount] = {
      "header",    "split_flag", "rect_flag",      "mode_flag", "classic_mode",
      "lfnst_idx", "pair_explicit", "pair_remainder", "coeff"};
  return names[size_t(c)];
}

struct BitCounts {
  std::array<uint64_t, kSyntaxCatCount> bits{};

  uint64_t total() const {
    uint64_t t = 0;
    for (uint64_t b : bits) t += b;
    return t;
  }
  uint64_t operator[](SyntaxCat c) const { return bits[size_t(c)]; }
  void add(SyntaxCat c, uint64_t n) { bits[size_t(c)] += n; }
  void merge(const BitCounts& o) {
    for (size_t i = 0; i < kSyntaxCatCount; ++i) bits[i] += o.bits[i];
  }
};

// MSB-first bit writer. Bit patterns are position independent (no arithmetic
// coding), so whole buffers can be concatenated at the bit level.
class BitWriter {
public:
  void put_bit(int b, SyntaxCat cat = SyntaxCat::header) {
    size_t byte = nbits_ >> 3;
    if (byte >= buf_.size()) buf_.push_back(0);
    if (b) buf_[byte] |= uint8_t(0x80u >> (nbits_ & 7));
    ++nbits_;
    counts_.add(cat, 1);
  }

  // Writes the low n bits of v, most significant first.
  void put_bits(uint64_t v, int n, SyntaxCat cat = SyntaxCat::header) {
    for (int i = n - 1; i >= 0; --i) put_bit(int((v >> i) & 1), cat);
  }

  void append(const BitWriter& o) {
    for (size_t i = 0; i < o.nbits_; ++i)
      put_bit((o.buf_[i >> 3] >> (7 - (i & 7))) & 1, SyntaxCat::header);
    // put_bit miscounts appended bits as header; fix up from the source tallies.
    counts_.bits[size_t(SyntaxCat::header)] -= o.nbits_;
    counts_.merge(o.counts_);
  }

  size_t bit_count() const { return nbits_; }
  const BitCounts& counts() const { return counts_; }
  const std::vector<uint8_t>& bytes() const { return buf_; }

private:
  std::vector<uint8_t> buf_;
  size_t nbits_ = 0;
  BitCounts counts_;
};

class BitReader {
public:
  explicit BitReader(std::span<const uint8_t> bytes, size_t bit_limit = SIZE_MAX)
      : buf_(bytes), limit_(std::min(bit_limit, bytes.size() * 8)) {}

  void set_element(const char* name) { element_ = name; }

  int get_bit() {
    if (pos_ >= limit_) throw bitstream_error(element_, pos_);
    int b = (buf_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return b;
  }

  uint64_t get_bits(int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | uint64_t(get_bit());
    return v;
  }

  size_t bit_pos() const { return pos_; }
  size_t bits_left() const { return limit_ - pos_; }

private:
  std::span<const uint8_t> buf_;
  size_t limit_;
  size_t pos_ = 0;
  std::string element_ = "unknown";
};

// ---- order-0 exp-Golomb ----------------------------------------------------

inline void write_ue(BitWriter& bw, uint64_t v, SyntaxCat cat = SyntaxCat::coeff) {
  uint64_t x = v + 1;
  int n = 0;
  while ((x >> n) > 1) ++n;
  for (int i = 0; i < n; ++i) bw.put_bit(0, cat);
  bw.put_bits(x, n + 1, cat);
}

inline uint64_t read_ue(BitReader& br) {
  int n = 0;
  while (br.get_bit() == 0) {
    if (++n > 63) throw bitstream_error("exp_golomb_prefix", br.bit_pos());
  }
  uint64_t x = 1;
  for (int i = 0; i < n; ++i) x = (x << 1) | uint64_t(br.get_bit());
  return x - 1;
}

inline uint64_t zigzag_encode(int64_t s) { return s > 0 ? uint64_t(2 * s - 1) : uint64_t(-2 * s); }

inline int64_t zigzag_decode(uint64_t u) {
  return (u & 1) ? int64_t((u + 1) / 2) : -int64_t(u / 2);
}

inline void write_se(BitWriter& bw, int64_t v, SyntaxCat cat = SyntaxCat::coeff) {
  write_ue(bw, zigzag_encode(v), cat);
}

inline int64_t read_se(BitReader& br) { return zigzag_decode(read_ue(br)); }

inline int ue_length(uint64_t v) {
  uint64_t x = v + 1;
  int n = 0;
  while ((x >> n) > 1) ++n;
  return 2 * n + 1;
}

// ---- truncated binary ------------------------------------------------------
// n symbols; the first u = 2^(k+1) - n symbols get k bits, the rest k+1.

inline void write_tb(BitWriter& bw, uint32_t sym, uint32_t n, SyntaxCat cat) {
  if (n <= 1) return;
  int k = ilog2(int(n));
  uint32_t u = (1u << (k + 1)) - n;
  if (sym < u)
    bw.put_bits(sym, k, cat);
  else
    bw.put_bits(sym + u, k + 1, cat);
}

inline uint32_t read_tb(BitReader& br, uint32_t n) {
  if (n <= 1) return 0;
  int k = ilog2(int(n));
  uint32_t u = (1u << (k + 1)) - n;
  uint32_t x = uint32_t(br.get_bits(k));
  if (x < u) return x;
  x = (x << 1) | uint32_t(br.get_bit());
  return x - u;
}

inline int tb_length(uint32_t sym, uint32_t n) {
  if (n <= 1) return 0;
  int k = ilog2(int(n));
  uint32_t u = (1u << (k + 1)) - n;
  return sym < u ? k : k + 1;
}

}  // namespace ntc
