#pragma once

#include "ntc/bitstream.hpp"
#include "ntc/common.hpp"
#include "ntc/quant.hpp"
#include "ntc/scan.hpp"

namespace ntc {

// Level map syntax: coded block flag, then the diagonal scan position of the
// last significant level as a fixed length field, then every level up to and
// including that position as signed exp-Golomb.
inline void code_coefficients(const GridI& levels, BitWriter& bw) {
  const auto scan = diag_scan(levels.rows, levels.cols);
  int last = -1;
  for (int i = 0; i < int(scan.size()); ++i)
    if (levels.at(scan[size_t(i)].r, scan[size_t(i)].c) != 0) last = i;
  bw.put_bit(last >= 0 ? 1 : 0, SyntaxCat::coeff);
  if (last < 0) return;
  bw.put_bits(uint64_t(last), ceil_log2(levels.rows * levels.cols), SyntaxCat::coeff);
  for (int i = 0; i <= last; ++i)
    write_se(bw, levels.at(scan[size_t(i)].r, scan[size_t(i)].c), SyntaxCat::coeff);
}

inline GridI decode_coefficients(BitReader& br, int h, int w) {
  br.set_element("coeff");
  GridI levels(h, w);
  if (br.get_bit() == 0) return levels;
  const auto scan = diag_scan(h, w);
  int last = int(br.get_bits(ceil_log2(h * w)));
  if (last >= int(scan.size())) throw bitstream_error("coeff_last_pos", br.bit_pos());
  for (int i = 0; i <= last; ++i)
    levels.at(scan[size_t(i)].r, scan[size_t(i)].c) = int(read_se(br));
  return levels;
}

inline int count_coefficient_bits(const GridI& levels) {
  const auto scan = diag_scan(levels.rows, levels.cols);
  int last = -1;
  for (int i = 0; i < int(scan.size()); ++i)
    if (levels.at(scan[size_t(i)].r, scan[size_t(i)].c) != 0) last = i;
  if (last < 0) return 1;
  int bits = 1 + ceil_log2(levels.rows * levels.cols);
  for (int i = 0; i <= last; ++i)
    bits += ue_length(zigzag_encode(levels.at(scan[size_t(i)].r, scan[size_t(i)].c)));
  return bits;
}

inline GridI quantize_grid(const GridD& coeffs, const Quantizer& q) {
  GridI out(coeffs.rows, coeffs.cols);
  for (size_t i = 0; i < coeffs.v.size(); ++i) out.v[i] = q.quantize(coeffs.v[i]);
  return out;
}

inline GridD dequantize_grid(const GridI& levels, const Quantizer& q) {
  GridD out(levels.rows, levels.cols);
  for (size_t i = 0; i < levels.v.size(); ++i) out.v[i] = q.dequantize(levels.v[i]);
  return out;
}

}  // namespace ntc
