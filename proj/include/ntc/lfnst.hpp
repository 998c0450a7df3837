#pragma once

#include <array>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "ntc/common.hpp"
#include "ntc/scan.hpp"

namespace ntc {

// A transform pair choice: which of the 4 matrix sets, and whether the
// coefficient block is transposed before the region is read.
struct PairSpec {
  int set;
  bool transpose;
  bool operator==(const PairSpec&) const = default;
};

constexpr int kNumPairs = 7;
constexpr int kNumSets = 4;
constexpr int kSecondaryCoeffs = 16;

inline PairSpec pair_index_to_spec(int pair) {
  static constexpr int set_of[kNumPairs] = {0, 1, 2, 3, 3, 2, 1};
  static constexpr bool tr_of[kNumPairs] = {false, false, false, false, true, true, true};
  if (pair < 0 || pair >= kNumPairs) throw error("pair index out of range");
  return {set_of[pair], tr_of[pair]};
}

// Directional mode index (wide-angle extended range [-14,83]) to pair index.
inline int mode_to_pair(int mode) {
  if (mode == 0 || mode == 1) return 0;
  if ((mode >= -14 && mode <= -1) || (mode >= 2 && mode <= 12)) return 1;
  if (mode >= 13 && mode <= 23) return 2;
  if (mode >= 24 && mode <= 34) return 3;
  if (mode >= 35 && mode <= 44) return 4;
  if (mode >= 45 && mode <= 55) return 5;
  if (mode >= 56 && mode <= 83) return 6;
  throw error("mode outside wide-angle range: " + std::to_string(mode));
}

// 4 sets x 2 families x 2 matrices, each 16 x R with orthonormal rows.
struct TransformBank {
  std::array<std::array<std::array<GridD, 2>, 2>, kNumSets> m;  // [set][family][matrix]

  const GridD& matrix(int set, RegionFamily fam, int lfnst_idx) const {
    if (lfnst_idx < 1 || lfnst_idx > 2) throw error("lfnst index must be 1 or 2");
    return m[size_t(set)][size_t(fam)][size_t(lfnst_idx - 1)];
  }
  GridD& matrix(int set, RegionFamily fam, int lfnst_idx) {
    if (lfnst_idx < 1 || lfnst_idx > 2) throw error("lfnst index must be 1 or 2");
    return m[size_t(set)][size_t(fam)][size_t(lfnst_idx - 1)];
  }
};

// Forward: read R region coefficients in scan order from the (optionally
// transposed) block, project to 16, zero everything, store the 16 values in
// the first scan slots. Positions outside the region are forced to zero,
// which is what makes the inverse exact on its own output.
inline GridD secondary_forward(const GridD& coeffs, const PairSpec& spec, const GridD& mat) {
  GridD work = spec.transpose ? coeffs.transposed() : coeffs;
  RegionFamily fam = region_family_for(work.rows, work.cols);
  const auto& scan = region_scan(fam);
  const int R = region_size(fam);
  if (mat.rows != kSecondaryCoeffs || mat.cols != R) throw error("bank matrix shape mismatch");
  std::vector<double> g(size_t(R), 0.0);
  for (int i = 0; i < R; ++i) g[size_t(i)] = work.at(scan[size_t(i)].r, scan[size_t(i)].c);
  GridD out(work.rows, work.cols);
  for (int k = 0; k < kSecondaryCoeffs; ++k) {
    double acc = 0;
    for (int i = 0; i < R; ++i) acc += mat.at(k, i) * g[size_t(i)];
    out.at(scan[size_t(k)].r, scan[size_t(k)].c) = acc;
  }
  return spec.transpose ? out.transposed() : out;
}

inline GridD secondary_inverse(const GridD& coeffs, const PairSpec& spec, const GridD& mat) {
  GridD work = spec.transpose ? coeffs.transposed() : coeffs;
  RegionFamily fam = region_family_for(work.rows, work.cols);
  const auto& scan = region_scan(fam);
  const int R = region_size(fam);
  if (mat.rows != kSecondaryCoeffs || mat.cols != R) throw error("bank matrix shape mismatch");
  std::vector<double> s(kSecondaryCoeffs);
  for (int k = 0; k < kSecondaryCoeffs; ++k)
    s[size_t(k)] = work.at(scan[size_t(k)].r, scan[size_t(k)].c);
  GridD out(work.rows, work.cols);
  for (int i = 0; i < R; ++i) {
    double acc = 0;
    for (int k = 0; k < kSecondaryCoeffs; ++k) acc += mat.at(k, i) * s[size_t(k)];
    out.at(scan[size_t(i)].r, scan[size_t(i)].c) = acc;
  }
  return spec.transpose ? out.transposed() : out;
}

// ---- bank file, magic LFB1, f64 little endian ------------------------------

inline void save_bank(const TransformBank& bank, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw error("cannot open bank file for writing: " + path);
  std::fwrite("LFB1", 1, 4, f);
  auto put_u16 = [&](uint16_t v) {
    uint8_t b[2] = {uint8_t(v & 0xff), uint8_t(v >> 8)};
    std::fwrite(b, 1, 2, f);
  };
  for (int set = 0; set < kNumSets; ++set)
    for (int fam = 0; fam < 2; ++fam)
      for (int mi = 0; mi < 2; ++mi) {
        const GridD& m = bank.m[size_t(set)][size_t(fam)][size_t(mi)];
        put_u16(uint16_t(set));
        put_u16(uint16_t(fam));
        put_u16(uint16_t(mi));
        put_u16(uint16_t(m.rows));
        put_u16(uint16_t(m.cols));
        std::fwrite(m.v.data(), sizeof(double), m.v.size(), f);
      }
  std::fclose(f);
}

inline TransformBank load_bank(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error("cannot open bank file: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "LFB1", 4) != 0) {
    std::fclose(f);
    throw error("bad bank magic in " + path);
  }
  auto get_u16 = [&]() {
    uint8_t b[2];
    if (std::fread(b, 1, 2, f) != 2) throw error("truncated bank file: " + path);
    return uint16_t(b[0] | (uint16_t(b[1]) << 8));
  };
  TransformBank bank;
  try {
    for (int n = 0; n < kNumSets * 2 * 2; ++n) {
      int set = get_u16(), fam = get_u16(), mi = get_u16();
      int rows = get_u16(), cols = get_u16();
      if (set >= kNumSets || fam >= 2 || mi >= 2) throw error("bad bank record header");
      GridD m(rows, cols);
      if (std::fread(m.v.data(), sizeof(double), m.v.size(), f) != m.v.size())
        throw error("truncated bank payload: " + path);
      bank.m[size_t(set)][size_t(fam)][size_t(mi)] = std::move(m);
    }
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  return bank;
}

inline uint64_t file_hash(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error("cannot open for hashing: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  uint8_t buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) h = fnv1a64(buf, n, h);
  std::fclose(f);
  return h;
}

}  // namespace ntc
