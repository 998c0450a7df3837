#pragma once

#include <utility>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

struct ScanPos {
  int r, c;
  bool operator==(const ScanPos&) const = default;
};

// Diagonal order: d = r + c ascending, r ascending inside a diagonal.
inline std::vector<ScanPos> diag_scan(int h, int w) {
  std::vector<ScanPos> order;
  order.reserve(size_t(h) * size_t(w));
  for (int d = 0; d <= h + w - 2; ++d)
    for (int r = std::max(0, d - w + 1); r <= std::min(d, h - 1); ++r)
      order.push_back({r, d - r});
  return order;
}

// Secondary transform input regions. The small region is the top left 4x4;
// the large one is the top left 8x8 with its bottom right 4x4 quadrant
// removed, leaving 48 positions. Order is the same diagonal rule.
enum class RegionFamily : uint8_t { small16 = 0, large48 = 1 };

inline RegionFamily region_family_for(int h, int w) {
  return std::min(h, w) <= 4 ? RegionFamily::small16 : RegionFamily::large48;
}

inline const std::vector<ScanPos>& region_scan(RegionFamily fam) {
  static const std::vector<ScanPos> small = diag_scan(4, 4);
  static const std::vector<ScanPos> large = [] {
    std::vector<ScanPos> v;
    for (const ScanPos& p : diag_scan(8, 8))
      if (!(p.r >= 4 && p.c >= 4)) v.push_back(p);
    return v;
  }();
  return fam == RegionFamily::small16 ? small : large;
}

inline int region_size(RegionFamily fam) { return fam == RegionFamily::small16 ? 16 : 48; }

}  // namespace ntc
