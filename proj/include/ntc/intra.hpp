#pragma once

#include <cmath>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

// References for one block: top runs 2w samples right of the corner, left
// runs 2h samples below it.
struct IntraRefs {
  std::vector<double> top;
  std::vector<double> left;
  double corner = 0;
};

inline IntraRefs build_refs(const Plane& recon, const GridU8& decoded, int y, int x, int h,
                            int w) {
  const int nt = 2 * w, nl = 2 * h;
  std::vector<double> vals(size_t(nl + 1 + nt));
  std::vector<uint8_t> have(size_t(nl + 1 + nt), 0);
  auto probe = [&](int py, int px, size_t slot) {
    if (py >= 0 && py < recon.height && px >= 0 && px < recon.width && decoded.at(py, px)) {
      vals[slot] = double(recon.at(py, px));
      have[slot] = 1;
    }
  };
  // order: left bottom to top, corner, top left to right
  for (int j = 0; j < nl; ++j) probe(y + nl - 1 - j, x - 1, size_t(j));
  probe(y - 1, x - 1, size_t(nl));
  for (int i = 0; i < nt; ++i) probe(y - 1, x + i, size_t(nl + 1 + i));
  bool any = false;
  for (uint8_t f : have) any = any || f;
  if (!any) {
    double mid = double(1u << (recon.bitdepth - 1));
    for (double& v : vals) v = mid;
  } else {
    size_t first = 0;
    while (!have[first]) ++first;
    for (size_t i = 0; i < first; ++i) vals[i] = vals[first];
    for (size_t i = first + 1; i < vals.size(); ++i)
      if (!have[i]) vals[i] = vals[i - 1];
  }
  IntraRefs r;
  r.left.assign(size_t(nl), 0);
  for (int j = 0; j < nl; ++j) r.left[size_t(j)] = vals[size_t(nl - 1 - j)];
  r.corner = vals[size_t(nl)];
  r.top.assign(vals.begin() + nl + 1, vals.end());
  return r;
}

// Aspect ratio substitution: near-diagonal modes on rectangular blocks swap
// to wide angles past the long side's diagonal.
inline int wide_angle_remap(int mode, int h, int w) {
  if (h == w || mode < 2 || mode > 66) return mode;
  int wh = std::abs(ilog2(w) - ilog2(h));
  if (w > h) {
    int thr = wh > 1 ? 8 + 2 * wh : 8;
    if (mode < thr) return mode + 65;
  } else {
    int thr = wh > 1 ? 60 - 2 * wh : 60;
    if (mode > thr) return mode - 67;
  }
  return mode;
}

// Displacement per row in 1/32 sample units, indexed by distance from the
// pure vertical/horizontal direction.
inline int intra_angle(int d) {
  static const int tab[31] = {0,  1,  2,  3,  4,  6,  8,  10, 12,  14,  16,
                              18, 20, 23, 26, 29, 32, 35, 39, 45,  51,  57,
                              64, 73, 86, 102, 128, 171, 256, 341, 512};
  int ad = std::abs(d);
  if (ad > 30) throw error("angular displacement out of range");
  return d < 0 ? -tab[ad] : tab[ad];
}

namespace detail {

// Vertical family: predict rows from the top reference, negative angles
// project left references onto the extended main array.
inline GridD angular_vertical(const std::vector<double>& top, const std::vector<double>& left,
                              double corner, int h, int w, int a) {
  int ext = a < 0 ? ((h * -a) >> 5) + 1 : 0;
  std::vector<double> main(size_t(ext + 2 * w));
  for (int i = 0; i < 2 * w; ++i) main[size_t(ext + i)] = top[size_t(i)];
  for (int i = 1; i <= ext; ++i) {
    double t = double(i) * 32.0 / double(-a);
    int j = int(std::lround(t)) - 1;
    main[size_t(ext - i)] = j < 0 ? corner : left[size_t(std::min(j, 2 * h - 1))];
  }
  GridD out(h, w);
  for (int y = 0; y < h; ++y) {
    int pos = (y + 1) * a;
    int off = pos >> 5;
    int frac = pos & 31;
    for (int x = 0; x < w; ++x) {
      int i0 = std::clamp(x + off, -ext, 2 * w - 1);
      int i1 = std::clamp(x + off + 1, -ext, 2 * w - 1);
      out.at(y, x) =
          ((32 - frac) * main[size_t(ext + i0)] + frac * main[size_t(ext + i1)]) / 32.0;
    }
  }
  return out;
}

}  // namespace detail

// effective mode: 0 planar, 1 DC, otherwise an angular index already through
// wide_angle_remap. Output samples are rounded and clipped.
inline GridD predict_classic(const IntraRefs& r, int mode, int h, int w, int bitdepth) {
  GridD out(h, w);
  if (mode == 0) {
    double tr = r.top[size_t(w)];
    double bl = r.left[size_t(h)];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double ph = (double(w - 1 - x) * r.left[size_t(y)] + double(x + 1) * tr) / double(w);
        double pv = (double(h - 1 - y) * r.top[size_t(x)] + double(y + 1) * bl) / double(h);
        out.at(y, x) = 0.5 * (ph + pv);
      }
  } else if (mode == 1) {
    double s = 0;
    for (int x = 0; x < w; ++x) s += r.top[size_t(x)];
    for (int y = 0; y < h; ++y) s += r.left[size_t(y)];
    double dc = s / double(w + h);
    for (double& v : out.v) v = dc;
  } else if (mode >= 34) {
    out = detail::angular_vertical(r.top, r.left, r.corner, h, w, intra_angle(mode - 50));
  } else {
    GridD t = detail::angular_vertical(r.left, r.top, r.corner, w, h, intra_angle(18 - mode));
    out = t.transposed();
  }
  for (double& v : out.v) v = clip_sample(v, bitdepth);
  return out;
}

inline const std::vector<int>& classic_search_modes(bool full) {
  static const std::vector<int> reduced = {0, 1, 2, 10, 18, 26, 34, 42, 50, 58, 66};
  static const std::vector<int> all = [] {
    std::vector<int> v;
    for (int m = 0; m <= 66; ++m) v.push_back(m);
    return v;
  }();
  return full ? all : reduced;
}

}  // namespace ntc
