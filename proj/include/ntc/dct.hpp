#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

// Orthonormal DCT-II basis, rows are basis vectors.
inline const GridD& dct2_matrix(int n) {
  static std::map<int, GridD> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GridD m(n, n);
  const double pi = std::acos(-1.0);
  for (int k = 0; k < n; ++k) {
    double s = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i) m.at(k, i) = s * std::cos(pi * (2 * i + 1) * k / (2.0 * n));
  }
  return cache.emplace(n, std::move(m)).first->second;
}

// C[u][v] = sum_{r,c} x[r][c] a_h[u][r] a_w[v][c]
inline GridD forward_dct2(const GridD& x) {
  const GridD& ah = dct2_matrix(x.rows);
  const GridD& aw = dct2_matrix(x.cols);
  GridD t(x.rows, x.cols);
  for (int u = 0; u < x.rows; ++u)
    for (int c = 0; c < x.cols; ++c) {
      double acc = 0;
      for (int r = 0; r < x.rows; ++r) acc += ah.at(u, r) * x.at(r, c);
      t.at(u, c) = acc;
    }
  GridD y(x.rows, x.cols);
  for (int u = 0; u < x.rows; ++u)
    for (int v = 0; v < x.cols; ++v) {
      double acc = 0;
      for (int c = 0; c < x.cols; ++c) acc += t.at(u, c) * aw.at(v, c);
      y.at(u, v) = acc;
    }
  return y;
}

inline GridD inverse_dct2(const GridD& y) {
  const GridD& ah = dct2_matrix(y.rows);
  const GridD& aw = dct2_matrix(y.cols);
  GridD t(y.rows, y.cols);
  for (int r = 0; r < y.rows; ++r)
    for (int v = 0; v < y.cols; ++v) {
      double acc = 0;
      for (int u = 0; u < y.rows; ++u) acc += ah.at(u, r) * y.at(u, v);
      t.at(r, v) = acc;
    }
  GridD x(y.rows, y.cols);
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < y.cols; ++c) {
      double acc = 0;
      for (int v = 0; v < y.cols; ++v) acc += t.at(r, v) * aw.at(v, c);
      x.at(r, c) = acc;
    }
  return x;
}

}  // namespace ntc
