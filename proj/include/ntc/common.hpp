#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntc {

using sample_t = uint16_t;

class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class bitstream_error : public error {
public:
  bitstream_error(const std::string& element, size_t bit_offset)
      : error("bitstream error at bit " + std::to_string(bit_offset) + " in element '" + element + "'"),
        element_(element), bit_offset_(bit_offset) {}
  const std::string& element() const { return element_; }
  size_t bit_offset() const { return bit_offset_; }

private:
  std::string element_;
  size_t bit_offset_;
};

class net_error : public error {
public:
  net_error(int layer_index, const std::string& msg)
      : error("layer " + std::to_string(layer_index) + ": " + msg), layer_index_(layer_index) {}
  int layer_index() const { return layer_index_; }

private:
  int layer_index_;
};

// Row-major 2-D array. rows/cols of zero means an empty grid.
template <typename T>
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  Grid() = default;
  Grid(int r, int c, T fill = T{}) : rows(r), cols(c), v(size_t(r) * size_t(c), fill) {}

  T& at(int r, int c) { return v[size_t(r) * cols + c]; }
  const T& at(int r, int c) const { return v[size_t(r) * cols + c]; }
  size_t numel() const { return v.size(); }
  bool empty() const { return v.empty(); }

  Grid<T> transposed() const {
    Grid<T> t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  bool operator==(const Grid<T>& o) const { return rows == o.rows && cols == o.cols && v == o.v; }
};

using GridD = Grid<double>;
using GridI = Grid<int32_t>;
using GridS = Grid<sample_t>;
using GridU8 = Grid<uint8_t>;

// Luma picture. Samples live in [0, 2^bitdepth - 1].
struct Plane {
  int width = 0;
  int height = 0;
  int bitdepth = 8;
  std::vector<sample_t> v;

  Plane() = default;
  Plane(int w, int h, int bd, sample_t fill = 0)
      : width(w), height(h), bitdepth(bd), v(size_t(w) * size_t(h), fill) {}

  sample_t& at(int y, int x) { return v[size_t(y) * width + x]; }
  const sample_t& at(int y, int x) const { return v[size_t(y) * width + x]; }
  int max_value() const { return (1 << bitdepth) - 1; }

  bool operator==(const Plane& o) const {
    return width == o.width && height == o.height && bitdepth == o.bitdepth && v == o.v;
  }
};

inline int clip_sample(double x, int bitdepth) {
  int hi = (1 << bitdepth) - 1;
  if (x < 0.0) return 0;
  if (x > hi) return hi;
  return int(std::lround(x));
}

inline int iround(double x) { return int(std::lround(x)); }

inline bool is_pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

inline int ilog2(int x) {
  int l = 0;
  while ((1 << (l + 1)) <= x) ++l;
  return l;
}

inline int ceil_log2(int x) {
  int l = 0;
  while ((1 << l) < x) ++l;
  return l;
}

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const uint8_t* p = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::vector<uint8_t>& b) { return fnv1a64(b.data(), b.size()); }

}  // namespace ntc
