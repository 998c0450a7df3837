#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "ntc/codec.hpp"
#include "ntc/common.hpp"
#include "ntc/context.hpp"

namespace ntc {

// Fixed size records for one network geometry, magic NTD1, little endian.
// Layout after the header: above f32[], left f32[], target f32[], i1 u8,
// i2 u8, qp u8, pad u8, cost0 f64, costs f64[14].

struct DatasetDims {
  int net_h = 0, net_w = 0;
  int above_n = 0, left_n = 0, target_n = 0;

  static DatasetDims of(int net_h, int net_w) {
    const auto [n_a, n_l] = context_shape(net_h, net_w);
    DatasetDims d;
    d.net_h = net_h;
    d.net_w = net_w;
    d.above_n = n_a * (n_l + net_w);
    d.left_n = net_h * n_l;
    d.target_n = net_h * net_w;
    return d;
  }

  size_t record_bytes() const {
    return size_t(above_n + left_n + target_n) * 4 + 4 + 8 + 14 * 8;
  }
};

namespace detail {

inline void put_u16(FILE* f, uint16_t v) {
  uint8_t b[2] = {uint8_t(v & 0xff), uint8_t(v >> 8)};
  std::fwrite(b, 1, 2, f);
}
inline void put_u32(FILE* f, uint32_t v) {
  uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = uint8_t(v >> (8 * i));
  std::fwrite(b, 1, 4, f);
}
inline void put_u64(FILE* f, uint64_t v) {
  uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
  std::fwrite(b, 1, 8, f);
}
inline void put_f32(FILE* f, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(f, u);
}
inline void put_f64(FILE* f, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(f, u);
}

inline uint16_t take_u16(FILE* f) {
  uint8_t b[2];
  if (std::fread(b, 1, 2, f) != 2) throw error("dataset file truncated");
  return uint16_t(b[0] | (uint16_t(b[1]) << 8));
}
inline uint32_t take_u32(FILE* f) {
  uint8_t b[4];
  if (std::fread(b, 1, 4, f) != 4) throw error("dataset file truncated");
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline uint64_t take_u64(FILE* f) {
  uint8_t b[8];
  if (std::fread(b, 1, 8, f) != 8) throw error("dataset file truncated");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline float take_f32(FILE* f) {
  uint32_t u = take_u32(f);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}
inline double take_f64(FILE* f) {
  uint64_t u = take_u64(f);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace detail

// Appends records and patches the count on close, so a writer can stay open
// across many images.
class DatasetWriter {
public:
  DatasetWriter(const std::string& path, int net_h, int net_w)
      : dims_(DatasetDims::of(net_h, net_w)), path_(path) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw error("cannot open dataset file for writing: " + path);
    std::fwrite("NTD1", 1, 4, f_);
    detail::put_u16(f_, uint16_t(net_h));
    detail::put_u16(f_, uint16_t(net_w));
    detail::put_u32(f_, uint32_t(dims_.above_n));
    detail::put_u32(f_, uint32_t(dims_.left_n));
    detail::put_u32(f_, uint32_t(dims_.target_n));
    detail::put_u64(f_, 0);
  }

  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  ~DatasetWriter() {
    if (f_) {
      std::fseek(f_, 20, SEEK_SET);
      detail::put_u64(f_, count_);
      std::fclose(f_);
    }
  }

  void append(const BlockObservation& o) {
    if (o.net_h != dims_.net_h || o.net_w != dims_.net_w ||
        int(o.above.size()) != dims_.above_n || int(o.left.size()) != dims_.left_n ||
        int(o.target.size()) != dims_.target_n)
      throw error("observation shape does not match dataset " + path_);
    for (float v : o.above) detail::put_f32(f_, v);
    for (float v : o.left) detail::put_f32(f_, v);
    for (float v : o.target) detail::put_f32(f_, v);
    const uint8_t tail[4] = {o.i1, o.i2, o.qp, 0};
    std::fwrite(tail, 1, 4, f_);
    detail::put_f64(f_, o.cost0);
    for (double c : o.costs) detail::put_f64(f_, c);
    ++count_;
  }

  uint64_t count() const { return count_; }
  const DatasetDims& dims() const { return dims_; }

private:
  DatasetDims dims_;
  std::string path_;
  FILE* f_ = nullptr;
  uint64_t count_ = 0;
};

// Whole dataset in memory, flat row-major arrays indexed by record.
struct Dataset {
  DatasetDims dims;
  uint64_t count = 0;
  std::vector<float> above, left, target;
  std::vector<uint8_t> i1, i2, qp;
  std::vector<double> cost0;
  std::vector<double> costs;  // count x 14
};

// max_records of zero loads everything; otherwise an evenly strided subset,
// so the kept records still span the whole collection sequence.
inline Dataset load_dataset(const std::string& path, uint64_t max_records = 0) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error("cannot open dataset file: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "NTD1", 4) != 0) {
    std::fclose(f);
    throw error("bad dataset magic in " + path);
  }
  Dataset ds;
  ds.dims.net_h = detail::take_u16(f);
  ds.dims.net_w = detail::take_u16(f);
  ds.dims.above_n = int(detail::take_u32(f));
  ds.dims.left_n = int(detail::take_u32(f));
  ds.dims.target_n = int(detail::take_u32(f));
  const uint64_t total = detail::take_u64(f);
  const DatasetDims want = DatasetDims::of(ds.dims.net_h, ds.dims.net_w);
  if (ds.dims.above_n != want.above_n || ds.dims.left_n != want.left_n ||
      ds.dims.target_n != want.target_n) {
    std::fclose(f);
    throw error("dataset dims inconsistent with geometry in " + path);
  }

  const uint64_t keep = (max_records == 0 || max_records >= total) ? total : max_records;
  ds.count = keep;
  ds.above.reserve(size_t(keep) * size_t(ds.dims.above_n));
  ds.left.reserve(size_t(keep) * size_t(ds.dims.left_n));
  ds.target.reserve(size_t(keep) * size_t(ds.dims.target_n));
  ds.i1.reserve(size_t(keep));
  ds.i2.reserve(size_t(keep));
  ds.qp.reserve(size_t(keep));
  ds.cost0.reserve(size_t(keep));
  ds.costs.reserve(size_t(keep) * 14);

  const size_t rec_bytes = ds.dims.record_bytes();
  uint64_t next_pick = 0;
  for (uint64_t i = 0; i < total && next_pick < keep; ++i) {
    // record i is kept when i == floor(next_pick * total / keep)
    if (i != next_pick * total / keep) {
      if (std::fseek(f, long(rec_bytes), SEEK_CUR) != 0) {
        std::fclose(f);
        throw error("dataset file truncated: " + path);
      }
      continue;
    }
    try {
      for (int j = 0; j < ds.dims.above_n; ++j) ds.above.push_back(detail::take_f32(f));
      for (int j = 0; j < ds.dims.left_n; ++j) ds.left.push_back(detail::take_f32(f));
      for (int j = 0; j < ds.dims.target_n; ++j) ds.target.push_back(detail::take_f32(f));
      uint8_t tail[4];
      if (std::fread(tail, 1, 4, f) != 4) throw error("dataset file truncated");
      ds.i1.push_back(tail[0]);
      ds.i2.push_back(tail[1]);
      ds.qp.push_back(tail[2]);
      ds.cost0.push_back(detail::take_f64(f));
      for (int j = 0; j < 14; ++j) ds.costs.push_back(detail::take_f64(f));
    } catch (...) {
      std::fclose(f);
      throw;
    }
    ++next_pick;
  }
  std::fclose(f);
  if (uint64_t(ds.i1.size()) != keep) throw error("dataset file truncated: " + path);
  return ds;
}

inline std::string dataset_file_name(int net_h, int net_w) {
  return "d_" + std::to_string(net_h) + "x" + std::to_string(net_w) + ".ntd";
}

}  // namespace ntc
