#pragma once

#include <cstdio>
#include <cstring>
#include <string>

#include "ntc/common.hpp"
#include "ntc/lfnst.hpp"
#include "ntc/net.hpp"

namespace ntc {

namespace detail {

struct FileWriter {
  FILE* f;
  explicit FileWriter(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
    if (!f) throw error("cannot open for writing: " + path);
  }
  ~FileWriter() {
    if (f) std::fclose(f);
  }
  void u16(uint16_t v) {
    uint8_t b[2] = {uint8_t(v), uint8_t(v >> 8)};
    std::fwrite(b, 1, 2, f);
  }
  void u32(uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    std::fwrite(b, 1, 4, f);
  }
  void f32(float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    u32(u);
  }
};

struct FileReader {
  FILE* f;
  std::string path;
  explicit FileReader(const std::string& p) : f(std::fopen(p.c_str(), "rb")), path(p) {
    if (!f) throw error("cannot open: " + p);
  }
  ~FileReader() {
    if (f) std::fclose(f);
  }
  void raw(void* out, size_t n) {
    if (std::fread(out, 1, n, f) != n) throw error("truncated file: " + path);
  }
  uint16_t u16() {
    uint8_t b[2];
    raw(b, 2);
    return uint16_t(b[0] | (uint16_t(b[1]) << 8));
  }
  uint32_t u32() {
    uint8_t b[4];
    raw(b, 4);
    return b[0] | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
  }
  float f32() {
    uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
};

constexpr uint32_t kKindFc = 0;
constexpr uint32_t kKindConv = 1;

inline void write_fc(FileWriter& w, const FcLayer& l) {
  w.u32(kKindFc);
  w.u32(uint32_t(l.out_dim));
  w.u32(uint32_t(l.in_dim));
  for (double v : l.w) w.f32(float(v));
  for (double v : l.b) w.f32(float(v));
}

inline void write_conv(FileWriter& w, const ConvLayer& l) {
  w.u32(kKindConv);
  w.u32(uint32_t(l.out_ch));
  w.u32(uint32_t(l.in_ch));
  w.u32(uint32_t(l.kh));
  w.u32(uint32_t(l.kw));
  w.u32(uint32_t(l.sh));
  w.u32(uint32_t(l.sw));
  for (double v : l.w) w.f32(float(v));
  for (double v : l.b) w.f32(float(v));
}

inline void read_fc(FileReader& r, FcLayer& l, int idx) {
  if (r.u32() != kKindFc) throw net_error(idx, "expected fully connected layer in " + r.path);
  if (int(r.u32()) != l.out_dim || int(r.u32()) != l.in_dim)
    throw net_error(idx, "fc layer shape mismatch in " + r.path);
  for (double& v : l.w) v = double(r.f32());
  for (double& v : l.b) v = double(r.f32());
}

inline void read_conv(FileReader& r, ConvLayer& l, int idx) {
  if (r.u32() != kKindConv) throw net_error(idx, "expected conv layer in " + r.path);
  bool ok = int(r.u32()) == l.out_ch && int(r.u32()) == l.in_ch && int(r.u32()) == l.kh &&
            int(r.u32()) == l.kw && int(r.u32()) == l.sh && int(r.u32()) == l.sw;
  if (!ok) throw net_error(idx, "conv layer shape mismatch in " + r.path);
  for (double& v : l.w) v = double(r.f32());
  for (double& v : l.b) v = double(r.f32());
}

}  // namespace detail

// Weight file: magic NNW1, h u16, w u16, layer count u16, then per layer a
// kind tag, its shape as u32 values, and float32 weights then biases.
inline void save_model(const Model& m, const std::string& path) {
  detail::FileWriter w(path);
  std::fwrite("NNW1", 1, 4, w.f);
  w.u16(uint16_t(m.bh));
  w.u16(uint16_t(m.bw));
  if (m.kind == ArchKind::fc) {
    w.u16(4);
    detail::write_fc(w, m.fc1);
    detail::write_fc(w, m.fc2);
  } else {
    w.u16(11);
    for (const auto& l : m.above_conv) detail::write_conv(w, l);
    for (const auto& l : m.left_conv) detail::write_conv(w, l);
    detail::write_fc(w, m.trunk);
  }
  detail::write_fc(w, m.head_pred);
  detail::write_fc(w, m.head_logit);
}

inline Model load_model(const std::string& path) {
  detail::FileReader r(path);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "NNW1", 4) != 0) throw error("bad weight magic in " + path);
  int bh = r.u16(), bw = r.u16();
  Model m = build_model(bh, bw);
  int layers = r.u16();
  int expect = m.kind == ArchKind::fc ? 4 : 11;
  if (layers != expect) throw error("unexpected layer count in " + path);
  int idx = 0;
  if (m.kind == ArchKind::fc) {
    detail::read_fc(r, m.fc1, idx++);
    detail::read_fc(r, m.fc2, idx++);
  } else {
    for (auto& l : m.above_conv) detail::read_conv(r, l, idx++);
    for (auto& l : m.left_conv) detail::read_conv(r, l, idx++);
    detail::read_fc(r, m.trunk, idx++);
  }
  detail::read_fc(r, m.head_pred, idx++);
  detail::read_fc(r, m.head_logit, idx++);
  return m;
}

inline std::string model_file_name(int bh, int bw) {
  return "f_" + std::to_string(bh) + "x" + std::to_string(bw) + ".nnw";
}

struct ModelSet {
  std::array<Model, 8> nets;

  static int index_of(int bh, int bw) {
    const auto& s = trained_sizes();
    for (size_t i = 0; i < s.size(); ++i)
      if (s[i].first == bh && s[i].second == bw) return int(i);
    throw error("not a trained network size");
  }
  const Model& at(int bh, int bw) const { return nets[size_t(index_of(bh, bw))]; }
  Model& at(int bh, int bw) { return nets[size_t(index_of(bh, bw))]; }
};

inline ModelSet make_seeded_models(uint64_t seed) {
  ModelSet ms;
  const auto& sizes = trained_sizes();
  for (size_t i = 0; i < sizes.size(); ++i) {
    ms.nets[i] = build_model(sizes[i].first, sizes[i].second);
    init_weights(ms.nets[i], seed + i);
  }
  return ms;
}

inline void save_models(const ModelSet& ms, const std::string& dir) {
  const auto& sizes = trained_sizes();
  for (size_t i = 0; i < sizes.size(); ++i)
    save_model(ms.nets[i], dir + "/" + model_file_name(sizes[i].first, sizes[i].second));
}

inline ModelSet load_models(const std::string& dir) {
  ModelSet ms;
  const auto& sizes = trained_sizes();
  for (size_t i = 0; i < sizes.size(); ++i) {
    ms.nets[i] = load_model(dir + "/" + model_file_name(sizes[i].first, sizes[i].second));
    if (ms.nets[i].bh != sizes[i].first || ms.nets[i].bw != sizes[i].second)
      throw error("weight file size tag does not match its name in " + dir);
  }
  return ms;
}

// Chained hash over the 8 weight files in the fixed size order.
inline uint64_t models_hash(const std::string& dir) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [bh, bw] : trained_sizes()) {
    std::string path = dir + "/" + model_file_name(bh, bw);
    detail::FileReader r(path);
    uint8_t buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, r.f)) > 0) h = fnv1a64(buf, n, h);
  }
  return h;
}

}  // namespace ntc
