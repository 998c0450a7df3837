#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "ntc/common.hpp"

namespace ntc {

namespace detail {

inline int pgm_token(FILE* f) {
  int c = std::fgetc(f);
  for (;;) {
    while (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = std::fgetc(f);
    if (c == '#') {
      while (c != '\n' && c != EOF) c = std::fgetc(f);
      continue;
    }
    break;
  }
  if (c < '0' || c > '9') throw error("malformed PGM header");
  int v = 0;
  while (c >= '0' && c <= '9') {
    v = v * 10 + (c - '0');
    c = std::fgetc(f);
  }
  return v;
}

}  // namespace detail

inline Plane read_pgm(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error("cannot open image: " + path);
  try {
    if (std::fgetc(f) != 'P' || std::fgetc(f) != '5') throw error("not a binary PGM: " + path);
    int w = detail::pgm_token(f);
    int h = detail::pgm_token(f);
    int maxval = detail::pgm_token(f);
    Plane p;
    p.width = w;
    p.height = h;
    p.bitdepth = maxval <= 255 ? 8 : (maxval <= 1023 ? 10 : 16);
    p.v.resize(size_t(w) * size_t(h));
    if (maxval <= 255) {
      std::vector<uint8_t> buf(p.v.size());
      if (std::fread(buf.data(), 1, buf.size(), f) != buf.size())
        throw error("truncated PGM payload: " + path);
      for (size_t i = 0; i < buf.size(); ++i) p.v[i] = buf[i];
    } else {
      std::vector<uint8_t> buf(p.v.size() * 2);
      if (std::fread(buf.data(), 1, buf.size(), f) != buf.size())
        throw error("truncated PGM payload: " + path);
      for (size_t i = 0; i < p.v.size(); ++i)
        p.v[i] = sample_t((uint16_t(buf[2 * i]) << 8) | buf[2 * i + 1]);
    }
    std::fclose(f);
    return p;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

inline void write_pgm(const Plane& p, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw error("cannot open image for writing: " + path);
  int maxval = (1 << p.bitdepth) - 1;
  std::fprintf(f, "P5\n%d %d\n%d\n", p.width, p.height, maxval);
  if (p.bitdepth <= 8) {
    std::vector<uint8_t> buf(p.v.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = uint8_t(p.v[i]);
    std::fwrite(buf.data(), 1, buf.size(), f);
  } else {
    std::vector<uint8_t> buf(p.v.size() * 2);
    for (size_t i = 0; i < p.v.size(); ++i) {
      buf[2 * i] = uint8_t(p.v[i] >> 8);
      buf[2 * i + 1] = uint8_t(p.v[i]);
    }
    std::fwrite(buf.data(), 1, buf.size(), f);
  }
  std::fclose(f);
}

inline Plane read_raw(const std::string& path, int w, int h) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error("cannot open image: " + path);
  Plane p;
  p.width = w;
  p.height = h;
  p.bitdepth = 8;
  p.v.resize(size_t(w) * size_t(h));
  std::vector<uint8_t> buf(p.v.size());
  size_t got = std::fread(buf.data(), 1, buf.size(), f);
  std::fclose(f);
  if (got != buf.size()) throw error("raw luma file shorter than width*height: " + path);
  for (size_t i = 0; i < buf.size(); ++i) p.v[i] = buf[i];
  return p;
}

}  // namespace ntc
