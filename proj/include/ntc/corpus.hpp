#pragma once

#include <cmath>
#include <vector>

#include "ntc/common.hpp"
#include "ntc/rng.hpp"

namespace ntc {

namespace detail {

inline void add_grating(std::vector<double>& img, int w, int h, Rng& rng, double amp_lo,
                        double amp_hi) {
  const double amp = rng.uniform(amp_lo, amp_hi);
  const double theta = rng.uniform(0, 2 * M_PI);
  const double period = rng.uniform(6.0, 48.0);
  const double fx = std::cos(theta) / period, fy = std::sin(theta) / period;
  const double phase = rng.uniform(0, 2 * M_PI);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img[size_t(y) * size_t(w) + size_t(x)] +=
          amp * std::sin(2 * M_PI * (fx * x + fy * y) + phase);
}

inline void add_gradient(std::vector<double>& img, int w, int h, Rng& rng, double range) {
  const double gx = rng.uniform(-range, range) / std::max(1, w - 1);
  const double gy = rng.uniform(-range, range) / std::max(1, h - 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img[size_t(y) * size_t(w) + size_t(x)] += gx * x + gy * y;
}

inline void add_value_noise(std::vector<double>& img, int w, int h, Rng& rng, int base_cell,
                            int octaves, double amp) {
  for (int o = 0; o < octaves; ++o) {
    const int cell = std::max(2, base_cell >> o);
    const int gw = w / cell + 2, gh = h / cell + 2;
    std::vector<double> lat(size_t(gw) * size_t(gh));
    for (double& v : lat) v = rng.uniform(-1.0, 1.0);
    const double a = amp / double(1 << o);
    for (int y = 0; y < h; ++y) {
      const double fy = double(y) / cell;
      const int cy = int(fy);
      const double ty = fy - cy;
      for (int x = 0; x < w; ++x) {
        const double fx = double(x) / cell;
        const int cx = int(fx);
        const double tx = fx - cx;
        const double v00 = lat[size_t(cy) * size_t(gw) + size_t(cx)];
        const double v01 = lat[size_t(cy) * size_t(gw) + size_t(cx + 1)];
        const double v10 = lat[size_t(cy + 1) * size_t(gw) + size_t(cx)];
        const double v11 = lat[size_t(cy + 1) * size_t(gw) + size_t(cx + 1)];
        const double v = (1 - ty) * ((1 - tx) * v00 + tx * v01) +
                         ty * ((1 - tx) * v10 + tx * v11);
        img[size_t(y) * size_t(w) + size_t(x)] += a * v;
      }
    }
  }
}

inline void add_triangles(std::vector<double>& img, int w, int h, Rng& rng, int count) {
  for (int t = 0; t < count; ++t) {
    double px[3], py[3];
    for (int i = 0; i < 3; ++i) {
      px[i] = rng.uniform(0, double(w));
      py[i] = rng.uniform(0, double(h));
    }
    const double shade = rng.uniform(-90.0, 90.0);
    auto cross = [](double ax, double ay, double bx, double by) { return ax * by - ay * bx; };
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double d0 = cross(px[1] - px[0], py[1] - py[0], x - px[0], y - py[0]);
        const double d1 = cross(px[2] - px[1], py[2] - py[1], x - px[1], y - py[1]);
        const double d2 = cross(px[0] - px[2], py[0] - py[2], x - px[2], y - py[2]);
        const bool neg = d0 < 0 || d1 < 0 || d2 < 0;
        const bool pos = d0 > 0 || d1 > 0 || d2 > 0;
        if (!(neg && pos)) img[size_t(y) * size_t(w) + size_t(x)] += shade;
      }
  }
}

inline void add_rings(std::vector<double>& img, int w, int h, Rng& rng) {
  const double cx = rng.uniform(0.2, 0.8) * w;
  const double cy = rng.uniform(0.2, 0.8) * h;
  const double period = rng.uniform(8.0, 40.0);
  const double amp = rng.uniform(30.0, 80.0);
  const double phase = rng.uniform(0, 2 * M_PI);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
      img[size_t(y) * size_t(w) + size_t(x)] += amp * std::sin(2 * M_PI * d / period + phase);
    }
}

}  // namespace detail

// Deterministic 8 bit synthetic test image. kind cycles through gratings,
// multi octave noise, flat shaded polygons, concentric rings, and a mix.
inline Plane make_synthetic(int kind, int w, int h, uint64_t seed) {
  Rng rng(0x5eedc0de00ull + seed * 1315423911ull + uint64_t(kind));
  std::vector<double> img(size_t(w) * size_t(h), 128.0);
  switch (kind % 5) {
    case 0:
      detail::add_gradient(img, w, h, rng, 60.0);
      detail::add_grating(img, w, h, rng, 25.0, 70.0);
      break;
    case 1:
      detail::add_value_noise(img, w, h, rng, 32, 4, 110.0);
      break;
    case 2:
      detail::add_gradient(img, w, h, rng, 80.0);
      detail::add_triangles(img, w, h, rng, 7);
      break;
    case 3:
      detail::add_rings(img, w, h, rng);
      detail::add_value_noise(img, w, h, rng, 16, 2, 25.0);
      break;
    default:
      detail::add_value_noise(img, w, h, rng, 24, 3, 60.0);
      detail::add_triangles(img, w, h, rng, 3);
      detail::add_grating(img, w, h, rng, 15.0, 35.0);
      break;
  }
  Plane p(w, h, 8);
  for (size_t i = 0; i < img.size(); ++i) p.v[i] = sample_t(clip_sample(img[i], 8));
  return p;
}

inline Plane synthetic_image(int idx, int w, int h) {
  return make_synthetic(idx % 5, w, h, uint64_t(idx));
}

}  // namespace ntc
