#pragma once

#include <cmath>
#include <cstdint>

#include "ntc/common.hpp"

namespace ntc {

// Uniform reconstruction quantizer with a 1/3 deadzone offset.
struct Quantizer {
  int qp;
  double qstep;

  explicit Quantizer(int qp_) : qp(qp_), qstep(std::pow(2.0, (qp_ - 4) / 6.0)) {}

  int32_t quantize(double c) const {
    double a = std::floor(std::abs(c) / qstep + 1.0 / 3.0);
    int32_t lvl = int32_t(a);
    return c < 0 ? -lvl : lvl;
  }

  double dequantize(int32_t level) const { return double(level) * qstep; }
};

inline double rd_lambda(int qp) { return 0.57 * std::pow(2.0, (qp - 12) / 3.0); }

}  // namespace ntc
