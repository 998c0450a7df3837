#pragma once

#include <cmath>
#include <vector>

#include "ntc/common.hpp"
#include "ntc/net.hpp"

namespace ntc {

struct AdamConfig {
  double lr = 0.0002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
public:
  Adam(size_t param_count, AdamConfig cfg = {}) : cfg_(cfg), m_(param_count), v_(param_count) {
    if (cfg_.eps <= 0) throw error("adam eps must be positive");
  }

  int64_t timestep() const { return t_; }

  // Standard bias corrected update. Spans must enumerate parameters in the
  // same order every call.
  void step(std::vector<Model::Span> params, std::vector<Model::Span> grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    size_t off = 0;
    for (size_t s = 0; s < params.size(); ++s) {
      double* p = params[s].p;
      const double* g = grads[s].p;
      for (size_t i = 0; i < params[s].n; ++i, ++off) {
        m_[off] = cfg_.beta1 * m_[off] + (1.0 - cfg_.beta1) * g[i];
        v_[off] = cfg_.beta2 * v_[off] + (1.0 - cfg_.beta2) * g[i] * g[i];
        double mh = m_[off] / c1;
        double vh = v_[off] / c2;
        p[i] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
      }
    }
    if (off != m_.size()) throw error("adam parameter count changed between steps");
  }

private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  int64_t t_ = 0;
};

}  // namespace ntc
