#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ntc {

// splitmix64. Self-contained so streams are reproducible bit-for-bit across
// platforms and standard-library versions (std distributions are not).
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  uint64_t below(uint64_t n) { return next_u64() % n; }

  double normal() {
    // Box-Muller, one value per call (the pair's second half is discarded
    // to keep the stream position independent of call parity).
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (size_t i = xs.size(); i > 1; --i) {
      size_t j = size_t(below(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

private:
  uint64_t state_;
};

}  // namespace ntc
