#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "ntc/common.hpp"
#include "ntc/lfnst.hpp"
#include "ntc/rng.hpp"
#include "ntc/scan.hpp"

namespace ntc {

// Region coefficient vectors grouped by transform set and region family.
struct BankSamples {
  std::array<std::array<std::vector<std::vector<double>>, 2>, kNumSets> groups;

  void add(int set, RegionFamily fam, std::vector<double> g) {
    groups[size_t(set)][size_t(fam)].push_back(std::move(g));
  }
  size_t count(int set, RegionFamily fam) const {
    return groups[size_t(set)][size_t(fam)].size();
  }
};

// Uncentered second moment (1/N) sum g g^T.
inline GridD second_moment(const std::vector<std::vector<double>>& samples, int dim) {
  GridD s(dim, dim);
  for (const auto& g : samples)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) s.at(i, j) += g[size_t(i)] * g[size_t(j)];
  if (!samples.empty())
    for (double& v : s.v) v /= double(samples.size());
  return s;
}

// Eigenvectors of a symmetric matrix as rows, eigenvalues descending.
inline std::pair<std::vector<double>, GridD> eigen_sym_desc(const GridD& s) {
  const int n = s.rows;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = s.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw error("eigendecomposition failed");
  std::vector<int> order(size_t(n), 0);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });
  std::vector<double> vals(size_t(n), 0.0);
  GridD vecs(n, n);
  for (int r = 0; r < n; ++r) {
    vals[size_t(r)] = es.eigenvalues()(order[size_t(r)]);
    for (int c = 0; c < n; ++c) vecs.at(r, c) = es.eigenvectors()(c, order[size_t(r)]);
  }
  return {std::move(vals), std::move(vecs)};
}

// Deterministic sign: the largest magnitude component of each row is positive.
inline void fix_row_signs(GridD& m) {
  for (int r = 0; r < m.rows; ++r) {
    int arg = 0;
    for (int c = 1; c < m.cols; ++c)
      if (std::abs(m.at(r, c)) > std::abs(m.at(r, arg))) arg = c;
    if (m.at(r, arg) < 0)
      for (int c = 0; c < m.cols; ++c) m.at(r, c) = -m.at(r, c);
  }
}

inline GridD klt_rows(const std::vector<std::vector<double>>& samples, int dim, int rank) {
  auto [vals, vecs] = eigen_sym_desc(second_moment(samples, dim));
  GridD m(rank, dim);
  for (int r = 0; r < rank; ++r)
    for (int c = 0; c < dim; ++c) m.at(r, c) = vecs.at(r, c);
  fix_row_signs(m);
  return m;
}

// First 16 canonical basis vectors: passes the lowest diagonal scan slots
// through untouched. Serves as the fallback when a group has no data.
inline GridD identity_embedding(int dim) {
  GridD m(kSecondaryCoeffs, dim);
  for (int r = 0; r < kSecondaryCoeffs; ++r) m.at(r, r) = 1.0;
  return m;
}

// Energy outside the span of the first k rows. Rows are orthonormal, so the
// residual is norm minus captured energy.
inline double residual_energy(const GridD& m, const std::vector<double>& g, int k) {
  double total = 0;
  for (double v : g) total += v * v;
  double captured = 0;
  for (int r = 0; r < k; ++r) {
    double p = 0;
    for (int c = 0; c < m.cols; ++c) p += m.at(r, c) * g[size_t(c)];
    captured += p * p;
  }
  return std::max(0.0, total - captured);
}

// Trains one (set, family) group. Matrix 1 is the whole-group KLT. Matrix 2
// starts from the harder half under a top-k residual split, then one
// reassignment pass refits it. k stays below the full 16 for the small
// region, where 16 of 16 rows would reconstruct everything exactly. Callers
// guarantee enough samples; degenerate splits fall back to a copy of
// matrix 1 so both matrices stay orthonormal.
inline std::pair<GridD, GridD> train_group(const std::vector<std::vector<double>>& samples,
                                           int dim) {
  if (samples.size() < size_t(dim)) throw error("train_group needs at least dim samples");

  const int k = std::min(kSecondaryCoeffs, dim / 2);
  GridD m1 = klt_rows(samples, dim, kSecondaryCoeffs);

  std::vector<double> err(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) err[i] = residual_energy(m1, samples[i], k);
  std::vector<double> sorted = err;
  std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];

  std::vector<std::vector<double>> hard;
  for (size_t i = 0; i < samples.size(); ++i)
    if (err[i] > median) hard.push_back(samples[i]);
  if (hard.size() < size_t(dim)) return {std::move(m1), GridD(m1)};
  GridD m2 = klt_rows(hard, dim, kSecondaryCoeffs);

  std::vector<std::vector<double>> assigned;
  for (const auto& g : samples)
    if (residual_energy(m2, g, k) < residual_energy(m1, g, k)) assigned.push_back(g);
  if (assigned.size() >= size_t(dim)) m2 = klt_rows(assigned, dim, kSecondaryCoeffs);
  return {std::move(m1), std::move(m2)};
}

// Every (set, family) group needs at least 10 samples per region dimension
// before training is meaningful; otherwise the call fails and names every
// starving group so the caller can widen collection.
inline TransformBank train_bank(const BankSamples& samples) {
  std::string starving;
  for (int set = 0; set < kNumSets; ++set)
    for (int fam = 0; fam < 2; ++fam) {
      const int dim = region_size(RegionFamily(fam));
      const size_t need = size_t(10 * dim);
      const size_t have = samples.count(set, RegionFamily(fam));
      if (have < need) {
        if (!starving.empty()) starving += ", ";
        starving += "set " + std::to_string(set) +
                    (fam == 0 ? " small16 " : " large48 ") + std::to_string(have) + "/" +
                    std::to_string(need);
      }
    }
  if (!starving.empty()) throw error("not enough samples to train bank: " + starving);

  TransformBank bank;
  for (int set = 0; set < kNumSets; ++set)
    for (int fam = 0; fam < 2; ++fam) {
      const int dim = region_size(RegionFamily(fam));
      auto [m1, m2] = train_group(samples.groups[size_t(set)][size_t(fam)], dim);
      bank.m[size_t(set)][size_t(fam)][0] = std::move(m1);
      bank.m[size_t(set)][size_t(fam)][1] = std::move(m2);
    }
  return bank;
}

// Random orthonormal rows via Gram-Schmidt over seeded gaussians. Used by
// tests that need a valid bank without running collection.
inline GridD random_orthonormal_rows(Rng& rng, int rank, int dim) {
  GridD m(rank, dim);
  for (int r = 0; r < rank; ++r) {
    std::vector<double> v(size_t(dim), 0.0);
    for (;;) {
      for (double& x : v) x = rng.normal();
      for (int p = 0; p < r; ++p) {
        double d = 0;
        for (int c = 0; c < dim; ++c) d += m.at(p, c) * v[size_t(c)];
        for (int c = 0; c < dim; ++c) v[size_t(c)] -= d * m.at(p, c);
      }
      double n2 = 0;
      for (double x : v) n2 += x * x;
      if (n2 > 1e-12) {
        double inv = 1.0 / std::sqrt(n2);
        for (int c = 0; c < dim; ++c) m.at(r, c) = v[size_t(c)] * inv;
        break;
      }
    }
  }
  fix_row_signs(m);
  return m;
}

inline TransformBank make_random_bank(uint64_t seed) {
  Rng rng(seed);
  TransformBank bank;
  for (int set = 0; set < kNumSets; ++set)
    for (int fam = 0; fam < 2; ++fam)
      for (int mi = 0; mi < 2; ++mi)
        bank.m[size_t(set)][size_t(fam)][size_t(mi)] =
            random_orthonormal_rows(rng, kSecondaryCoeffs, region_size(RegionFamily(fam)));
  return bank;
}

}  // namespace ntc
