// Test-only oracles, deliberately independent of the library's solver and
// special-function paths: a cyclic Jacobi eigensolver for symmetric matrices
// and an erf-based chi-squared(1) CDF with a bisection inverse.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dhlcm/types.hpp"

namespace oracle {

using dhlcm::Index;
using dhlcm::Matrix;
using dhlcm::Vector;

// Cyclic Jacobi rotations; returns eigenvalues descending with matching
// eigenvector columns.
inline void jacobi_eig(Matrix a, Matrix& vectors, Vector& values) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26 * std::max(1.0, a.squaredNorm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Index i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Index i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (Index i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Index x, Index y) { return a(x, x) > a(y, y); });
  vectors.resize(n, n);
  values.resize(n);
  for (Index c = 0; c < n; ++c) {
    vectors.col(c) = v.col(order[static_cast<size_t>(c)]);
    values(c) = a(order[static_cast<size_t>(c)], order[static_cast<size_t>(c)]);
  }
}

// chi-squared(1): F(x) = erf(sqrt(x/2)).
inline double chi1_cdf(double x) {
  return x <= 0.0 ? 0.0 : std::erf(std::sqrt(x / 2.0));
}

inline double chi1_quantile(double p) {
  double lo = 0.0, hi = 1.0;
  while (chi1_cdf(hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (chi1_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Brute-force pair counting for the rand index.
inline double rand_index_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  const size_t n = a.size();
  long agree = 0, total = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      ++total;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

// Exhaustive minimum over label permutations.
inline double misclustering_enumeration(const std::vector<int>& s,
                                        const std::vector<int>& t) {
  int k = 0;
  for (int l : s) k = std::max(k, l + 1);
  for (int l : t) k = std::max(k, l + 1);
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  long best = static_cast<long>(s.size()) + 1;
  do {
    long mism = 0;
    for (size_t i = 0; i < s.size(); ++i)
      if (s[i] != perm[static_cast<size_t>(t[i])]) ++mism;
    best = std::min(best, mism);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(s.size());
}

// BH as the maximum-cardinality self-consistent subset over all 2^M subsets.
inline std::vector<int> bh_bruteforce(const std::vector<double>& p, double alpha) {
  const int m = static_cast<int>(p.size());
  int best_size = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    int size = 0;
    double pmax = 0.0;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        ++size;
        pmax = std::max(pmax, p[static_cast<size_t>(i)]);
      }
    if (size == 0) continue;
    if (pmax <= alpha * static_cast<double>(size) / static_cast<double>(m))
      best_size = std::max(best_size, size);
  }
  std::vector<int> rejected;
  if (best_size == 0) return rejected;
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  const double cutoff = sorted[static_cast<size_t>(best_size - 1)];
  for (int i = 0; i < m; ++i)
    if (p[static_cast<size_t>(i)] <= cutoff) rejected.push_back(i);
  return rejected;
}

}  // namespace oracle
