#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "spectral.hpp"
#include "types.hpp"

namespace dhlcm {

enum class Normalization { L2, Score, None };

struct NormalizeOptions {
  double score_eps = 1e-12;      // |first coordinate| below this is degenerate
  bool score_clamp = false;      // clamp ratios instead of erroring
  double score_clamp_limit = 1e6;
};

// L2: each row scaled to unit norm (N x K). Score: entries 2..K divided by
// entry 1 (N x (K-1)). None: input unchanged.
Matrix normalize_rows(const Matrix& u, Normalization mode,
                      const NormalizeOptions& opts = {});

struct KMeansOptions {
  int restarts = 100;
  int max_iter = 300;
  double tol = 1e-10;  // relative inertia change
  std::uint64_t seed = 0;
  int threads = 1;     // restarts may run concurrently; results are identical
};

struct ClusterAssignment {
  Labels labels;   // 0-based, renumbered by first occurrence
  Matrix centers;  // K x d, rows permuted consistently with labels
  double inertia = 0.0;
  int restarts_used = 0;  // restarts that produced a valid clustering
  std::uint64_t seed = 0;
};

// Lloyd's algorithm with k-means++ seeding, `restarts` independent
// sub-seeded runs, minimal inertia wins (ties: lowest restart index). A
// restart repairs one empty cluster by reseeding its center at the farthest
// point; a second empty cluster aborts that restart. Throws EmptyClusterError
// only if every restart aborted.
ClusterAssignment kmeans(const Matrix& points, int k, const KMeansOptions& opts);

struct HeteroClusteringOptions {
  int t0 = 20;
  SpectralMethod method = SpectralMethod::HeteroPca;
  Normalization normalization = Normalization::L2;
  NormalizeOptions normalize;
  KMeansOptions kmeans;
};

struct HeteroClusteringResult {
  ClusterAssignment assignment;
  SpectralEmbedding embedding;  // raw (pre-normalization), needed for degrees
};

HeteroClusteringResult hetero_clustering(const ObservationMatrix& obs, int k,
                                         const HeteroClusteringOptions& opts);

// Mapping est -> ref minimizing label disagreements (confusion matrix
// assignment; exhaustive over permutations for small K).
std::vector<int> best_label_permutation(const Labels& reference,
                                        const Labels& estimate);

namespace detail {
// Both routes realize the same minimum; best_label_permutation dispatches on
// K (enumeration up to K = 8, assignment beyond).
std::vector<int> label_permutation_enumeration(const Labels& reference,
                                               const Labels& estimate);
std::vector<int> label_permutation_assignment(const Labels& reference,
                                              const Labels& estimate);
}  // namespace detail

// min over label permutations of the disagreement fraction h(s, s').
double misclustering_rate(const Labels& s, const Labels& s_prime);

// Fraction of unordered pairs on which two labelings agree.
double rand_index(const Labels& s, const Labels& s_prime);

}  // namespace dhlcm
