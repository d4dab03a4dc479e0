#include "clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rng.hpp"

namespace dhlcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RestartResult {
  bool ok = false;
  Labels labels;
  Matrix centers;
  double inertia = kInf;
};

void assign_points(const Matrix& pts, const Matrix& centers, Labels& labels,
                   double& inertia) {
  const Index n = pts.rows();
  const int k = static_cast<int>(centers.rows());
  inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (pts.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double d = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[static_cast<size_t>(i)] = best;
    inertia += best_d;
  }
}

Matrix kmeanspp_init(const Matrix& pts, int k, std::mt19937_64& rng) {
  const Index n = pts.rows();
  Matrix centers(k, pts.cols());
  std::uniform_int_distribution<Index> uni(0, n - 1);
  centers.row(0) = pts.row(uni(rng));
  Vector d2 = (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index chosen;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = uni(rng);  // fewer distinct points than centers
    }
    centers.row(c) = pts.row(chosen);
    d2 = d2.cwiseMin((pts.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

RestartResult kmeans_single(const Matrix& pts, int k, const KMeansOptions& opts,
                            std::uint64_t seed) {
  const Index n = pts.rows();
  std::mt19937_64 rng = make_engine(seed);
  RestartResult res;
  res.labels.assign(static_cast<size_t>(n), 0);
  res.centers = kmeanspp_init(pts, k, rng);

  bool repaired = false;
  double prev_inertia = kInf;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    assign_points(pts, res.centers, res.labels, res.inertia);

    std::vector<Index> counts(static_cast<size_t>(k), 0);
    for (int l : res.labels) ++counts[static_cast<size_t>(l)];
    int empty = -1;
    int empties = 0;
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<size_t>(c)] == 0) {
        empty = c;
        ++empties;
      }
    if (empties > 0) {
      if (repaired || empties > 1) return res;  // one repair per restart
      repaired = true;
      // reseed the dead center at the point farthest from its own center
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d =
            (pts.row(i) - res.centers.row(res.labels[static_cast<size_t>(i)]))
                .squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      res.centers.row(empty) = pts.row(far);
      prev_inertia = kInf;
      continue;
    }

    // center update
    Matrix sums = Matrix::Zero(k, pts.cols());
    for (Index i = 0; i < n; ++i)
      sums.row(res.labels[static_cast<size_t>(i)]) += pts.row(i);
    for (int c = 0; c < k; ++c)
      res.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);

    if (prev_inertia < kInf) {
      const double denom = std::max(prev_inertia, 1e-300);
      if (std::abs(prev_inertia - res.inertia) <= opts.tol * denom) break;
    }
    prev_inertia = res.inertia;
  }

  // labels must be argmin assignments of the returned centers
  assign_points(pts, res.centers, res.labels, res.inertia);
  std::vector<Index> counts(static_cast<size_t>(k), 0);
  for (int l : res.labels) ++counts[static_cast<size_t>(l)];
  for (int c = 0; c < k; ++c)
    if (counts[static_cast<size_t>(c)] == 0) return res;
  res.ok = true;
  return res;
}

void canonicalize(ClusterAssignment& a, int k) {
  std::vector<int> remap(static_cast<size_t>(k), -1);
  int next = 0;
  for (int& l : a.labels) {
    if (remap[static_cast<size_t>(l)] < 0) remap[static_cast<size_t>(l)] = next++;
    l = remap[static_cast<size_t>(l)];
  }
  Matrix centers(a.centers.rows(), a.centers.cols());
  for (int c = 0; c < k; ++c)
    if (remap[static_cast<size_t>(c)] >= 0)
      centers.row(remap[static_cast<size_t>(c)]) = a.centers.row(c);
  a.centers = centers;
}

// O(n^3) assignment: minimizes total cost over permutations.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0),
      v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = p[static_cast<size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                           u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_of_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j) row_of_col[static_cast<size_t>(j - 1)] = p[static_cast<size_t>(j)] - 1;
  return row_of_col;  // row assigned to each column
}

int label_count(const Labels& a, const Labels& b) {
  int k = 0;
  for (int l : a) k = std::max(k, l + 1);
  for (int l : b) k = std::max(k, l + 1);
  return k;
}

std::vector<std::vector<long>> confusion(const Labels& ref, const Labels& est, int k) {
  std::vector<std::vector<long>> c(static_cast<size_t>(k),
                                   std::vector<long>(static_cast<size_t>(k), 0));
  for (size_t i = 0; i < ref.size(); ++i)
    ++c[static_cast<size_t>(ref[i])][static_cast<size_t>(est[i])];
  return c;
}

void check_label_pair(const Labels& s, const Labels& s_prime) {
  if (s.size() != s_prime.size())
    throw ShapeError("label sequences have different lengths");
  if (s.empty()) throw ShapeError("label sequences are empty");
  for (int l : s)
    if (l < 0) throw DomainError("labels must be nonnegative");
  for (int l : s_prime)
    if (l < 0) throw DomainError("labels must be nonnegative");
}

}  // namespace

Matrix normalize_rows(const Matrix& u, Normalization mode,
                      const NormalizeOptions& opts) {
  switch (mode) {
    case Normalization::None:
      return u;
    case Normalization::L2: {
      Matrix out(u.rows(), u.cols());
      for (Index i = 0; i < u.rows(); ++i) {
        const double norm = u.row(i).norm();
        if (norm == 0.0) {
          std::ostringstream msg;
          msg << "zero-norm row " << (i + 1) << " cannot be normalized";
          throw DegenerateRowError(msg.str(), i + 1);
        }
        out.row(i) = u.row(i) / norm;
      }
      return out;
    }
    case Normalization::Score: {
      if (u.cols() < 2)
        throw InvalidArgumentError("score normalization requires K >= 2");
      Matrix out(u.rows(), u.cols() - 1);
      for (Index i = 0; i < u.rows(); ++i) {
        const double lead = u(i, 0);
        if (std::abs(lead) < opts.score_eps && !opts.score_clamp) {
          std::ostringstream msg;
          msg << "row " << (i + 1) << " has near-zero leading coordinate " << lead;
          throw DegenerateRowError(msg.str(), i + 1);
        }
        for (Index c = 1; c < u.cols(); ++c) {
          double ratio;
          if (std::abs(lead) < opts.score_eps) {
            // reachable only with score_clamp on
            ratio = u(i, c) == 0.0 ? 0.0
                    : ((u(i, c) >= 0.0) == (lead >= 0.0) ? opts.score_clamp_limit
                                                         : -opts.score_clamp_limit);
          } else {
            ratio = u(i, c) / lead;
            if (opts.score_clamp)
              ratio = std::clamp(ratio, -opts.score_clamp_limit, opts.score_clamp_limit);
          }
          out(i, c - 1) = ratio;
        }
      }
      return out;
    }
  }
  throw InvalidArgumentError("unknown normalization mode");
}

ClusterAssignment kmeans(const Matrix& points, int k, const KMeansOptions& opts) {
  const Index n = points.rows();
  if (k < 1) throw InvalidArgumentError("kmeans requires k >= 1");
  if (k > n) throw InvalidArgumentError("kmeans requires k <= number of points");
  if (opts.restarts < 1) throw InvalidArgumentError("kmeans requires restarts >= 1");

  std::vector<RestartResult> runs(static_cast<size_t>(opts.restarts));
  parallel_for(opts.restarts, opts.threads, [&](std::int64_t r) {
    runs[static_cast<size_t>(r)] =
        kmeans_single(points, k, opts, derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
  });

  int best = -1;
  int valid = 0;
  for (int r = 0; r < opts.restarts; ++r) {
    if (!runs[static_cast<size_t>(r)].ok) continue;
    ++valid;
    if (best < 0 || runs[static_cast<size_t>(r)].inertia < runs[static_cast<size_t>(best)].inertia)
      best = r;
  }
  if (best < 0)
    throw EmptyClusterError("every k-means restart produced an empty cluster");

  ClusterAssignment out;
  out.labels = std::move(runs[static_cast<size_t>(best)].labels);
  out.centers = std::move(runs[static_cast<size_t>(best)].centers);
  out.inertia = runs[static_cast<size_t>(best)].inertia;
  out.restarts_used = valid;
  out.seed = opts.seed;
  canonicalize(out, k);
  return out;
}

HeteroClusteringResult hetero_clustering(const ObservationMatrix& obs, int k,
                                         const HeteroClusteringOptions& opts) {
  HeteroClusteringResult res;
  res.embedding = opts.method == SpectralMethod::HeteroPca
                      ? hetero_pca(obs.values, k, opts.t0)
                      : plain_svd(obs.values, k);
  const Matrix pts = normalize_rows(res.embedding.u, opts.normalization, opts.normalize);
  res.assignment = kmeans(pts, k, opts.kmeans);
  return res;
}

namespace detail {

std::vector<int> label_permutation_enumeration(const Labels& reference,
                                               const Labels& estimate) {
  check_label_pair(reference, estimate);
  const int k = label_count(reference, estimate);
  const auto conf = confusion(reference, estimate, k);
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  long best_agree = -1;
  do {
    long agree = 0;
    for (int b = 0; b < k; ++b)
      agree += conf[static_cast<size_t>(perm[static_cast<size_t>(b)])][static_cast<size_t>(b)];
    if (agree > best_agree) {
      best_agree = agree;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_perm;
}

std::vector<int> label_permutation_assignment(const Labels& reference,
                                              const Labels& estimate) {
  check_label_pair(reference, estimate);
  const int k = label_count(reference, estimate);
  const auto conf = confusion(reference, estimate, k);
  // maximum-weight matching on the confusion matrix
  long max_entry = 0;
  for (const auto& row : conf)
    for (long v : row) max_entry = std::max(max_entry, v);
  std::vector<std::vector<double>> cost(static_cast<size_t>(k),
                                        std::vector<double>(static_cast<size_t>(k)));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      cost[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          static_cast<double>(max_entry - conf[static_cast<size_t>(a)][static_cast<size_t>(b)]);
  return hungarian_min(cost);
}

}  // namespace detail

std::vector<int> best_label_permutation(const Labels& reference, const Labels& estimate) {
  check_label_pair(reference, estimate);
  const int k = label_count(reference, estimate);
  return k <= 8 ? detail::label_permutation_enumeration(reference, estimate)
                : detail::label_permutation_assignment(reference, estimate);
}

double misclustering_rate(const Labels& s, const Labels& s_prime) {
  const auto perm = best_label_permutation(s, s_prime);
  long mismatched = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] != perm[static_cast<size_t>(s_prime[i])]) ++mismatched;
  return static_cast<double>(mismatched) / static_cast<double>(s.size());
}

double rand_index(const Labels& s, const Labels& s_prime) {
  check_label_pair(s, s_prime);
  const auto n = static_cast<long>(s.size());
  if (n < 2) throw ShapeError("rand index requires at least two subjects");
  const int k = label_count(s, s_prime);
  const auto conf = confusion(s, s_prime, k);

  auto pairs = [](long m) { return m * (m - 1) / 2; };
  long same_both = 0, row_pairs = 0, col_pairs = 0;
  std::vector<long> col_tot(static_cast<size_t>(k), 0);
  for (int a = 0; a < k; ++a) {
    long row_tot = 0;
    for (int b = 0; b < k; ++b) {
      const long c = conf[static_cast<size_t>(a)][static_cast<size_t>(b)];
      same_both += pairs(c);
      row_tot += c;
      col_tot[static_cast<size_t>(b)] += c;
    }
    row_pairs += pairs(row_tot);
  }
  for (long c : col_tot) col_pairs += pairs(c);
  const long total = pairs(n);
  const long agreements = total - row_pairs - col_pairs + 2 * same_both;
  return static_cast<double>(agreements) / static_cast<double>(total);
}

}  // namespace dhlcm
