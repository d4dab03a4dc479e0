#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "dhlcm/clustering.hpp"
#include "dhlcm/simulation.hpp"
#include "test_oracles.hpp"

using namespace dhlcm;

namespace {

Labels random_labels(int n, int k, std::mt19937_64& rng) {
  Labels out(static_cast<size_t>(n));
  for (auto& l : out) l = static_cast<int>(rng() % static_cast<unsigned>(k));
  return out;
}

GeneratedData noiseless_case(int n, int j, int k, std::uint64_t seed,
                             bool constant_degrees) {
  std::mt19937_64 rng(seed);
  GeneratedData data;
  data.truth.k = k;
  data.truth.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) data.truth.labels[static_cast<size_t>(i)] = i % k;
  Vector raw(n);
  if (constant_degrees) {
    raw.setOnes();
  } else {
    std::uniform_real_distribution<double> uni(0.1, 1.5);
    for (int i = 0; i < n; ++i) raw(i) = uni(rng);
  }
  data.truth.degrees = rescale_degrees(raw, data.truth.labels, k);
  std::uniform_real_distribution<double> th(0.05, 0.5);
  data.truth.theta.resize(j, k);
  for (Index a = 0; a < data.truth.theta.rows(); ++a)
    for (Index b = 0; b < data.truth.theta.cols(); ++b)
      data.truth.theta(a, b) = th(rng);
  for (int b = 0; b < k; ++b) data.truth.theta(b, b) += 0.8;
  const Matrix z = labels_to_onehot(data.truth.labels, k);
  data.obs.family = ModelFamily::bernoulli();
  data.obs.values = data.truth.degrees.asDiagonal() * z * data.truth.theta.transpose();
  return data;
}

}  // namespace

TEST_CASE("row normalization modes") {
  Matrix u(1, 2);
  u << 3, 4;
  const Matrix l2 = normalize_rows(u, Normalization::L2);
  CHECK(l2(0, 0) == doctest::Approx(0.6));
  CHECK(l2(0, 1) == doctest::Approx(0.8));

  Matrix v(1, 3);
  v << 2, 4, 6;
  const Matrix score = normalize_rows(v, Normalization::Score);
  CHECK(score.cols() == 2);
  CHECK(score(0, 0) == doctest::Approx(2.0));
  CHECK(score(0, 1) == doctest::Approx(3.0));

  CHECK((normalize_rows(v, Normalization::None) - v).norm() == 0.0);

  Matrix zero = Matrix::Zero(1, 2);
  CHECK_THROWS_AS(normalize_rows(zero, Normalization::L2), DegenerateRowError);
  Matrix lead_zero(1, 2);
  lead_zero << 0, 1;
  CHECK_THROWS_AS(normalize_rows(lead_zero, Normalization::Score), DegenerateRowError);
  NormalizeOptions clamp;
  clamp.score_clamp = true;
  const Matrix clamped = normalize_rows(lead_zero, Normalization::Score, clamp);
  CHECK(clamped(0, 0) == doctest::Approx(1e6));
}

TEST_CASE("k-means separates two point pairs exactly") {
  Matrix pts(4, 2);
  pts << 0, 0, 0, 0, 10, 10, 10, 10;
  KMeansOptions opts;
  opts.restarts = 4;
  const auto res = kmeans(pts, 2, opts);
  CHECK(res.inertia == doctest::Approx(0.0));
  CHECK(res.labels[0] == res.labels[1]);
  CHECK(res.labels[2] == res.labels[3]);
  CHECK(res.labels[0] != res.labels[2]);
  CHECK(res.labels[0] == 0);  // first-occurrence numbering
}

TEST_CASE("k-means with a single cluster returns the mean") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Matrix pts(20, 3);
  for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = normal(rng);
  KMeansOptions opts;
  opts.restarts = 2;
  const auto res = kmeans(pts, 1, opts);
  const Matrix mean = pts.colwise().mean();
  CHECK((res.centers.row(0) - mean.row(0)).norm() < 1e-12);
  const double total = (pts.rowwise() - mean.row(0)).squaredNorm();
  CHECK(res.inertia == doctest::Approx(total));
}

TEST_CASE("k-means reaches the brute-force optimum on three triads") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> jitter(0.0, 0.05);
  Matrix pts(6, 2);
  const double centers[3][2] = {{0, 0}, {100, 0}, {0, 100}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 2; ++i) {
      pts(2 * c + i, 0) = centers[c][0] + jitter(rng);
      pts(2 * c + i, 1) = centers[c][1] + jitter(rng);
    }
  KMeansOptions opts;
  opts.restarts = 10;
  const auto res = kmeans(pts, 3, opts);

  // exhaustive search over all 3^6 labelings
  double best = std::numeric_limits<double>::infinity();
  for (int code = 0; code < 729; ++code) {
    int c = code;
    Labels lab(6);
    for (auto& l : lab) {
      l = c % 3;
      c /= 3;
    }
    Matrix sums = Matrix::Zero(3, 2);
    Vector counts = Vector::Zero(3);
    for (int i = 0; i < 6; ++i) {
      sums.row(lab[static_cast<size_t>(i)]) += pts.row(i);
      counts(lab[static_cast<size_t>(i)]) += 1.0;
    }
    if ((counts.array() == 0.0).any()) continue;
    double inertia = 0.0;
    for (int i = 0; i < 6; ++i)
      inertia += (pts.row(i) - sums.row(lab[static_cast<size_t>(i)]) /
                                   counts(lab[static_cast<size_t>(i)]))
                     .squaredNorm();
    best = std::min(best, inertia);
  }
  CHECK(res.inertia == doctest::Approx(best).epsilon(1e-9));
  CHECK(res.labels[0] == res.labels[1]);
  CHECK(res.labels[2] == res.labels[3]);
  CHECK(res.labels[4] == res.labels[5]);
}

TEST_CASE("k-means is deterministic bit-for-bit and schedule independent") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  Matrix pts(40, 3);
  for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = normal(rng);
  KMeansOptions opts;
  opts.restarts = 8;
  opts.seed = 1234;
  const auto a = kmeans(pts, 4, opts);
  const auto b = kmeans(pts, 4, opts);
  opts.threads = 4;
  const auto c = kmeans(pts, 4, opts);
  CHECK(a.labels == b.labels);
  CHECK(a.labels == c.labels);
  CHECK(std::memcmp(a.centers.data(), b.centers.data(),
                    sizeof(double) * static_cast<size_t>(a.centers.size())) == 0);
  CHECK(std::memcmp(a.centers.data(), c.centers.data(),
                    sizeof(double) * static_cast<size_t>(a.centers.size())) == 0);
  CHECK(a.inertia == b.inertia);
  CHECK(a.inertia == c.inertia);
}

TEST_CASE("noiseless signal clusters exactly") {
  const auto data = noiseless_case(60, 120, 3, 41, false);
  HeteroClusteringOptions opts;
  opts.kmeans.restarts = 20;
  const auto res = hetero_clustering(data.obs, 3, opts);
  CHECK(misclustering_rate(data.truth.labels, res.assignment.labels) == 0.0);
}

TEST_CASE("degree-homogeneous noiseless signal clusters exactly without normalization") {
  const auto data = noiseless_case(60, 120, 3, 43, true);
  HeteroClusteringOptions opts;
  opts.normalization = Normalization::None;
  opts.kmeans.restarts = 20;
  const auto res = hetero_clustering(data.obs, 3, opts);
  CHECK(misclustering_rate(data.truth.labels, res.assignment.labels) == 0.0);
}

TEST_CASE("normalized noiseless singular rows collapse to K points sqrt(2) apart") {
  const auto data = noiseless_case(45, 90, 3, 47, false);
  const auto emb = plain_svd(data.obs.values, 3);
  const Matrix rows = normalize_rows(emb.u, Normalization::L2);
  for (int i = 0; i < 45; ++i)
    for (int j = i + 1; j < 45; ++j) {
      const double dist = (rows.row(i) - rows.row(j)).norm();
      if (data.truth.labels[static_cast<size_t>(i)] ==
          data.truth.labels[static_cast<size_t>(j)])
        CHECK(dist < 1e-8);
      else
        CHECK(dist == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    }
}

TEST_CASE("misclustering rate basics") {
  CHECK(misclustering_rate({0, 1, 2, 0}, {0, 1, 2, 0}) == 0.0);
  CHECK(misclustering_rate({0, 0, 1, 1}, {1, 1, 0, 0}) == 0.0);
  CHECK(misclustering_rate({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(misclustering_rate({0, 1}, {0, 1, 1}), ShapeError);
}

TEST_CASE("misclustering rate is permutation invariant and symmetric") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const auto s = random_labels(30, k, rng);
    std::vector<int> perm(static_cast<size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels permuted(s.size());
    for (size_t i = 0; i < s.size(); ++i)
      permuted[i] = perm[static_cast<size_t>(s[i])];
    CHECK(misclustering_rate(s, permuted) == 0.0);
    CHECK(rand_index(s, permuted) == doctest::Approx(1.0));

    const auto t = random_labels(30, k, rng);
    CHECK(misclustering_rate(s, t) == doctest::Approx(misclustering_rate(t, s)));
    CHECK(rand_index(s, t) == doctest::Approx(rand_index(t, s)));
  }
}

TEST_CASE("assignment and enumeration routes agree") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 5);  // up to 6
    const int n = 10 + static_cast<int>(rng() % 30);
    const auto s = random_labels(n, k, rng);
    const auto t = random_labels(n, k, rng);
    const auto via_enum = detail::label_permutation_enumeration(s, t);
    const auto via_assign = detail::label_permutation_assignment(s, t);
    long agree_enum = 0, agree_assign = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == via_enum[static_cast<size_t>(t[i])]) ++agree_enum;
      if (s[i] == via_assign[static_cast<size_t>(t[i])]) ++agree_assign;
    }
    CHECK(agree_enum == agree_assign);
    CHECK(misclustering_rate(s, t) ==
          doctest::Approx(oracle::misclustering_enumeration(s, t)));
  }
}

TEST_CASE("large-K misclustering uses the matching route") {
  std::mt19937_64 rng(19);
  const auto s = random_labels(120, 10, rng);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Labels permuted(s.size());
  for (size_t i = 0; i < s.size(); ++i) permuted[i] = perm[static_cast<size_t>(s[i])];
  CHECK(misclustering_rate(s, permuted) == 0.0);
}

TEST_CASE("rand index basics and pair-counting oracle") {
  CHECK(rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(rand_index({0, 1}, {0, 0}) == 0.0);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const auto s = random_labels(25, k, rng);
    const auto t = random_labels(25, k, rng);
    CHECK(rand_index(s, t) == doctest::Approx(oracle::rand_index_pairs(s, t)));
  }
}
