#include <doctest.h>

#include <cmath>
#include <random>

#include "dhlcm/clustering.hpp"
#include "dhlcm/simulation.hpp"
#include "dhlcm/spectral.hpp"
#include "test_oracles.hpp"

using namespace dhlcm;

namespace {

Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return Matrix(0.5 * (a + a.transpose()));
}

// Exact noiseless signal with known left singular space: the columns of
// Omega Z have disjoint supports, so normalizing them gives U exactly.
struct NoiselessCase {
  Matrix r;
  Matrix u_exact;  // N x K
  Labels labels;
  Vector degrees;
  Matrix theta;
};

NoiselessCase make_noiseless(int n, int j, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NoiselessCase c;
  c.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) c.labels[static_cast<size_t>(i)] = i % k;
  std::uniform_real_distribution<double> uni(0.1, 1.5);
  Vector raw(n);
  for (int i = 0; i < n; ++i) raw(i) = uni(rng);
  c.degrees = rescale_degrees(raw, c.labels, k);

  std::uniform_real_distribution<double> th(0.05, 0.6);
  c.theta.resize(j, k);
  for (Index a = 0; a < c.theta.rows(); ++a)
    for (Index b = 0; b < c.theta.cols(); ++b) c.theta(a, b) = th(rng);
  // spread the columns so the signal has full rank K
  for (int b = 0; b < k; ++b) c.theta(b, b) += 1.0;

  const Matrix z = labels_to_onehot(c.labels, k);
  c.r = c.degrees.asDiagonal() * z * c.theta.transpose();

  c.u_exact = Matrix::Zero(n, k);
  Vector colnorm = Vector::Zero(k);
  for (int i = 0; i < n; ++i)
    colnorm(c.labels[static_cast<size_t>(i)]) += c.degrees(i) * c.degrees(i);
  for (int i = 0; i < n; ++i) {
    const int s = c.labels[static_cast<size_t>(i)];
    c.u_exact(i, s) = c.degrees(i) / std::sqrt(colnorm(s));
  }
  return c;
}

}  // namespace

TEST_CASE("hollow zeroes the diagonal and keeps the rest") {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  Matrix h = hollow(m);
  CHECK(h(0, 0) == 0);
  CHECK(h(0, 1) == 2);
  CHECK(h(1, 0) == 3);
  CHECK(h(1, 1) == 0);
  CHECK((m - h - diag_part(m)).norm() == 0.0);

  CHECK(hollow(Matrix::Identity(3, 3)).norm() == 0.0);
  CHECK(hollow(Matrix::Zero(3, 3)).norm() == 0.0);
  CHECK_THROWS_AS(hollow(Matrix::Zero(2, 3)), ShapeError);
}

TEST_CASE("hollow is idempotent") {
  std::mt19937_64 rng(11);
  const Matrix m = random_symmetric(6, rng);
  const Matrix h = hollow(m);
  CHECK((hollow(h) - h).norm() == 0.0);
}

TEST_CASE("truncated_eig on a diagonal matrix") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 3, 2, 1;
  const auto eig = truncated_eig(m, 2);
  CHECK(eig.values(0) == doctest::Approx(3.0));
  CHECK(eig.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("truncated_eig on the 2x2 exchange-plus-diagonal matrix") {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const auto eig = truncated_eig(m, 1);
  CHECK(eig.values(0) == doctest::Approx(3.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(inv_sqrt2));
  CHECK(std::abs(eig.vectors(1, 0)) == doctest::Approx(inv_sqrt2));
  CHECK(eig.vectors(0, 0) * eig.vectors(1, 0) > 0.0);
}

TEST_CASE("full-rank truncated_eig reconstructs against the rotation oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_symmetric(5, rng);
    const auto eig = truncated_eig(m, 5);
    const Matrix rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((eig.vectors.transpose() * eig.vectors - Matrix::Identity(5, 5)).norm() < 1e-8);

    Matrix ovec;
    Vector oval;
    oracle::jacobi_eig(m, ovec, oval);
    for (int c = 0; c < 5; ++c)
      CHECK(eig.values(c) == doctest::Approx(oval(c)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(truncated_eig(Matrix::Zero(2, 3), 1), ShapeError);
  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(truncated_eig(asym, 1), ShapeError);
}

TEST_CASE("diagonal re-imputation recovers a rank-1 all-ones column") {
  Matrix r(3, 1);
  r << 1, 1, 1;
  const auto emb = hetero_pca(r, 1, 20);
  const double expected = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(emb.u(i, 0)) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(emb.u(0, 0) * emb.u(1, 0) > 0.0);
  CHECK(emb.u(1, 0) * emb.u(2, 0) > 0.0);
}

TEST_CASE("noiseless low-rank signal: embedding spans the exact subspace") {
  const auto c = make_noiseless(30, 60, 3, 91);
  const auto emb = hetero_pca(c.r, 3, 20);
  CHECK((emb.u.transpose() * emb.u - Matrix::Identity(3, 3)).norm() < 1e-8);
  CHECK(subspace_error(emb.u, c.u_exact) < 1e-6);
  CHECK(emb.eigenvalues(0) >= emb.eigenvalues(1));
  CHECK(emb.eigenvalues(1) >= emb.eigenvalues(2));
}

TEST_CASE("noiseless fixed point: rank-K approximation converges to the Gram matrix") {
  const auto c = make_noiseless(30, 60, 3, 17);
  std::vector<double> deltas;
  const auto emb = hetero_pca(c.r, 3, 40, &deltas);
  const Matrix gram = c.r * c.r.transpose();
  const Matrix rebuilt =
      emb.u * emb.eigenvalues.asDiagonal() * emb.u.transpose();
  CHECK((rebuilt - gram).norm() / gram.norm() < 1e-6);
  CHECK(deltas.size() == 40);
  CHECK(deltas.back() < deltas.front());
}

TEST_CASE("t0 = 0 returns the eigenvectors of the hollowed Gram matrix") {
  const auto c = make_noiseless(12, 20, 2, 5);
  const auto emb = hetero_pca(c.r, 2, 0);
  const auto direct = truncated_eig(hollow(Matrix(c.r * c.r.transpose())), 2);
  CHECK(subspace_error(emb.u, direct.vectors) < 1e-10);
}

TEST_CASE("plain_svd basics") {
  Matrix r = Matrix::Zero(2, 2);
  r.diagonal() << 3, 1;
  const auto emb = plain_svd(r, 1);
  CHECK(std::abs(emb.u(0, 0)) == doctest::Approx(1.0));
  CHECK(emb.eigenvalues(0) == doctest::Approx(9.0));

  // orthogonal columns span exactly
  Matrix q(4, 2);
  q << 1, 1, 1, -1, 1, 1, -1, 1;
  const auto emb2 = plain_svd(q, 2);
  CHECK((emb2.u * (emb2.u.transpose() * q) - q).norm() < 1e-10);
}

TEST_CASE("full-rank plain_svd reconstructs the input") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal;
  Matrix r(10, 20);
  for (Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
  const auto emb = plain_svd(r, 10);
  const Vector sv = emb.eigenvalues.cwiseSqrt();
  const Matrix v = r.transpose() * emb.u * sv.cwiseInverse().asDiagonal();
  CHECK((emb.u * sv.asDiagonal() * v.transpose() - r).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("downstream clustering is invariant to column sign flips") {
  const auto c = make_noiseless(24, 40, 3, 123);
  const auto emb = hetero_pca(c.r, 3, 10);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    Matrix flipped = emb.u;
    for (Index col = 0; col < flipped.cols(); ++col)
      if (rng() & 1u) flipped.col(col) *= -1.0;
    KMeansOptions opts;
    opts.restarts = 5;
    opts.seed = 77;
    const auto base = kmeans(normalize_rows(emb.u, Normalization::L2), 3, opts);
    const auto alt = kmeans(normalize_rows(flipped, Normalization::L2), 3, opts);
    CHECK(base.labels == alt.labels);
  }
}
