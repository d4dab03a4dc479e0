#include <doctest.h>

#include <cmath>
#include <random>

#include "dhlcm/estimation.hpp"
#include "dhlcm/simulation.hpp"
#include "dhlcm/spectral.hpp"

using namespace dhlcm;

namespace {

struct NoiselessFixture {
  GeneratedData data;
  SpectralEmbedding embedding;
  ClusterAssignment assignment;  // exact labels
};

NoiselessFixture noiseless_fixture(int n, int j, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NoiselessFixture f;
  f.data.truth.k = k;
  f.data.truth.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) f.data.truth.labels[static_cast<size_t>(i)] = i % k;
  std::uniform_real_distribution<double> uni(0.1, 1.5);
  Vector raw(n);
  for (int i = 0; i < n; ++i) raw(i) = uni(rng);
  f.data.truth.degrees = rescale_degrees(raw, f.data.truth.labels, k);
  std::uniform_real_distribution<double> th(0.05, 0.5);
  f.data.truth.theta.resize(j, k);
  for (Index a = 0; a < j; ++a)
    for (Index b = 0; b < k; ++b) f.data.truth.theta(a, b) = th(rng);
  for (int b = 0; b < k; ++b) f.data.truth.theta(b, b) += 0.5;
  const Matrix z = labels_to_onehot(f.data.truth.labels, k);
  f.data.obs.family = ModelFamily::bernoulli();
  f.data.obs.values =
      f.data.truth.degrees.asDiagonal() * z * f.data.truth.theta.transpose();

  f.embedding = hetero_pca(f.data.obs.values, k, 30);
  f.assignment.labels = f.data.truth.labels;
  f.assignment.centers = Matrix::Zero(k, k);
  return f;
}

}  // namespace

TEST_CASE("unit degrees recovered for balanced noiseless clusters") {
  NoiselessFixture f = noiseless_fixture(40, 80, 4, 3);
  f.data.truth.degrees.setOnes();  // already satisfies the rescaling
  const Matrix z = labels_to_onehot(f.data.truth.labels, 4);
  f.data.obs.values = z * f.data.truth.theta.transpose();
  f.embedding = hetero_pca(f.data.obs.values, 4, 30);
  const Vector degrees = estimate_degrees(f.embedding, f.assignment);
  for (Index i = 0; i < degrees.size(); ++i)
    CHECK(degrees(i) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("degree ratios within a cluster match the truth exactly") {
  const NoiselessFixture f = noiseless_fixture(36, 72, 3, 7);
  const Vector degrees = estimate_degrees(f.embedding, f.assignment);
  for (int i = 0; i < 36; ++i)
    for (int l = i + 1; l < 36; ++l) {
      if (f.data.truth.labels[static_cast<size_t>(i)] !=
          f.data.truth.labels[static_cast<size_t>(l)])
        continue;
      CHECK(degrees(i) / degrees(l) ==
            doctest::Approx(f.data.truth.degrees(i) / f.data.truth.degrees(l))
                .epsilon(1e-9));
    }
}

TEST_CASE("degree estimation rejects vanishing embedding rows") {
  SpectralEmbedding emb;
  emb.u = Matrix::Zero(3, 2);
  emb.u(0, 0) = 1.0;
  emb.u(1, 1) = 1.0;
  emb.eigenvalues = Vector::Ones(2);
  ClusterAssignment assign;
  assign.labels = {0, 1, 0};
  assign.centers = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(estimate_degrees(emb, assign), DegenerateRowError);
}

TEST_CASE("theta estimator reduces to cluster means for unit degrees") {
  ObservationMatrix obs;
  obs.family = ModelFamily::bernoulli();
  obs.values.resize(4, 2);
  obs.values << 1, 0, 1, 1, 0, 1, 0, 0;
  const Labels labels = {0, 0, 1, 1};
  const Matrix theta = estimate_theta(obs, labels, 2, Vector::Ones(4));
  CHECK(theta(0, 0) == doctest::Approx(1.0));
  CHECK(theta(1, 0) == doctest::Approx(0.5));
  CHECK(theta(0, 1) == doctest::Approx(0.0));
  CHECK(theta(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("binomial theta estimator divides by the trial count") {
  ObservationMatrix obs;
  obs.family = ModelFamily::binomial(4);
  obs.values.resize(4, 1);
  obs.values << 4, 4, 0, 0;
  const Labels labels = {0, 0, 0, 0};
  const Matrix theta = estimate_theta(obs, labels, 1, Vector::Ones(4));
  CHECK(theta(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("noiseless data with exact labels and degrees recovers theta") {
  const NoiselessFixture f = noiseless_fixture(30, 50, 3, 11);
  const Matrix theta = estimate_theta(f.data.obs, f.data.truth.labels, 3,
                                      f.data.truth.degrees);
  CHECK((theta - f.data.truth.theta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("theta estimation errors on an empty cluster") {
  ObservationMatrix obs;
  obs.family = ModelFamily::bernoulli();
  obs.values = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(estimate_theta(obs, {0, 0, 0}, 2, Vector::Ones(3)),
                  EmptyClusterError);
}

TEST_CASE("variance plug-in reduces to the classic forms") {
  const Labels labels(10, 0);
  const Vector degrees = Vector::Ones(10);

  Matrix theta(1, 1);
  theta << 0.3;
  const auto bern =
      estimate_variances(theta, labels, 1, degrees, ModelFamily::bernoulli());
  CHECK(bern.sigma2(0, 0) == doctest::Approx(0.3 * 0.7 / 10.0).epsilon(1e-12));

  theta(0, 0) = 2.5;
  const auto pois =
      estimate_variances(theta, labels, 1, degrees, ModelFamily::poisson());
  CHECK(pois.sigma2(0, 0) == doctest::Approx(2.5 / 10.0).epsilon(1e-12));

  theta(0, 0) = 0.5;
  const auto binom =
      estimate_variances(theta, labels, 1, degrees, ModelFamily::binomial(4));
  CHECK(binom.sigma2(0, 0) == doctest::Approx(0.00625).epsilon(1e-12));
}

TEST_CASE("nonpositive theta entries are zeroed and flagged") {
  const Labels labels(5, 0);
  Matrix theta(2, 1);
  theta << 0.0, 0.4;
  const auto res =
      estimate_variances(theta, labels, 1, Vector::Ones(5), ModelFamily::bernoulli());
  CHECK(res.sigma2(0, 0) == 0.0);
  CHECK(res.not_testable.size() == 1);
  CHECK(res.not_testable[0] == std::pair<int, int>{0, 0});
  CHECK(res.sigma2(1, 0) > 0.0);
}

TEST_CASE("negative variance summands are clamped and counted") {
  const Labels labels = {0, 0};
  Vector degrees(2);
  degrees << std::sqrt(0.5), std::sqrt(1.5);  // sum of squares = 2
  Matrix theta(1, 1);
  theta << 0.9;  // 1 - sqrt(1.5)*0.9 < 0
  const auto res =
      estimate_variances(theta, labels, 1, degrees, ModelFamily::bernoulli());
  CHECK(res.clamped_summands == 1);
  const double kept = (1.0 - degrees(0) * 0.9) / degrees(0);
  CHECK(res.sigma2(0, 0) == doctest::Approx(0.9 * kept / 4.0).epsilon(1e-12));
}

TEST_CASE("variance at the truth matches the population formula") {
  const NoiselessFixture f = noiseless_fixture(24, 30, 3, 13);
  const auto res = estimate_variances(f.data.truth.theta, f.data.truth.labels, 3,
                                      f.data.truth.degrees, ModelFamily::bernoulli());
  const auto sizes = cluster_sizes_of(f.data.truth.labels, 3);
  for (Index j = 0; j < 30; ++j)
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (Index i = 0; i < 24; ++i) {
        if (f.data.truth.labels[static_cast<size_t>(i)] != c) continue;
        sum += (1.0 - f.data.truth.degrees(i) * f.data.truth.theta(j, c)) /
               f.data.truth.degrees(i);
      }
      const double csize = static_cast<double>(sizes[static_cast<size_t>(c)]);
      const double expected = f.data.truth.theta(j, c) * sum / (csize * csize);
      CHECK(res.sigma2(j, c) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("cluster-wise degree scaling rescales theta columns inversely") {
  const NoiselessFixture f = noiseless_fixture(21, 18, 3, 17);
  const Matrix base = estimate_theta(f.data.obs, f.data.truth.labels, 3,
                                     f.data.truth.degrees);
  const double scales[3] = {2.0, 0.5, 3.0};
  Vector scaled = f.data.truth.degrees;
  for (Index i = 0; i < scaled.size(); ++i)
    scaled(i) *= scales[f.data.truth.labels[static_cast<size_t>(i)]];
  const Matrix adjusted = estimate_theta(f.data.obs, f.data.truth.labels, 3, scaled);
  for (int c = 0; c < 3; ++c)
    CHECK((adjusted.col(c) * scales[c] - base.col(c)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagnostics of the identity item matrix") {
  const Matrix theta = Matrix::Identity(2, 2);
  const auto d = diagnostics(theta);
  CHECK(d.delta == doctest::Approx(std::sqrt(2.0)));
  CHECK(d.sigma_star == doctest::Approx(1.0));
  CHECK(d.kappa == doctest::Approx(1.0));
  CHECK(d.mu_theta == doctest::Approx(1.0));
  CHECK(d.theta_max == doctest::Approx(1.0));
}

TEST_CASE("diagnostics rejects identical columns") {
  Matrix theta(3, 2);
  theta << 0.2, 0.2, 0.5, 0.5, 0.7, 0.7;
  CHECK_THROWS_AS(diagnostics(theta), RankDeficientError);
}

TEST_CASE("diagnostics on the two-block item slice") {
  Matrix theta(2, 2);
  theta << 0.3, 0.1, 0.5, 0.06;
  const auto d = diagnostics(theta);
  CHECK(d.delta == doctest::Approx(std::sqrt(0.2336)).epsilon(1e-12));
  CHECK(d.theta_max == doctest::Approx(0.5));
}

TEST_CASE("separation sandwich holds for random nonnegative matrices") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int j = 2 + static_cast<int>(rng() % 20);
    const int k = 2 + static_cast<int>(rng() % 4);
    if (j < k) continue;
    Matrix theta(j, k);
    for (Index a = 0; a < theta.size(); ++a) theta.data()[a] = uni(rng);
    Diagnostics d;
    try {
      d = diagnostics(theta);
    } catch (const RankDeficientError&) {
      continue;
    }
    ++checked;
    CHECK(d.delta / std::sqrt(2.0) >= d.sigma_star - 1e-10);
    CHECK(d.sigma_star >= d.delta / (std::sqrt(2.0) * d.kappa) - 1e-10);
    CHECK(d.kappa >= 1.0 - 1e-12);
    CHECK(d.mu_theta >= 1.0 - 1e-12);
    CHECK(d.delta <= std::sqrt(2.0) * d.kappa * d.sigma_star + 1e-10);
  }
  CHECK(checked > 900);
}
