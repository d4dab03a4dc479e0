#include <doctest.h>

#include <random>

#include "dhlcm/model.hpp"

using namespace dhlcm;

namespace {

ObservationMatrix make_obs(std::initializer_list<std::initializer_list<double>> rows,
                           ModelFamily family) {
  ObservationMatrix obs;
  obs.family = family;
  const auto r = rows.size();
  const auto c = rows.begin()->size();
  obs.values.resize(static_cast<Index>(r), static_cast<Index>(c));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) obs.values(i, j++) = v;
    ++i;
  }
  return obs;
}

}  // namespace

TEST_CASE("validate accepts in-range bernoulli entries") {
  CHECK_NOTHROW(validate(make_obs({{0, 1}, {1, 0}}, ModelFamily::bernoulli())));
}

TEST_CASE("validate reports the first out-of-range coordinate") {
  const auto obs = make_obs({{0, 2}, {1, 0}}, ModelFamily::bernoulli());
  try {
    validate(obs);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.row() == 1);
    CHECK(e.col() == 2);
  }
}

TEST_CASE("validate accepts binomial entries up to the trial count") {
  CHECK_NOTHROW(validate(make_obs({{0, 2}, {1, 0}}, ModelFamily::binomial(3))));
  CHECK_THROWS_AS(validate(make_obs({{0, 4}, {1, 0}}, ModelFamily::binomial(3))),
                  DomainError);
}

TEST_CASE("validate rejects non-integer and undersized input") {
  CHECK_THROWS_AS(validate(make_obs({{0.5, 0}, {0, 0}}, ModelFamily::poisson())),
                  DomainError);
  ObservationMatrix tiny;
  tiny.family = ModelFamily::bernoulli();
  tiny.values = Matrix::Zero(1, 5);
  CHECK_THROWS_AS(validate(tiny), DomainError);
}

TEST_CASE("one-hot conversions are mutual inverses") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const int n = 5 + static_cast<int>(rng() % 40);
    Labels labels(static_cast<size_t>(n));
    for (auto& l : labels) l = static_cast<int>(rng() % static_cast<unsigned>(k));
    const Matrix z = labels_to_onehot(labels, k);
    CHECK(onehot_to_labels(z) == labels);
    CHECK(z.rowwise().sum().isOnes());
  }
}

TEST_CASE("ground truth validation enforces the degree rescaling") {
  GroundTruth truth;
  truth.k = 2;
  truth.labels = {0, 0, 1, 1};
  truth.degrees = Vector::Ones(4);
  truth.theta = Matrix::Constant(3, 2, 0.4);
  CHECK_NOTHROW(validate(truth, ModelFamily::bernoulli()));

  truth.degrees(0) = 1.5;  // breaks sum of squares = cluster size
  CHECK_THROWS_AS(validate(truth, ModelFamily::bernoulli()), DomainError);
}

TEST_CASE("ground truth validation ties mean overflows to the clamp count") {
  GroundTruth truth;
  truth.k = 2;
  truth.labels = {0, 0, 1, 1};
  // cluster 0 degrees (sqrt(0.5), sqrt(1.5)): sum of squares = 2
  truth.degrees = Vector::Ones(4);
  truth.degrees(0) = std::sqrt(0.5);
  truth.degrees(1) = std::sqrt(1.5);
  truth.theta = Matrix::Constant(2, 2, 0.9);

  // degree sqrt(1.5)*0.9 > 1 on both features of subject 2
  truth.clamp_count = 0;
  CHECK_THROWS_AS(validate(truth, ModelFamily::bernoulli()), DomainError);
  truth.clamp_count = 2;
  CHECK_NOTHROW(validate(truth, ModelFamily::bernoulli()));
  // unbounded family ignores the mean cap
  truth.clamp_count = 0;
  CHECK_NOTHROW(validate(truth, ModelFamily::poisson()));
}

TEST_CASE("ground truth validation requires every class") {
  GroundTruth truth;
  truth.k = 3;
  truth.labels = {0, 0, 1, 1};
  truth.degrees = Vector::Ones(4);
  truth.theta = Matrix::Constant(2, 3, 0.1);
  CHECK_THROWS_AS(validate(truth, ModelFamily::bernoulli()), DomainError);
}
