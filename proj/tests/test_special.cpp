#include <doctest.h>

#include <cmath>

#include "dhlcm/errors.hpp"
#include "dhlcm/special.hpp"
#include "test_oracles.hpp"

using namespace dhlcm;

TEST_CASE("chi-squared(1) cdf matches reference values to 1e-12") {
  // scipy.stats.chi2 reference points
  const struct {
    double x, f;
  } table[] = {
      {0.001, 0.02522712063003961}, {0.5, 0.5204998778130466},
      {1.0, 0.6826894921370859},    {3.0, 0.9167354833364496},
      {10.0, 0.9984345977419975},
  };
  for (const auto& row : table)
    CHECK(chi_squared_cdf(row.x, 1.0) ==
          doctest::Approx(row.f).epsilon(1e-12));
  CHECK(chi_squared_cdf(0.0, 1.0) == 0.0);
}

TEST_CASE("upper tail keeps full relative precision") {
  CHECK(chi_squared_sf(30.0, 1.0) ==
        doctest::Approx(4.3204630578274955e-08).epsilon(1e-12));
  CHECK(chi_squared_sf(100.0, 1.0) ==
        doctest::Approx(1.5239706048320995e-23).epsilon(1e-12));
}

TEST_CASE("cdf agrees with the erf route on a grid") {
  for (double x = 1e-6; x < 40.0; x *= 1.7)
    CHECK(chi_squared_cdf(x, 1.0) ==
          doctest::Approx(oracle::chi1_cdf(x)).epsilon(1e-12));
}

TEST_CASE("quantile inverts the cdf") {
  CHECK(chi_squared_quantile(0.95, 1.0) ==
        doctest::Approx(3.841458820694124).epsilon(1e-12));
  CHECK(chi_squared_quantile(0.3, 1.0) ==
        doctest::Approx(0.14847186183254538).epsilon(1e-12));
  CHECK(chi_squared_quantile(0.999, 1.0) ==
        doctest::Approx(10.827566170662733).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.2, 0.5, 0.9, 0.99, 1.0 - 1e-9}) {
    const double q = chi_squared_quantile(p, 1.0);
    CHECK(chi_squared_cdf(q, 1.0) == doctest::Approx(p).epsilon(1e-11));
    CHECK(q == doctest::Approx(oracle::chi1_quantile(p)).epsilon(1e-10));
  }
  CHECK(chi_squared_quantile(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(chi_squared_quantile(1.0, 1.0), InvalidArgumentError);
}

TEST_CASE("gumbel quantile") {
  CHECK(gumbel_quantile(0.95) == doctest::Approx(2.9701952490421637).epsilon(1e-14));
  CHECK(gumbel_quantile(std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(gumbel_quantile(0.0), InvalidArgumentError);
}

TEST_CASE("incomplete gamma edge cases") {
  CHECK(lower_reg_gamma(0.5, 0.0) == 0.0);
  CHECK(upper_reg_gamma(0.5, 0.0) == 1.0);
  CHECK(lower_reg_gamma(2.0, 1e3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(lower_reg_gamma(-1.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(lower_reg_gamma(0.5, -1.0), InvalidArgumentError);
}
