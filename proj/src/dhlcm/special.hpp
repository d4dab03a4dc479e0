#pragma once

namespace dhlcm {

// Regularized incomplete gamma functions, relative accuracy ~1e-14.
// P(a,x) + Q(a,x) = 1; the upper tail is computed directly so survival
// probabilities keep full precision far into the tail.
double lower_reg_gamma(double a, double x);
double upper_reg_gamma(double a, double x);

double chi_squared_cdf(double x, double df = 1.0);
double chi_squared_sf(double x, double df = 1.0);

// Inverse CDF for 0 < p < 1 (p = 0 returns 0), bisection to full precision.
double chi_squared_quantile(double p, double df = 1.0);

// Standard Gumbel quantile -log(-log p).
double gumbel_quantile(double p);

}  // namespace dhlcm
