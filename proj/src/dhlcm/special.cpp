#include "special.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace dhlcm {

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * eps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

// Modified Lentz continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double lower_reg_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || std::isnan(x))
    throw InvalidArgumentError("lower_reg_gamma requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double upper_reg_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || std::isnan(x))
    throw InvalidArgumentError("upper_reg_gamma requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_squared_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return lower_reg_gamma(df / 2.0, x / 2.0);
}

double chi_squared_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return upper_reg_gamma(df / 2.0, x / 2.0);
}

double chi_squared_quantile(double p, double df) {
  if (p == 0.0) return 0.0;
  if (!(p > 0.0 && p < 1.0))
    throw InvalidArgumentError("chi_squared_quantile requires 0 <= p < 1");
  double lo = 0.0;
  double hi = df + 10.0;
  while (chi_squared_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e308) throw ConvergenceError("chi_squared_quantile bracket overflow");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (chi_squared_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double gumbel_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidArgumentError("gumbel_quantile requires 0 < p < 1");
  return -std::log(-std::log(p));
}

}  // namespace dhlcm
