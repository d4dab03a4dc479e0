#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "special.hpp"

namespace dhlcm {

namespace {

long pair_count(int k) { return static_cast<long>(k) * (k - 1) / 2; }

void check_feature(const Matrix& theta_hat, const Matrix& sigma2_hat, int j) {
  if (theta_hat.rows() != sigma2_hat.rows() ||
      theta_hat.cols() != sigma2_hat.cols())
    throw ShapeError("theta_hat and sigma2_hat shapes differ");
  if (j < 0 || j >= theta_hat.rows())
    throw InvalidArgumentError("feature index out of range");
}

// 1 - F^c with precision kept for F near 1: F^c = exp(c log(1-Q)).
double one_minus_cdf_power(double q_tail, double count) {
  return -std::expm1(count * std::log1p(-q_tail));
}

}  // namespace

const char* regime_name(TestRegime regime) {
  switch (regime) {
    case TestRegime::Auto: return "auto";
    case TestRegime::ChiSquareMax: return "chi_square_max";
    case TestRegime::Gumbel: return "gumbel";
  }
  return "unknown";
}

double pairwise_stat(const Matrix& theta_hat, const Matrix& sigma2_hat, int j,
                     int k1, int k2) {
  check_feature(theta_hat, sigma2_hat, j);
  const int k = static_cast<int>(theta_hat.cols());
  if (k1 < 0 || k1 >= k || k2 < 0 || k2 >= k || k1 == k2)
    throw InvalidArgumentError("invalid class pair");
  if (!(theta_hat(j, k1) > 0.0) || !(theta_hat(j, k2) > 0.0)) {
    std::ostringstream msg;
    msg << "feature " << (j + 1) << " has a nonpositive estimate; not testable";
    throw NotTestableError(msg.str());
  }
  const double denom = sigma2_hat(j, k1) + sigma2_hat(j, k2);
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "feature " << (j + 1) << " has zero variance for classes " << (k1 + 1)
        << "," << (k2 + 1) << "; not testable";
    throw NotTestableError(msg.str());
  }
  const double diff = theta_hat(j, k1) - theta_hat(j, k2);
  return diff * diff / denom;
}

double feature_stat(const Matrix& theta_hat, const Matrix& sigma2_hat, int j) {
  check_feature(theta_hat, sigma2_hat, j);
  const int k = static_cast<int>(theta_hat.cols());
  if (k < 2) throw InvalidArgumentError("feature_stat requires K >= 2");
  double best = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      best = std::max(best, pairwise_stat(theta_hat, sigma2_hat, j, a, b));
  return best;
}

double chi_max_threshold(int m, int k, double alpha) {
  if (m < 1 || k < 2) throw InvalidArgumentError("chi_max_threshold needs M >= 1, K >= 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgumentError("alpha must be in (0,1)");
  const double tests = static_cast<double>(m) * static_cast<double>(pair_count(k));
  const double beta = std::pow(1.0 - alpha, 1.0 / tests);
  return chi_squared_quantile(beta, 1.0);
}

double gumbel_threshold(int m, int k, double alpha) {
  if (m < 1 || k < 2) throw InvalidArgumentError("gumbel_threshold needs M >= 1, K >= 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgumentError("alpha must be in (0,1)");
  const double log_tests =
      std::log(static_cast<double>(m)) + std::log(static_cast<double>(pair_count(k)));
  if (log_tests <= 0.0)
    throw DomainError("gumbel threshold undefined for M*C(K,2) <= 1");
  const double c_mk = 2.0 * log_tests - std::log(log_tests) - std::log(M_PI);
  return 2.0 * gumbel_quantile(1.0 - alpha) + c_mk;
}

double feature_pvalue(double t_j, int k) {
  if (t_j < 0.0) throw InvalidArgumentError("feature statistic must be >= 0");
  if (k < 2) throw InvalidArgumentError("feature_pvalue requires K >= 2");
  return one_minus_cdf_power(chi_squared_sf(t_j, 1.0),
                             static_cast<double>(pair_count(k)));
}

std::vector<int> benjamini_hochberg(const std::vector<double>& pvalues,
                                    double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgumentError("alpha must be in (0,1)");
  const int m = static_cast<int>(pvalues.size());
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgumentError("p-values must lie in [0,1]");
  if (m == 0) return {};

  std::vector<int> order(pvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pvalues[static_cast<size_t>(a)] < pvalues[static_cast<size_t>(b)]; });

  double cutoff = -1.0;
  for (int r = m; r >= 1; --r) {
    const double p = pvalues[static_cast<size_t>(order[static_cast<size_t>(r - 1)])];
    if (p <= alpha * static_cast<double>(r) / static_cast<double>(m)) {
      cutoff = p;
      break;
    }
  }
  std::vector<int> rejected;
  if (cutoff < 0.0) return rejected;
  for (int i = 0; i < m; ++i)
    if (pvalues[static_cast<size_t>(i)] <= cutoff) rejected.push_back(i);
  return rejected;
}

TestReport global_test(const Matrix& theta_hat, const Matrix& sigma2_hat,
                       const std::vector<int>& feature_set, double alpha,
                       TestRegime regime) {
  if (theta_hat.rows() != sigma2_hat.rows() ||
      theta_hat.cols() != sigma2_hat.cols())
    throw ShapeError("theta_hat and sigma2_hat shapes differ");
  const int k = static_cast<int>(theta_hat.cols());
  if (k < 2) throw InvalidArgumentError("global_test requires K >= 2");
  if (feature_set.empty())
    throw InvalidArgumentError("global_test requires a nonempty feature set");

  TestReport report;
  report.alpha = alpha;
  for (int j : feature_set) {
    if (j < 0 || j >= theta_hat.rows())
      throw InvalidArgumentError("feature index out of range");
    try {
      const double t = feature_stat(theta_hat, sigma2_hat, j);
      report.feature_ids.push_back(j);
      report.stats.push_back(t);
      report.pvalues.push_back(feature_pvalue(t, k));
    } catch (const NotTestableError&) {
      report.not_testable.push_back(j);
    }
  }
  const int m = static_cast<int>(report.feature_ids.size());
  if (m == 0)
    throw NoTestableFeaturesError("no testable features in the requested set");

  report.global_stat = *std::max_element(report.stats.begin(), report.stats.end());

  const long tests = static_cast<long>(m) * pair_count(k);
  TestRegime resolved = regime;
  if (resolved == TestRegime::Auto)
    resolved = tests <= 30 ? TestRegime::ChiSquareMax : TestRegime::Gumbel;
  report.regime = resolved;

  if (resolved == TestRegime::ChiSquareMax) {
    report.threshold = chi_max_threshold(m, k, alpha);
    report.global_pvalue = one_minus_cdf_power(
        chi_squared_sf(report.global_stat, 1.0), static_cast<double>(tests));
  } else {
    report.threshold = gumbel_threshold(m, k, alpha);
    const double log_tests = std::log(static_cast<double>(tests));
    const double c_mk = 2.0 * log_tests - std::log(log_tests) - std::log(M_PI);
    report.global_pvalue =
        -std::expm1(-std::exp(-(report.global_stat - c_mk) / 2.0));
  }
  report.reject = report.global_stat > report.threshold;

  const auto rej = benjamini_hochberg(report.pvalues, alpha);
  for (int idx : rej)
    report.bh_rejections.push_back(report.feature_ids[static_cast<size_t>(idx)]);
  return report;
}

}  // namespace dhlcm
