#pragma once

#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace dhlcm {

// Squared standardized difference of two item-parameter estimates.
double pairwise_stat(const Matrix& theta_hat, const Matrix& sigma2_hat, int j,
                     int k1, int k2);

// Max of the C(K,2) pairwise statistics for feature j.
double feature_stat(const Matrix& theta_hat, const Matrix& sigma2_hat, int j);

// Size-alpha cutoff for the max of M*C(K,2) iid chi-squared(1) variables:
// q with F(q) = (1-alpha)^(1/(M*C(K,2))).
double chi_max_threshold(int m, int k, double alpha);

// 2 g_{1-alpha} + c_{M,K} with g the standard Gumbel quantile and
// c_{M,K} = 2 log(M*C(K,2)) - log log(M*C(K,2)) - log pi.
// Requires M*C(K,2) >= 2.
double gumbel_threshold(int m, int k, double alpha);

// p = 1 - F_{chi2_1}(t)^{C(K,2)}, computed tail-accurately.
double feature_pvalue(double t_j, int k);

// Step-up rule: largest r with p_(r) <= alpha*r/M; rejects every hypothesis
// with p <= p_(r). Returns 0-based indices into the input, ascending.
std::vector<int> benjamini_hochberg(const std::vector<double>& pvalues,
                                    double alpha);

enum class TestRegime { Auto, ChiSquareMax, Gumbel };

struct TestReport {
  std::vector<int> feature_ids;  // tested features, 0-based
  std::vector<double> stats;
  std::vector<double> pvalues;
  std::vector<int> not_testable;  // excluded features, 0-based
  double global_stat = 0.0;
  double threshold = 0.0;
  double global_pvalue = 1.0;
  bool reject = false;
  TestRegime regime = TestRegime::ChiSquareMax;  // resolved, never Auto
  double alpha = 0.0;
  std::vector<int> bh_rejections;  // subset of feature_ids
};

// Joint equal-columns test over a feature set. Features with any
// theta_hat(j,k) <= 0 or a nonpositive pairwise variance sum are excluded
// and reported. Auto picks the chi-squared-max calibration when
// M*C(K,2) <= 30, the Gumbel calibration otherwise.
TestReport global_test(const Matrix& theta_hat, const Matrix& sigma2_hat,
                       const std::vector<int>& feature_set, double alpha,
                       TestRegime regime = TestRegime::Auto);

const char* regime_name(TestRegime regime);

}  // namespace dhlcm
