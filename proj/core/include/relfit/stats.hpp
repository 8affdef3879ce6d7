#pragma once

#include "relfit/types.hpp"

#include <vector>

namespace relfit {

// Standard normal CDF Phi(x).
double normal_cdf(double x);

// Standard normal quantile Phi^{-1}(p), p in (0, 1).
double normal_quantile(double p);

// Shared construction of the one-sided test from (S_hat, nu_hat):
//   stat      = sqrt(n) * S_hat
//   threshold = sqrt(nu_hat) * Phi^{-1}(1 - alpha)
//   p_value   = 1 - Phi(stat / sqrt(nu_hat))
//   reject    = stat > threshold
// nu_hat below the variance floor marks the result degenerate: threshold +inf,
// p_value 1, no rejection.
TestResult one_sided_normal_test(double s_hat, double nu_hat, Index n, double alpha);

struct KsResult {
    double statistic = 0.0;  // sup |F_n - Phi|
    double p_value = 1.0;    // asymptotic, with Stephens' small-sample correction
};

// One-sample Kolmogorov-Smirnov test against the standard normal.
KsResult ks_test_standard_normal(std::vector<double> values);

struct BinomialCi {
    double low = 0.0;
    double high = 1.0;
};

// 95% Wilson score interval for a binomial proportion.
BinomialCi wilson_interval(Index successes, Index trials);

// Median of a vector (average of middle two for even length). Consumes the
// input order.
double median_of(std::vector<double> values);

}  // namespace relfit
