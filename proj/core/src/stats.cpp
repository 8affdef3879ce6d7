#include "relfit/stats.hpp"

#include "relfit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relfit {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Acklam's rational approximation of the normal quantile, polished with one
// Halley step; accurate to full double precision for practical purposes.
double acklam_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, r, x;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        q = p - 0.5;
        r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement on Phi(x) - p = 0.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw input_error("normal_quantile: p must lie in (0, 1)");
    return acklam_quantile(p);
}

TestResult one_sided_normal_test(double s_hat, double nu_hat, Index n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (n < 2) throw input_error("test requires n >= 2");
    if (!std::isfinite(s_hat) || !std::isfinite(nu_hat))
        throw input_error("non-finite test statistic inputs");

    TestResult result;
    result.alpha = alpha;
    result.n = n;
    result.variance = std::max(0.0, nu_hat);
    result.stat = std::sqrt(static_cast<double>(n)) * s_hat;
    if (result.variance < config::kVarianceFloor) {
        result.degenerate = true;
        result.threshold = std::numeric_limits<double>::infinity();
        result.p_value = 1.0;
        result.reject = false;
        return result;
    }
    const double sd = std::sqrt(result.variance);
    result.threshold = sd * normal_quantile(1.0 - alpha);
    result.p_value = 1.0 - normal_cdf(result.stat / sd);
    result.reject = result.stat > result.threshold;
    return result;
}

KsResult ks_test_standard_normal(std::vector<double> values) {
    const auto m = static_cast<double>(values.size());
    if (values.size() < 8) throw input_error("ks_test_standard_normal: need at least 8 values");
    std::sort(values.begin(), values.end());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = normal_cdf(values[i]);
        const double lo = static_cast<double>(i) / m;
        const double hi = static_cast<double>(i + 1) / m;
        d = std::max(d, std::max(cdf - lo, hi - cdf));
    }
    // Stephens' correction, then the asymptotic Kolmogorov series
    // Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
    const double t = d * (std::sqrt(m) + 0.12 + 0.11 / std::sqrt(m));
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

BinomialCi wilson_interval(Index successes, Index trials) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw input_error("wilson_interval: invalid counts");
    const double z = 1.959963984540054;  // Phi^{-1}(0.975)
    const double nn = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    // at the boundary counts the interval endpoint is exactly the proportion;
    // keep it there instead of leaving rounding residue above/below it
    const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = successes == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw input_error("median_of: empty input");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace relfit
