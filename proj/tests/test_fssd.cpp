#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include "relfit/error.hpp"
#include "relfit/fssd.hpp"
#include "relfit/rng.hpp"
#include "relfit/stats.hpp"

#include "support/oracles.hpp"
#include "support/testutil.hpp"

#include <cmath>
#include <memory>

using namespace relfit;

namespace {

IsotropicGaussian shifted_gaussian(Index d, double shift, double variance = 1.0) {
    Vector mean = Vector::Zero(d);
    mean(0) = shift;
    return IsotropicGaussian(mean, variance);
}

}  // namespace

TEST_CASE("stein features match the literal formula") {
    Rng rng = make_rng(3);
    const Index d = 3, J = 2, n = 7;
    const Matrix W = standard_normal_matrix(rng, J, d);
    const Matrix Z = standard_normal_matrix(rng, n, d);
    const IsotropicGaussian model = shifted_gaussian(d, 0.7, 1.4);
    const GaussianKernel k(1.8);

    const Vector z0 = Z.row(0).transpose();
    const Vector tau = stein_feature(k, model, W, z0);
    REQUIRE(tau.size() == d * J);
    CHECK(testutil::max_rel_err(tau, reference::stein_tau(1.8, model, W, z0)) < 1e-13);

    const Matrix T = stein_feature_matrix(k, model, W, Z);
    REQUIRE(T.rows() == n);
    REQUIRE(T.cols() == d * J);
    for (Index i = 0; i < n; ++i) {
        const Vector row = T.row(i).transpose();
        CHECK(testutil::max_rel_err(
                  row, reference::stein_tau(1.8, model, W, Z.row(i).transpose())) < 1e-13);
    }
}

TEST_CASE("squared discrepancy matches the double-sum oracle") {
    Rng seeds = make_rng(404);
    for (int rep = 0; rep < 60; ++rep) {
        Rng rng = make_rng(seeds());
        const Index n = 2 + static_cast<Index>(uniform01(rng) * 28);
        const Index d = 1 + static_cast<Index>(uniform01(rng) * 4);
        const Index J = 1 + static_cast<Index>(uniform01(rng) * 3);
        const Matrix W = 1.5 * standard_normal_matrix(rng, J, d);
        const Matrix Z = standard_normal_matrix(rng, n, d).array() + 0.3;
        const double sigma2 = 0.5 + 2.0 * uniform01(rng);
        const IsotropicGaussian model = shifted_gaussian(d, 0.6, 0.9);
        const GaussianKernel k(sigma2);
        const double got = fssd_sq(k, model, W, Z);
        const double want = reference::fssd_sq(sigma2, model, W, Z);
        CHECK(testutil::rel_err(got, want) < 1e-10);
    }
}

TEST_CASE("mean discrepancy vanishes under the true model") {
    // under model == sampling distribution the population FSSD^2 is zero, so
    // the mean over repetitions should sit near zero
    Rng rng = make_rng(5);
    const Index d = 2;
    const IsotropicGaussian model(Vector::Zero(d), 1.0);
    Matrix W(2, d);
    W << 0.8, -0.3, -1.1, 0.5;
    const GaussianKernel k(1.0);
    double mean = 0.0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) mean += fssd_sq(k, model, W, standard_normal_matrix(rng, 60, d));
    mean /= reps;
    CHECK(std::abs(mean) < 2e-4);
}

TEST_CASE("relative statistic and variance match the covariance oracle") {
    Rng seeds = make_rng(606);
    for (int rep = 0; rep < 30; ++rep) {
        Rng rng = make_rng(seeds());
        const Index n = 5 + static_cast<Index>(uniform01(rng) * 35);
        const Index d = 1 + static_cast<Index>(uniform01(rng) * 3);
        const Index J = 1 + static_cast<Index>(uniform01(rng) * 3);
        const Matrix V = 1.5 * standard_normal_matrix(rng, J, d);
        const Matrix W = 1.5 * standard_normal_matrix(rng, J, d);
        const Matrix Z = standard_normal_matrix(rng, n, d).array() + 0.2;
        const double s2x = 0.5 + 2.0 * uniform01(rng);
        const double s2y = 0.5 + 2.0 * uniform01(rng);
        const IsotropicGaussian model_p = shifted_gaussian(d, 0.5);
        const IsotropicGaussian model_q = shifted_gaussian(d, -0.4, 1.2);
        const GaussianKernel kx(s2x), ky(s2y);
        const StatVar got = rel_fssd_stat_and_var(kx, ky, model_p, model_q, V, W, Z);
        const StatVar want = reference::rel_fssd(s2x, s2y, model_p, model_q, V, W, Z);
        CHECK(testutil::rel_err(got.stat, want.stat) < 1e-10);
        CHECK(testutil::rel_err(got.variance, want.variance) < 1e-10);
        CHECK(got.variance >= 0.0);
    }
}

TEST_CASE("swapping the candidate models exactly negates the statistic") {
    Rng rng = make_rng(8);
    const Index d = 2, J = 2, n = 40;
    const Matrix V = standard_normal_matrix(rng, J, d);
    const Matrix W = standard_normal_matrix(rng, J, d);
    const Matrix Z = standard_normal_matrix(rng, n, d);
    const IsotropicGaussian p = shifted_gaussian(d, 0.5);
    const IsotropicGaussian q = shifted_gaussian(d, -0.3, 1.3);
    const GaussianKernel kx(1.1), ky(0.8);
    const StatVar ab = rel_fssd_stat_and_var(kx, ky, p, q, V, W, Z);
    const StatVar ba = rel_fssd_stat_and_var(ky, kx, q, p, W, V, Z);
    CHECK(ab.stat == -ba.stat);
    CHECK(ab.variance == ba.variance);
}

TEST_CASE("identical candidate models give a zero statistic") {
    Rng rng = make_rng(9);
    const Index d = 2;
    const Matrix V = standard_normal_matrix(rng, 2, d);
    const Matrix Z = standard_normal_matrix(rng, 30, d);
    const IsotropicGaussian model = shifted_gaussian(d, 0.4);
    const GaussianKernel k(1.0);
    const StatVar sv = rel_fssd_stat_and_var(k, k, model, model, V, V, Z);
    CHECK(sv.stat == 0.0);
    CHECK(sv.variance == 0.0);
    const TestResult res = rel_fssd_test(k, k, model, model, V, V, Z, 0.05);
    CHECK(res.degenerate);
    CHECK_FALSE(res.reject);
}

TEST_CASE("test assembles the shared one-sided construction") {
    Rng rng = make_rng(11);
    const Index d = 2, n = 50;
    const Matrix V = standard_normal_matrix(rng, 2, d);
    const Matrix W = standard_normal_matrix(rng, 3, d);
    const Matrix Z = standard_normal_matrix(rng, n, d);
    const IsotropicGaussian p = shifted_gaussian(d, 0.8);
    const IsotropicGaussian q = shifted_gaussian(d, 0.1);
    const GaussianKernel k(1.2);
    const StatVar sv = rel_fssd_stat_and_var(k, k, p, q, V, W, Z);
    const TestResult want = one_sided_normal_test(sv.stat, sv.variance, n, 0.01);
    const TestResult got = rel_fssd_test(k, k, p, q, V, W, Z, 0.01);
    CHECK(got.stat == want.stat);
    CHECK(got.threshold == want.threshold);
    CHECK(got.p_value == want.p_value);
    CHECK(got.reject == want.reject);
}

TEST_CASE("power criterion is the regularized ratio") {
    Rng rng = make_rng(12);
    const Index d = 2, n = 45;
    const Matrix V = standard_normal_matrix(rng, 2, d);
    const Matrix Z = standard_normal_matrix(rng, n, d);
    const IsotropicGaussian p = shifted_gaussian(d, 0.7);
    const IsotropicGaussian q = shifted_gaussian(d, -0.2);
    const GaussianKernel k(1.0);
    const StatVar sv = rel_fssd_stat_and_var(k, k, p, q, V, V, Z);
    const double got = fssd_power_criterion(k, k, p, q, V, V, Z, 1e-3);
    CHECK(got == doctest::Approx(sv.stat / (1e-3 + std::sqrt(sv.variance))).epsilon(1e-13));
}

TEST_CASE("criterion gradient matches finite differences") {
    Rng seeds = make_rng(1234);
    for (int rep = 0; rep < 4; ++rep) {
        Rng rng = make_rng(seeds());
        const Index d = 2, J = 2, n = 30;
        const Matrix V0 = standard_normal_matrix(rng, J, d);
        const Matrix Z = standard_normal_matrix(rng, n, d).array() + 0.2;
        const double sigma2 = 1.1;
        const IsotropicGaussian p = shifted_gaussian(d, 0.5);
        const IsotropicGaussian q = shifted_gaussian(d, -0.4, 1.2);

        const Index dim_v = J * d;
        Vector at(dim_v + 1);
        for (Index j = 0; j < J; ++j)
            for (Index c = 0; c < d; ++c) at(j * d + c) = V0(j, c);
        at(dim_v) = std::log(sigma2);

        const ValueGrad vg = fssd_criterion_with_grad(V0, sigma2, p, q, Z, config::kDefaultGamma);
        const auto eval = [&](const Vector& params) {
            Matrix V(J, d);
            for (Index j = 0; j < J; ++j)
                for (Index c = 0; c < d; ++c) V(j, c) = params(j * d + c);
            const GaussianKernel k(std::exp(params(dim_v)));
            return fssd_power_criterion(k, k, p, q, V, V, Z, config::kDefaultGamma);
        };
        CHECK(eval(at) == doctest::Approx(vg.value).epsilon(1e-12));
        const Vector fd = reference::fd_gradient(eval, at, 1e-6);
        CHECK(testutil::max_rel_err(vg.grad, fd) < 1e-6);
    }
}

TEST_CASE("input validation") {
    Rng rng = make_rng(14);
    const Index d = 3;
    const Matrix W = standard_normal_matrix(rng, 2, d);
    const Matrix Z = standard_normal_matrix(rng, 10, d);
    const IsotropicGaussian model(Vector::Zero(d), 1.0);
    const GaussianKernel k(1.0);
    SUBCASE("model dimension mismatch") {
        const IsotropicGaussian wrong(Vector::Zero(d + 1), 1.0);
        CHECK_THROWS_AS(fssd_sq(k, wrong, W, Z), input_error);
    }
    SUBCASE("too few rows") {
        CHECK_THROWS_AS(fssd_sq(k, model, W, Z.topRows(1)), input_error);
    }
    SUBCASE("location dimension mismatch") {
        const Matrix bad = testutil::random_matrix(2, d + 1, 15);
        CHECK_THROWS_AS(fssd_sq(k, model, bad, Z), input_error);
    }
}
