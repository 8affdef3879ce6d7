#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace relfit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

// Estimated statistic S_hat and plug-in asymptotic variance nu_hat of
// sqrt(n) * (S_hat - S).
struct StatVar {
    double stat = 0.0;
    double variance = 0.0;
};

// Objective value and gradient at one parameter point.
struct ValueGrad {
    double value = 0.0;
    Vector grad;
};

// Outcome of a one-sided test of H0: "the first model fits at least as well".
// Rejection asserts the second model fits strictly better.
//
// In the degenerate-variance case (variance below the floor) the test cannot
// reject: threshold is +inf, p_value is 1 and `degenerate` is set.
struct TestResult {
    double stat = 0.0;       // sqrt(n) * S_hat
    double variance = 0.0;   // nu_hat
    double threshold = 0.0;  // sqrt(nu_hat) * Phi^{-1}(1 - alpha)
    double p_value = 1.0;    // 1 - Phi(stat / sqrt(nu_hat))
    bool reject = false;
    bool degenerate = false;
    double alpha = 0.0;
    Index n = 0;
};

namespace config {

// nu_hat below this floor is treated as degenerate: the normal approximation
// is unreliable and the test refuses to reject.
inline constexpr double kVarianceFloor = 1e-8;

// Regularizer in the power criterion S_hat / (gamma + sqrt(nu_hat)).
inline constexpr double kDefaultGamma = 1e-4;

// Fraction of rows used for parameter tuning in the train/test split.
inline constexpr double kDefaultTrainFraction = 0.2;

}  // namespace config

}  // namespace relfit
