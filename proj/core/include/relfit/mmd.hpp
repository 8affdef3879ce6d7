#pragma once

#include "relfit/kernel.hpp"
#include "relfit/types.hpp"

namespace relfit {

// Unbiased quadratic-time MMD^2 estimate between samples A and B:
//   mean_{i != j} k(a_i, a_j) + mean_{i != j} k(b_i, b_j)
//     - 2 mean_{i, j} k(a_i, b_j).
// Gram matrices are processed in row blocks; memory stays O(block * n).
double mmd_u_sq(const GaussianKernel& k, const Matrix& A, const Matrix& B);

// S_hat = MMD_u^2(X, Z) - MMD_u^2(Y, Z) with a shared kernel, plus the plug-in
// variance of sqrt(n) (S_hat - S). With the U-statistic projections
//   g_P(i) = mu_P(x_i) + mu_R(z_i) - mu_R(x_i) - mu_P(z_i)
//   g_Q(i) = mu_Q(y_i) + mu_R(z_i) - mu_R(y_i) - mu_Q(z_i)
// (mu_S(t) = mean_j k(t, s_j), estimated by Gram row/column means),
//   nu_hat = max(0, 4 (Var g_P + Var g_Q - 2 Cov(g_P, g_Q))).
StatVar rel_mmd_stat_and_var(const GaussianKernel& k, const Matrix& X, const Matrix& Y,
                             const Matrix& Z);

// One-sided test of H0: MMD^2(P, R) <= MMD^2(Q, R); rejection asserts the
// second model is closer to the reference.
TestResult rel_mmd_test(const GaussianKernel& k, const Matrix& X, const Matrix& Y, const Matrix& Z,
                        double alpha);

}  // namespace relfit
