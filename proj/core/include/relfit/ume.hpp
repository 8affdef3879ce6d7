#pragma once

#include "relfit/kernel.hpp"
#include "relfit/types.hpp"

namespace relfit {

// Witness feature map psi_V(x) = (1/sqrt(J)) * (k(x, v_1), ..., k(x, v_J)).
// ume_feature_matrix stacks psi_V(x_i)' as rows (n x J).
Vector ume_feature_map(const GaussianKernel& k, const Matrix& V, const Vector& x);
Matrix ume_feature_matrix(const GaussianKernel& k, const Matrix& V, const Matrix& X);

// Unbiased estimate of UME^2(model sample Y, reference sample Z) at test
// locations V, in the paired O(n) form: with a_i = psi(y_i) - psi(z_i),
//   U2_hat = ( ||sum_i a_i||^2 - sum_i ||a_i||^2 ) / (n (n - 1)).
double ume_sq(const GaussianKernel& k, const Matrix& V, const Matrix& Y, const Matrix& Z);

// S_hat = UME^2(X, Z; V) - UME^2(Y, Z; W) and the plug-in estimate of the
// asymptotic variance nu of sqrt(n) (S_hat - S):
//   zeta_P  = a'(C_V^P + C_V^R)a,  a = psi_V mean over X - psi_V mean over Z
//   zeta_Q  = b'(C_W^Q + C_W^R)b,  b = psi_W mean over Y - psi_W mean over Z
//   zeta_PQ = a' C_VW^R b          (cross-covariance over Z)
//   nu_hat  = max(0, 4 ((zeta_P + zeta_Q) - 2 zeta_PQ))
// Covariances are empirical with 1/n normalization.
StatVar rel_ume_stat_and_var(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                             const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z);

// One-sided test of H0: UME^2(P, R) <= UME^2(Q, R) at the given locations.
// Rejection asserts the second model fits better.
TestResult rel_ume_test(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                        const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z,
                        double alpha);

// Power proxy S_hat / (gamma + sqrt(nu_hat)).
double ume_power_criterion(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                           const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z,
                           double gamma);

// Criterion and its analytic gradient in the tuning configuration (V = W,
// shared kernel). Parameter packing: V row-major (location j coordinate c at
// j * d + c), then log(sigma2) last.
ValueGrad ume_criterion_with_grad(const Matrix& V, double sigma2, const Matrix& X, const Matrix& Y,
                                  const Matrix& Z, double gamma);

}  // namespace relfit
