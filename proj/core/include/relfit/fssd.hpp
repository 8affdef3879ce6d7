#pragma once

#include "relfit/kernel.hpp"
#include "relfit/models.hpp"
#include "relfit/types.hpp"

namespace relfit {

// Stein witness features of model q at locations W (J x d):
//   xi(z, w)      = k(z, w) * score_q(z) + grad_z k(z, w)        (in R^d)
//   Xi(z)[i, j]   = xi_i(z, w_j) / sqrt(d J)
//   tau(z)        = vec(Xi(z))   (column-major: entry (j * d + i))
// stein_feature_matrix stacks tau(z_i)' as rows (n x dJ).
Vector stein_feature(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
                     const Vector& z);
Matrix stein_feature_matrix(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
                            const Matrix& Z);

// Unbiased FSSD^2 estimate, the same paired U-statistic form as ume_sq applied
// to tau features of the sample Z.
double fssd_sq(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
               const Matrix& Z);

// S_hat = FSSD_p^2 - FSSD_q^2 on the shared sample Z, and the plug-in
// variance: with mu_s the tau_s mean and Sigma^{ss'} empirical (cross-)
// covariances over Z (1/n normalization),
//   sigma_s^2 = mu_s' Sigma^s mu_s,  sigma_pq = mu_p' Sigma^{pq} mu_q,
//   nu_hat = max(0, 4 ((sigma_p^2 + sigma_q^2) - 2 sigma_pq)).
StatVar rel_fssd_stat_and_var(const GaussianKernel& kx, const GaussianKernel& ky,
                              const DensityModel& model_p, const DensityModel& model_q,
                              const Matrix& V, const Matrix& W, const Matrix& Z);

// One-sided test of H0: FSSD_p^2 <= FSSD_q^2; rejection asserts model_q fits
// the sample better.
TestResult rel_fssd_test(const GaussianKernel& kx, const GaussianKernel& ky,
                         const DensityModel& model_p, const DensityModel& model_q, const Matrix& V,
                         const Matrix& W, const Matrix& Z, double alpha);

double fssd_power_criterion(const GaussianKernel& kx, const GaussianKernel& ky,
                            const DensityModel& model_p, const DensityModel& model_q,
                            const Matrix& V, const Matrix& W, const Matrix& Z, double gamma);

// Criterion and analytic gradient in the tuning configuration (V = W, shared
// kernel). Packing matches ume_criterion_with_grad: V row-major, log(sigma2)
// last.
ValueGrad fssd_criterion_with_grad(const Matrix& V, double sigma2, const DensityModel& model_p,
                                   const DensityModel& model_q, const Matrix& Z, double gamma);

}  // namespace relfit
