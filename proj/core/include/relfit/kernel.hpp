#pragma once

#include "relfit/types.hpp"

#include <cstdint>

namespace relfit {

// Gaussian kernel k(x, y) = exp(-||x - y||^2 / (2 * sigma2)).
struct GaussianKernel {
    double sigma2;
    explicit GaussianKernel(double sigma2_in);
};

double kernel_eval(const GaussianKernel& k, const Vector& x, const Vector& y);

// Gradient with respect to the first argument:
// grad_x k(x, y) = k(x, y) * (y - x) / sigma2.
Vector kernel_grad_x(const GaussianKernel& k, const Vector& x, const Vector& y);

// Pairwise squared distances between rows of A (m x d) and rows of B (p x d),
// clamped at zero against cancellation. Result is m x p.
Matrix sq_distances(const Matrix& A, const Matrix& B);

// Gram matrix k(A_i, B_j), m x p.
Matrix gram(const GaussianKernel& k, const Matrix& A, const Matrix& B);

// Median of pairwise Euclidean distances over distinct row pairs (i < j,
// diagonal excluded). All-zero distances raise degenerate_sample_error; a zero
// median with some nonzero distances sets *zero_median_warning instead.
double median_heuristic(const Matrix& sample, bool* zero_median_warning = nullptr);

// Same heuristic computed on a seeded row subsample when the input exceeds
// max_rows; the exact quadratic scan is unreasonable for very large samples.
double median_heuristic_subsampled(const Matrix& sample, Index max_rows, std::uint64_t seed,
                                   bool* zero_median_warning = nullptr);

// Initial squared bandwidth for test-location optimization:
// ((med_{X union Z} + med_{Y union Z}) / 2)^2.
double init_bandwidth(const Matrix& X, const Matrix& Y, const Matrix& Z);

// init_bandwidth with each union stack capped at max_rows via a seeded
// subsample, keeping the bandwidth step linear-time for large samples.
double init_bandwidth_subsampled(const Matrix& X, const Matrix& Y, const Matrix& Z,
                                 Index max_rows, std::uint64_t seed);

}  // namespace relfit
