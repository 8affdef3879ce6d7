#include "relfit/kernel.hpp"

#include "relfit/error.hpp"
#include "relfit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "relfit/stats.hpp"

namespace relfit {

GaussianKernel::GaussianKernel(double sigma2_in) : sigma2(sigma2_in) {
    if (!std::isfinite(sigma2) || sigma2 <= 0.0)
        throw input_error("GaussianKernel: sigma2 must be finite and positive");
}

double kernel_eval(const GaussianKernel& k, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw input_error("kernel_eval: dimension mismatch");
    return std::exp(-(x - y).squaredNorm() / (2.0 * k.sigma2));
}

Vector kernel_grad_x(const GaussianKernel& k, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw input_error("kernel_grad_x: dimension mismatch");
    return kernel_eval(k, x, y) * (y - x) / k.sigma2;
}

Matrix sq_distances(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols()) throw input_error("sq_distances: dimension mismatch");
    const Vector a2 = A.rowwise().squaredNorm();
    const Vector b2 = B.rowwise().squaredNorm();
    Matrix d = (-2.0 * A * B.transpose());
    d.colwise() += a2;
    d.rowwise() += b2.transpose();
    return d.cwiseMax(0.0);
}

Matrix gram(const GaussianKernel& k, const Matrix& A, const Matrix& B) {
    return (sq_distances(A, B) / (-2.0 * k.sigma2)).array().exp().matrix();
}

namespace {

double median_of_pair_distances(const Matrix& sample, bool* zero_median_warning) {
    const Index n = sample.rows();
    if (n < 2) throw input_error("median_heuristic: need at least 2 rows");
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    bool any_nonzero = false;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double d = (sample.row(i) - sample.row(j)).norm();
            any_nonzero = any_nonzero || d > 0.0;
            dists.push_back(d);
        }
    }
    if (!any_nonzero)
        throw degenerate_sample_error("median_heuristic: all pairwise distances are zero");
    const double med = median_of(std::move(dists));
    if (zero_median_warning != nullptr) *zero_median_warning = (med == 0.0);
    return med;
}

}  // namespace

double median_heuristic(const Matrix& sample, bool* zero_median_warning) {
    return median_of_pair_distances(sample, zero_median_warning);
}

double median_heuristic_subsampled(const Matrix& sample, Index max_rows, std::uint64_t seed,
                                   bool* zero_median_warning) {
    if (max_rows < 2) throw input_error("median_heuristic_subsampled: max_rows must be >= 2");
    if (sample.rows() <= max_rows) return median_of_pair_distances(sample, zero_median_warning);
    std::vector<Index> idx(static_cast<std::size_t>(sample.rows()));
    std::iota(idx.begin(), idx.end(), Index{0});
    Rng rng = make_rng(derive_seed(seed, /*stream=*/0x6d65646eULL));
    std::shuffle(idx.begin(), idx.end(), rng);
    Matrix subset(max_rows, sample.cols());
    for (Index i = 0; i < max_rows; ++i) subset.row(i) = sample.row(idx[static_cast<std::size_t>(i)]);
    return median_of_pair_distances(subset, zero_median_warning);
}

namespace {

double bandwidth_from_medians(double med_xz, double med_yz) {
    const double mean_med = 0.5 * (med_xz + med_yz);
    if (mean_med <= 0.0)
        throw degenerate_sample_error("init_bandwidth: zero medians; samples are degenerate");
    return mean_med * mean_med;
}

Matrix vstack_pair(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() + B.rows(), A.cols());
    out << A, B;
    return out;
}

}  // namespace

double init_bandwidth(const Matrix& X, const Matrix& Y, const Matrix& Z) {
    if (X.cols() != Z.cols() || Y.cols() != Z.cols())
        throw input_error("init_bandwidth: dimension mismatch");
    return bandwidth_from_medians(median_heuristic(vstack_pair(X, Z)),
                                  median_heuristic(vstack_pair(Y, Z)));
}

double init_bandwidth_subsampled(const Matrix& X, const Matrix& Y, const Matrix& Z,
                                 Index max_rows, std::uint64_t seed) {
    if (X.cols() != Z.cols() || Y.cols() != Z.cols())
        throw input_error("init_bandwidth_subsampled: dimension mismatch");
    const double med_xz =
        median_heuristic_subsampled(vstack_pair(X, Z), max_rows, derive_seed(seed, 0, 0));
    const double med_yz =
        median_heuristic_subsampled(vstack_pair(Y, Z), max_rows, derive_seed(seed, 0, 1));
    return bandwidth_from_medians(med_xz, med_yz);
}

}  // namespace relfit
