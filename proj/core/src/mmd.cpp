#include "relfit/mmd.hpp"

#include "relfit/error.hpp"
#include "relfit/stats.hpp"

#include <algorithm>
#include <cmath>

namespace relfit {

namespace {

constexpr Index kBlockRows = 384;

// Kernel sums between A and B computed over row blocks of A so that only an
// O(block * rows(B)) slice of the Gram matrix is ever materialized.
struct CrossSums {
    double total = 0.0;
    Vector row_mean;  // row_mean(i) = mean_j k(a_i, b_j)
    Vector col_mean;  // col_mean(j) = mean_i k(a_i, b_j)
};

CrossSums cross_sums(const GaussianKernel& k, const Matrix& A, const Matrix& B) {
    const Index na = A.rows();
    const Index nb = B.rows();
    CrossSums out;
    out.row_mean = Vector::Zero(na);
    out.col_mean = Vector::Zero(nb);
    const Vector b_sq = B.rowwise().squaredNorm();
    const double inv = -0.5 / k.sigma2;
    for (Index start = 0; start < na; start += kBlockRows) {
        const Index rows = std::min<Index>(kBlockRows, na - start);
        const Matrix Ablk = A.middleRows(start, rows);
        Matrix d2 = -2.0 * (Ablk * B.transpose());
        d2.colwise() += Ablk.rowwise().squaredNorm();
        d2.rowwise() += b_sq.transpose();
        const Matrix kblk = (d2.cwiseMax(0.0) * inv).array().exp().matrix();
        out.row_mean.segment(start, rows) = kblk.rowwise().sum() / static_cast<double>(nb);
        out.col_mean += kblk.colwise().sum().transpose();
    }
    out.total = out.col_mean.sum();
    out.col_mean /= static_cast<double>(na);
    return out;
}

void check_pair(const Matrix& A, const Matrix& B, const char* who) {
    if (A.rows() < 2 || B.rows() < 2)
        throw input_error(std::string(who) + ": need at least 2 rows per sample");
    if (A.cols() != B.cols()) throw input_error(std::string(who) + ": dimension mismatch");
}

// Unbiased within-sample mean of off-diagonal kernel values; the Gaussian
// kernel has k(x, x) = 1, so the diagonal contributes exactly rows(A).
double within_mean(const CrossSums& sums, Index n) {
    const auto nd = static_cast<double>(n);
    return (sums.total - nd) / (nd * (nd - 1.0));
}

}  // namespace

double mmd_u_sq(const GaussianKernel& k, const Matrix& A, const Matrix& B) {
    check_pair(A, B, "mmd_u_sq");
    const auto na = static_cast<double>(A.rows());
    const auto nb = static_cast<double>(B.rows());
    return within_mean(cross_sums(k, A, A), A.rows()) +
           within_mean(cross_sums(k, B, B), B.rows()) -
           2.0 * cross_sums(k, A, B).total / (na * nb);
}

StatVar rel_mmd_stat_and_var(const GaussianKernel& k, const Matrix& X, const Matrix& Y,
                             const Matrix& Z) {
    const Index n = Z.rows();
    if (X.rows() != n || Y.rows() != n)
        throw input_error("rel_mmd_stat_and_var: samples must have equal row counts");
    check_pair(X, Z, "rel_mmd_stat_and_var");
    check_pair(Y, Z, "rel_mmd_stat_and_var");

    const CrossSums xx = cross_sums(k, X, X);
    const CrossSums yy = cross_sums(k, Y, Y);
    const CrossSums zz = cross_sums(k, Z, Z);
    const CrossSums xz = cross_sums(k, X, Z);
    const CrossSums yz = cross_sums(k, Y, Z);

    const auto nd = static_cast<double>(n);
    const double mmd_xz =
        within_mean(xx, n) + within_mean(zz, n) - 2.0 * xz.total / (nd * nd);
    const double mmd_yz =
        within_mean(yy, n) + within_mean(zz, n) - 2.0 * yz.total / (nd * nd);

    // First-order projections of each MMD^2 estimate onto single observations;
    // their empirical (co)variances give the plug-in variance of the stat.
    Vector gp = xx.row_mean + zz.row_mean - xz.row_mean - xz.col_mean;
    Vector gq = yy.row_mean + zz.row_mean - yz.row_mean - yz.col_mean;
    gp.array() -= gp.mean();
    gq.array() -= gq.mean();
    const double zeta_p = gp.squaredNorm() / nd;
    const double zeta_q = gq.squaredNorm() / nd;
    const double zeta_pq = gp.dot(gq) / nd;

    StatVar out;
    out.stat = mmd_xz - mmd_yz;
    out.variance = std::max(0.0, 4.0 * ((zeta_p + zeta_q) - 2.0 * zeta_pq));
    return out;
}

TestResult rel_mmd_test(const GaussianKernel& k, const Matrix& X, const Matrix& Y, const Matrix& Z,
                        double alpha) {
    const StatVar sv = rel_mmd_stat_and_var(k, X, Y, Z);
    return one_sided_normal_test(sv.stat, sv.variance, Z.rows(), alpha);
}

}  // namespace relfit
