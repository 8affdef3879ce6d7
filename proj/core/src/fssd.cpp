#include "relfit/fssd.hpp"

#include "relfit/error.hpp"
#include "relfit/stats.hpp"

#include <cmath>

namespace relfit {

namespace {

void check_inputs(const DensityModel& model, const Matrix& W, const Matrix& Z, const char* who) {
    if (Z.rows() < 2) throw input_error(std::string(who) + ": need at least 2 rows");
    if (Z.cols() != model.dim()) throw input_error(std::string(who) + ": model dimension mismatch");
    if (W.rows() < 1) throw input_error(std::string(who) + ": need at least one test location");
    if (W.cols() != Z.cols()) throw input_error(std::string(who) + ": location dimension mismatch");
    if (!W.allFinite()) throw input_error(std::string(who) + ": non-finite test locations");
}

double paired_ustat(const Matrix& D) {
    const auto n = static_cast<double>(D.rows());
    const RowVector colsum = D.colwise().sum();
    return (colsum.squaredNorm() - D.squaredNorm()) / (n * (n - 1.0));
}

// tau block for location j: K.col(j) .* (score(Z) + (w_j - z) / sigma2),
// scaled by 1/sqrt(dJ).
Matrix tau_matrix(const GaussianKernel& k, const Matrix& scores, const Matrix& W, const Matrix& Z,
                  const Matrix& K) {
    const Index n = Z.rows();
    const Index d = Z.cols();
    const Index J = W.rows();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d * J));
    const Matrix base = scores - Z / k.sigma2;  // score(z) - z / sigma2
    Matrix tau(n, d * J);
    for (Index j = 0; j < J; ++j) {
        tau.middleCols(j * d, d) =
            scale * ((base.rowwise() + W.row(j) / k.sigma2).array().colwise() *
                     K.col(j).array())
                        .matrix();
    }
    return tau;
}

}  // namespace

Matrix stein_feature_matrix(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
                            const Matrix& Z) {
    check_inputs(model, W, Z, "stein_feature_matrix");
    return tau_matrix(k, model.score(Z), W, Z, gram(k, Z, W));
}

Vector stein_feature(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
                     const Vector& z) {
    if (z.size() != model.dim()) throw input_error("stein_feature: dimension mismatch");
    // Single-row variant of the matrix path (bypasses the n >= 2 requirement).
    const Matrix Z = z.transpose();
    return tau_matrix(k, model.score(Z), W, Z, gram(k, Z, W)).row(0).transpose();
}

double fssd_sq(const GaussianKernel& k, const DensityModel& model, const Matrix& W,
               const Matrix& Z) {
    check_inputs(model, W, Z, "fssd_sq");
    return paired_ustat(stein_feature_matrix(k, model, W, Z));
}

namespace {

struct RelFssdParts {
    double stat;
    double sigma_p, sigma_q, sigma_pq;

    double variance() const {
        return std::max(0.0, 4.0 * ((sigma_p + sigma_q) - 2.0 * sigma_pq));
    }
};

RelFssdParts rel_fssd_parts(const GaussianKernel& kx, const GaussianKernel& ky,
                            const DensityModel& model_p, const DensityModel& model_q,
                            const Matrix& V, const Matrix& W, const Matrix& Z) {
    check_inputs(model_p, V, Z, "rel_fssd");
    check_inputs(model_q, W, Z, "rel_fssd");
    const auto n = static_cast<double>(Z.rows());

    const Matrix tau_p = stein_feature_matrix(kx, model_p, V, Z);
    const Matrix tau_q = stein_feature_matrix(ky, model_q, W, Z);

    RelFssdParts parts{};
    parts.stat = paired_ustat(tau_p) - paired_ustat(tau_q);

    const Vector mu_p = tau_p.colwise().mean().transpose();
    const Vector mu_q = tau_q.colwise().mean().transpose();
    Vector up = tau_p * mu_p;
    Vector uq = tau_q * mu_q;
    up.array() -= up.mean();
    uq.array() -= uq.mean();
    parts.sigma_p = up.squaredNorm() / n;
    parts.sigma_q = uq.squaredNorm() / n;
    parts.sigma_pq = up.dot(uq) / n;
    return parts;
}

}  // namespace

StatVar rel_fssd_stat_and_var(const GaussianKernel& kx, const GaussianKernel& ky,
                              const DensityModel& model_p, const DensityModel& model_q,
                              const Matrix& V, const Matrix& W, const Matrix& Z) {
    const RelFssdParts parts = rel_fssd_parts(kx, ky, model_p, model_q, V, W, Z);
    return {parts.stat, parts.variance()};
}

TestResult rel_fssd_test(const GaussianKernel& kx, const GaussianKernel& ky,
                         const DensityModel& model_p, const DensityModel& model_q, const Matrix& V,
                         const Matrix& W, const Matrix& Z, double alpha) {
    const StatVar sv = rel_fssd_stat_and_var(kx, ky, model_p, model_q, V, W, Z);
    return one_sided_normal_test(sv.stat, sv.variance, Z.rows(), alpha);
}

double fssd_power_criterion(const GaussianKernel& kx, const GaussianKernel& ky,
                            const DensityModel& model_p, const DensityModel& model_q,
                            const Matrix& V, const Matrix& W, const Matrix& Z, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw input_error("fssd_power_criterion: gamma must be finite and >= 0");
    const StatVar sv = rel_fssd_stat_and_var(kx, ky, model_p, model_q, V, W, Z);
    return sv.stat / (gamma + std::sqrt(sv.variance));
}

// ---------------------------------------------------------------------------
// Criterion gradient (V = W, shared kernel)
// ---------------------------------------------------------------------------

ValueGrad fssd_criterion_with_grad(const Matrix& V, double sigma2, const DensityModel& model_p,
                                   const DensityModel& model_q, const Matrix& Z, double gamma) {
    const GaussianKernel kernel(sigma2);
    check_inputs(model_p, V, Z, "fssd_criterion_with_grad");
    check_inputs(model_q, V, Z, "fssd_criterion_with_grad");
    if (!(gamma >= 0.0)) throw input_error("fssd_criterion_with_grad: invalid gamma");

    const Index n = Z.rows();
    const Index d = Z.cols();
    const Index J = V.rows();
    const double nn = static_cast<double>(n);
    const double upair = nn * (nn - 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d * J));

    const Matrix d2 = sq_distances(Z, V);
    const Matrix K = (d2 / (-2.0 * sigma2)).array().exp().matrix();
    const Matrix scores_p = model_p.score(Z);
    const Matrix scores_q = model_q.score(Z);
    const Matrix base_p = scores_p - Z / sigma2;
    const Matrix base_q = scores_q - Z / sigma2;

    Matrix tau_p(n, d * J), tau_q(n, d * J);
    for (Index j = 0; j < J; ++j) {
        const auto kj = K.col(j).array();
        tau_p.middleCols(j * d, d) =
            scale * ((base_p.rowwise() + V.row(j) / sigma2).array().colwise() * kj).matrix();
        tau_q.middleCols(j * d, d) =
            scale * ((base_q.rowwise() + V.row(j) / sigma2).array().colwise() * kj).matrix();
    }

    const RowVector sum_p = tau_p.colwise().sum();
    const RowVector sum_q = tau_q.colwise().sum();
    const double f_p = (sum_p.squaredNorm() - tau_p.squaredNorm()) / upair;
    const double f_q = (sum_q.squaredNorm() - tau_q.squaredNorm()) / upair;
    const double stat = f_p - f_q;

    const Vector mu_p = sum_p.transpose() / nn;
    const Vector mu_q = sum_q.transpose() / nn;
    Vector up = tau_p * mu_p;
    Vector uq = tau_q * mu_q;
    up.array() -= up.mean();
    uq.array() -= uq.mean();
    const double sig_p = up.squaredNorm() / nn;
    const double sig_q = uq.squaredNorm() / nn;
    const double sig_pq = up.dot(uq) / nn;
    const double nu = std::max(0.0, 4.0 * ((sig_p + sig_q) - 2.0 * sig_pq));

    const double sqrt_nu = std::sqrt(nu);
    const double denom = gamma + sqrt_nu;
    const bool flat_nu = nu < config::kVarianceFloor;

    ValueGrad out;
    out.value = stat / denom;
    out.grad.resize(J * d + 1);

    const auto chain = [&](double d_stat, const Vector& dup, const Vector& duq) -> double {
        const double dsig_p = 2.0 * up.dot(dup) / nn;
        const double dsig_q = 2.0 * uq.dot(duq) / nn;
        const double dsig_pq = (up.dot(duq) + uq.dot(dup)) / nn;
        const double d_nu = 4.0 * ((dsig_p + dsig_q) - 2.0 * dsig_pq);
        const double d_sqrt_nu = flat_nu ? 0.0 : d_nu / (2.0 * sqrt_nu);
        return (d_stat * denom - stat * d_sqrt_nu) / (denom * denom);
    };

    // Per-location-coordinate derivative: only block j of tau moves.
    for (Index j = 0; j < J; ++j) {
        const Matrix tp_j = tau_p.middleCols(j * d, d);
        const Matrix tq_j = tau_q.middleCols(j * d, d);
        const Matrix bp_j = base_p.rowwise() + V.row(j) / sigma2;
        const Matrix bq_j = base_q.rowwise() + V.row(j) / sigma2;
        const Vector mu_p_j = mu_p.segment(j * d, d);
        const Vector mu_q_j = mu_q.segment(j * d, d);
        const RowVector sum_p_j = sum_p.segment(j * d, d);
        const RowVector sum_q_j = sum_q.segment(j * d, d);
        for (Index c = 0; c < d; ++c) {
            // dK.col(j)/dv_{jc} = K.col(j) .* (z_c - v_{jc}) / sigma2
            const Vector gk = K.col(j).cwiseProduct((Z.col(c).array() - V(j, c)).matrix()) / sigma2;
            // d tau block = scale * (gk .* b_j + K.col(j)/sigma2 * e_c)
            Matrix dtp = scale * (bp_j.array().colwise() * gk.array()).matrix();
            Matrix dtq = scale * (bq_j.array().colwise() * gk.array()).matrix();
            dtp.col(c) += (scale / sigma2) * K.col(j);
            dtq.col(c) += (scale / sigma2) * K.col(j);

            const RowVector dsum_p = dtp.colwise().sum();
            const RowVector dsum_q = dtq.colwise().sum();
            const double d_fp =
                2.0 * (sum_p_j.dot(dsum_p) - tp_j.cwiseProduct(dtp).sum()) / upair;
            const double d_fq =
                2.0 * (sum_q_j.dot(dsum_q) - tq_j.cwiseProduct(dtq).sum()) / upair;

            const Vector dmu_p = dsum_p.transpose() / nn;
            const Vector dmu_q = dsum_q.transpose() / nn;
            const Vector dup = dtp * mu_p_j + tp_j * dmu_p;
            const Vector duq = dtq * mu_q_j + tq_j * dmu_q;
            out.grad(j * d + c) = chain(d_fp - d_fq, dup, duq);
        }
    }

    // log(sigma2) derivative: every block moves.
    {
        Matrix dtp(n, d * J), dtq(n, d * J);
        const Matrix kd = K.cwiseProduct(d2) / (2.0 * sigma2);  // dK/dlog(sigma2)
        for (Index j = 0; j < J; ++j) {
            const Matrix bp_j = base_p.rowwise() + V.row(j) / sigma2;
            const Matrix bq_j = base_q.rowwise() + V.row(j) / sigma2;
            // d base/dlog(sigma2) = z/sigma2; d (v_j/sigma2)/dlog(sigma2) = -v_j/sigma2
            const Matrix db_j = (Z.rowwise() - V.row(j)) / sigma2;
            dtp.middleCols(j * d, d) =
                scale * ((bp_j.array().colwise() * kd.col(j).array()) +
                         (db_j.array().colwise() * K.col(j).array()))
                            .matrix();
            dtq.middleCols(j * d, d) =
                scale * ((bq_j.array().colwise() * kd.col(j).array()) +
                         (db_j.array().colwise() * K.col(j).array()))
                            .matrix();
        }
        const RowVector dsum_p = dtp.colwise().sum();
        const RowVector dsum_q = dtq.colwise().sum();
        const double d_fp = 2.0 * (sum_p.dot(dsum_p) - tau_p.cwiseProduct(dtp).sum()) / upair;
        const double d_fq = 2.0 * (sum_q.dot(dsum_q) - tau_q.cwiseProduct(dtq).sum()) / upair;
        const Vector dmu_p = dsum_p.transpose() / nn;
        const Vector dmu_q = dsum_q.transpose() / nn;
        const Vector dup = dtp * mu_p + tau_p * dmu_p;
        const Vector duq = dtq * mu_q + tau_q * dmu_q;
        out.grad(J * d) = chain(d_fp - d_fq, dup, duq);
    }

    return out;
}

}  // namespace relfit
