#include "relfit/ume.hpp"

#include "relfit/error.hpp"
#include "relfit/stats.hpp"

#include <cmath>

namespace relfit {

namespace {

void check_locations(const Matrix& V, Index dim, const char* who) {
    if (V.rows() < 1) throw input_error(std::string(who) + ": need at least one test location");
    if (V.cols() != dim) throw input_error(std::string(who) + ": location dimension mismatch");
    if (!V.allFinite()) throw input_error(std::string(who) + ": non-finite test locations");
}

void check_paired(const Matrix& A, const Matrix& B, const char* who) {
    if (A.rows() != B.rows())
        throw input_error(std::string(who) + ": samples must have equal row counts");
    if (A.rows() < 2) throw input_error(std::string(who) + ": need at least 2 rows");
    if (A.cols() != B.cols()) throw input_error(std::string(who) + ": dimension mismatch");
}

// ( ||column sums||^2 - ||D||_F^2 ) / (n (n-1)) for row-features D.
double paired_ustat(const Matrix& D) {
    const auto n = static_cast<double>(D.rows());
    const RowVector colsum = D.colwise().sum();
    return (colsum.squaredNorm() - D.squaredNorm()) / (n * (n - 1.0));
}

}  // namespace

Vector ume_feature_map(const GaussianKernel& k, const Matrix& V, const Vector& x) {
    check_locations(V, x.size(), "ume_feature_map");
    const double scale = 1.0 / std::sqrt(static_cast<double>(V.rows()));
    Vector out(V.rows());
    for (Index j = 0; j < V.rows(); ++j)
        out(j) = scale * kernel_eval(k, x, V.row(j).transpose());
    return out;
}

Matrix ume_feature_matrix(const GaussianKernel& k, const Matrix& V, const Matrix& X) {
    check_locations(V, X.cols(), "ume_feature_matrix");
    const double scale = 1.0 / std::sqrt(static_cast<double>(V.rows()));
    return scale * gram(k, X, V);
}

double ume_sq(const GaussianKernel& k, const Matrix& V, const Matrix& Y, const Matrix& Z) {
    check_paired(Y, Z, "ume_sq");
    check_locations(V, Y.cols(), "ume_sq");
    return paired_ustat(ume_feature_matrix(k, V, Y) - ume_feature_matrix(k, V, Z));
}

namespace {

struct RelUmeParts {
    double stat;
    double zeta_p, zeta_q, zeta_pq;

    double variance() const { return std::max(0.0, 4.0 * ((zeta_p + zeta_q) - 2.0 * zeta_pq)); }
};

// Variance terms in projected form: zeta_P = Var_X(psi'a) + Var_Z(psi'a) etc.,
// never forming J x J covariances.
RelUmeParts rel_ume_parts(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                          const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z) {
    check_paired(X, Z, "rel_ume");
    check_paired(Y, Z, "rel_ume");
    const auto n = static_cast<double>(Z.rows());

    const Matrix px = ume_feature_matrix(kx, V, X);
    const Matrix pzv = ume_feature_matrix(kx, V, Z);
    const Matrix py = ume_feature_matrix(ky, W, Y);
    const Matrix pzw = ume_feature_matrix(ky, W, Z);

    RelUmeParts parts{};
    parts.stat = paired_ustat(px - pzv) - paired_ustat(py - pzw);

    const Vector a = (px.colwise().mean() - pzv.colwise().mean()).transpose();
    const Vector b = (py.colwise().mean() - pzw.colwise().mean()).transpose();

    Vector u = px * a;
    Vector r = pzv * a;
    Vector s = py * b;
    Vector t = pzw * b;
    u.array() -= u.mean();
    r.array() -= r.mean();
    s.array() -= s.mean();
    t.array() -= t.mean();

    parts.zeta_p = (u.squaredNorm() + r.squaredNorm()) / n;
    parts.zeta_q = (s.squaredNorm() + t.squaredNorm()) / n;
    parts.zeta_pq = r.dot(t) / n;
    return parts;
}

}  // namespace

StatVar rel_ume_stat_and_var(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                             const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z) {
    const RelUmeParts parts = rel_ume_parts(kx, ky, V, W, X, Y, Z);
    return {parts.stat, parts.variance()};
}

TestResult rel_ume_test(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                        const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z,
                        double alpha) {
    const StatVar sv = rel_ume_stat_and_var(kx, ky, V, W, X, Y, Z);
    return one_sided_normal_test(sv.stat, sv.variance, Z.rows(), alpha);
}

double ume_power_criterion(const GaussianKernel& kx, const GaussianKernel& ky, const Matrix& V,
                           const Matrix& W, const Matrix& X, const Matrix& Y, const Matrix& Z,
                           double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw input_error("ume_power_criterion: gamma must be finite and >= 0");
    const StatVar sv = rel_ume_stat_and_var(kx, ky, V, W, X, Y, Z);
    return sv.stat / (gamma + std::sqrt(sv.variance));
}

// ---------------------------------------------------------------------------
// Criterion gradient (V = W, shared kernel)
// ---------------------------------------------------------------------------

ValueGrad ume_criterion_with_grad(const Matrix& V, double sigma2, const Matrix& X, const Matrix& Y,
                                  const Matrix& Z, double gamma) {
    const GaussianKernel kernel(sigma2);
    check_paired(X, Z, "ume_criterion_with_grad");
    check_paired(Y, Z, "ume_criterion_with_grad");
    check_locations(V, X.cols(), "ume_criterion_with_grad");
    if (!(gamma >= 0.0)) throw input_error("ume_criterion_with_grad: invalid gamma");

    const Index n = Z.rows();
    const Index d = V.cols();
    const Index J = V.rows();
    const double nn = static_cast<double>(n);
    const double upair = nn * (nn - 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(J));

    const Matrix dx2 = sq_distances(X, V);
    const Matrix dy2 = sq_distances(Y, V);
    const Matrix dz2 = sq_distances(Z, V);
    const Matrix kx_m = (dx2 / (-2.0 * sigma2)).array().exp().matrix();
    const Matrix ky_m = (dy2 / (-2.0 * sigma2)).array().exp().matrix();
    const Matrix kz_m = (dz2 / (-2.0 * sigma2)).array().exp().matrix();
    const Matrix px = scale * kx_m;
    const Matrix py = scale * ky_m;
    const Matrix pz = scale * kz_m;

    const Matrix dP = px - pz;
    const Matrix dQ = py - pz;
    const RowVector sum_p = dP.colwise().sum();
    const RowVector sum_q = dQ.colwise().sum();
    const double s_p = (sum_p.squaredNorm() - dP.squaredNorm()) / upair;
    const double s_q = (sum_q.squaredNorm() - dQ.squaredNorm()) / upair;
    const double stat = s_p - s_q;

    const Vector a = sum_p.transpose() / nn;
    const Vector b = sum_q.transpose() / nn;
    Vector u = px * a;
    Vector r = pz * a;
    Vector s = py * b;
    Vector t = pz * b;
    const double u_mean = u.mean(), r_mean = r.mean(), s_mean = s.mean(), t_mean = t.mean();
    u.array() -= u_mean;
    r.array() -= r_mean;
    s.array() -= s_mean;
    t.array() -= t_mean;
    const double zeta_p = (u.squaredNorm() + r.squaredNorm()) / nn;
    const double zeta_q = (s.squaredNorm() + t.squaredNorm()) / nn;
    const double zeta_pq = r.dot(t) / nn;
    const double nu = std::max(0.0, 4.0 * ((zeta_p + zeta_q) - 2.0 * zeta_pq));

    const double sqrt_nu = std::sqrt(nu);
    const double denom = gamma + sqrt_nu;
    const bool flat_nu = nu < config::kVarianceFloor;  // treat sqrt(nu) as locally flat

    ValueGrad out;
    out.value = stat / denom;
    out.grad.resize(J * d + 1);

    // Chain from (dS, du, dr, ds, dt) to the criterion derivative.
    const auto chain = [&](double d_stat, const Vector& du, const Vector& dr, const Vector& ds,
                           const Vector& dt) -> double {
        const double dz_p = 2.0 * (u.dot(du) + r.dot(dr)) / nn;
        const double dz_q = 2.0 * (s.dot(ds) + t.dot(dt)) / nn;
        const double dz_pq = (r.dot(dt) + t.dot(dr)) / nn;
        const double d_nu = 4.0 * ((dz_p + dz_q) - 2.0 * dz_pq);
        const double d_sqrt_nu = flat_nu ? 0.0 : d_nu / (2.0 * sqrt_nu);
        return (d_stat * denom - stat * d_sqrt_nu) / (denom * denom);
    };

    // Location coordinates: the perturbation touches one feature column.
    for (Index j = 0; j < J; ++j) {
        const Vector px_j = px.col(j);
        const Vector py_j = py.col(j);
        const Vector pz_j = pz.col(j);
        for (Index c = 0; c < d; ++c) {
            // d psi_j(x) / d v_{jc} = psi_j(x) * (x_c - v_{jc}) / sigma2
            const Vector gx = px_j.cwiseProduct((X.col(c).array() - V(j, c)).matrix()) / sigma2;
            const Vector gy = py_j.cwiseProduct((Y.col(c).array() - V(j, c)).matrix()) / sigma2;
            const Vector gz = pz_j.cwiseProduct((Z.col(c).array() - V(j, c)).matrix()) / sigma2;
            const Vector dgP = gx - gz;
            const Vector dgQ = gy - gz;
            const double d_sp = 2.0 * (sum_p(j) * dgP.sum() - dP.col(j).dot(dgP)) / upair;
            const double d_sq = 2.0 * (sum_q(j) * dgQ.sum() - dQ.col(j).dot(dgQ)) / upair;
            const double da_j = dgP.mean();
            const double db_j = dgQ.mean();
            const Vector du = gx * a(j) + px_j * da_j;
            const Vector dr = gz * a(j) + pz_j * da_j;
            const Vector ds = gy * b(j) + py_j * db_j;
            const Vector dt = gz * b(j) + pz_j * db_j;
            out.grad(j * d + c) = chain(d_sp - d_sq, du, dr, ds, dt);
        }
    }

    // log(sigma2): d k / d log(sigma2) = k * ||x - v||^2 / (2 sigma2).
    {
        const Matrix gx = px.cwiseProduct(dx2) / (2.0 * sigma2);
        const Matrix gy = py.cwiseProduct(dy2) / (2.0 * sigma2);
        const Matrix gz = pz.cwiseProduct(dz2) / (2.0 * sigma2);
        const Matrix dgP = gx - gz;
        const Matrix dgQ = gy - gz;
        const RowVector dsum_p = dgP.colwise().sum();
        const RowVector dsum_q = dgQ.colwise().sum();
        const double d_sp =
            2.0 * (sum_p.dot(dsum_p) - dP.cwiseProduct(dgP).sum()) / upair;
        const double d_sq =
            2.0 * (sum_q.dot(dsum_q) - dQ.cwiseProduct(dgQ).sum()) / upair;
        const Vector da = dsum_p.transpose() / nn;
        const Vector db = dsum_q.transpose() / nn;
        const Vector du = gx * a + px * da;
        const Vector dr = gz * a + pz * da;
        const Vector ds = gy * b + py * db;
        const Vector dt = gz * b + pz * db;
        out.grad(J * d) = chain(d_sp - d_sq, du, dr, ds, dt);
    }

    return out;
}

}  // namespace relfit
