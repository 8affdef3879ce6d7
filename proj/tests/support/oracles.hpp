// Independent brute-force implementations used as test oracles. Everything
// here favors the most literal formula over efficiency: explicit double sums
// over pairs, explicit covariance loops, latent-state enumeration, central
// finite differences. Nothing in this header calls the optimized paths it is
// used to check.
#pragma once

#include "relfit/models.hpp"
#include "relfit/types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace reference {

using relfit::Index;
using relfit::Matrix;
using relfit::StatVar;
using relfit::Vector;

inline double gauss(double sigma2, const Vector& a, const Vector& b) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * sigma2));
}

// psi_V(x) = (1/sqrt(J)) (k(x, v_1), ..., k(x, v_J))
inline Vector ume_feature(double sigma2, const Matrix& V, const Vector& x) {
    const Index J = V.rows();
    Vector psi(J);
    for (Index j = 0; j < J; ++j) psi(j) = gauss(sigma2, x, V.row(j).transpose());
    return psi / std::sqrt(static_cast<double>(J));
}

// Paired-difference U-statistic over explicit (i, j) pairs.
inline double paired_ustat(const std::vector<Vector>& a) {
    const Index n = static_cast<Index>(a.size());
    double acc = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j) acc += a[static_cast<std::size_t>(i)].dot(a[static_cast<std::size_t>(j)]);
    return acc / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double ume_sq(double sigma2, const Matrix& V, const Matrix& Y, const Matrix& Z) {
    const Index n = Y.rows();
    std::vector<Vector> a;
    a.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        a.push_back(ume_feature(sigma2, V, Y.row(i).transpose()) -
                    ume_feature(sigma2, V, Z.row(i).transpose()));
    return paired_ustat(a);
}

// tau(z): Stein feature vector, entry (j * d + i) = xi_i(z, w_j) / sqrt(d J)
// with xi(z, w) = k(z, w) score(z) + grad_z k(z, w).
inline Vector stein_tau(double sigma2, const relfit::DensityModel& model, const Matrix& W,
                        const Vector& z) {
    const Index J = W.rows();
    const Index d = W.cols();
    const Vector s = model.score_at(z);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d * J));
    Vector tau(d * J);
    for (Index j = 0; j < J; ++j) {
        const Vector w = W.row(j).transpose();
        const double kv = gauss(sigma2, z, w);
        for (Index i = 0; i < d; ++i)
            tau(j * d + i) = scale * (kv * s(i) + kv * (w(i) - z(i)) / sigma2);
    }
    return tau;
}

inline double fssd_sq(double sigma2, const relfit::DensityModel& model, const Matrix& W,
                      const Matrix& Z) {
    const Index n = Z.rows();
    std::vector<Vector> tau;
    tau.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) tau.push_back(stein_tau(sigma2, model, W, Z.row(i).transpose()));
    return paired_ustat(tau);
}

inline double mmd_u_sq(double sigma2, const Matrix& A, const Matrix& B) {
    const Index na = A.rows();
    const Index nb = B.rows();
    double within_a = 0.0, within_b = 0.0, cross = 0.0;
    for (Index i = 0; i < na; ++i)
        for (Index j = 0; j < na; ++j)
            if (i != j) within_a += gauss(sigma2, A.row(i).transpose(), A.row(j).transpose());
    for (Index i = 0; i < nb; ++i)
        for (Index j = 0; j < nb; ++j)
            if (i != j) within_b += gauss(sigma2, B.row(i).transpose(), B.row(j).transpose());
    for (Index i = 0; i < na; ++i)
        for (Index j = 0; j < nb; ++j)
            cross += gauss(sigma2, A.row(i).transpose(), B.row(j).transpose());
    within_a /= static_cast<double>(na) * static_cast<double>(na - 1);
    within_b /= static_cast<double>(nb) * static_cast<double>(nb - 1);
    cross /= static_cast<double>(na) * static_cast<double>(nb);
    return within_a + within_b - 2.0 * cross;
}

// Empirical covariance with 1/n normalization, explicit outer-product loop.
inline Matrix covariance(const std::vector<Vector>& rows) {
    const Index n = static_cast<Index>(rows.size());
    const Index d = rows.front().size();
    Vector mean = Vector::Zero(d);
    for (const Vector& r : rows) mean += r;
    mean /= static_cast<double>(n);
    Matrix cov = Matrix::Zero(d, d);
    for (const Vector& r : rows) cov += (r - mean) * (r - mean).transpose();
    return cov / static_cast<double>(n);
}

inline Matrix cross_covariance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    const Index n = static_cast<Index>(a.size());
    Vector mean_a = Vector::Zero(a.front().size());
    Vector mean_b = Vector::Zero(b.front().size());
    for (Index i = 0; i < n; ++i) {
        mean_a += a[static_cast<std::size_t>(i)];
        mean_b += b[static_cast<std::size_t>(i)];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    Matrix cov = Matrix::Zero(mean_a.size(), mean_b.size());
    for (Index i = 0; i < n; ++i)
        cov += (a[static_cast<std::size_t>(i)] - mean_a) *
               (b[static_cast<std::size_t>(i)] - mean_b).transpose();
    return cov / static_cast<double>(n);
}

// Relative location-difference statistic with the covariance-form variance:
//   zeta_P  = a' (Cov_X psi_V + Cov_Z psi_V) a
//   zeta_Q  = b' (Cov_Y psi_W + Cov_Z psi_W) b
//   zeta_PQ = a' CrossCov_Z(psi_V, psi_W) b
inline StatVar rel_ume(double s2x, double s2y, const Matrix& V, const Matrix& W, const Matrix& X,
                       const Matrix& Y, const Matrix& Z) {
    const Index n = Z.rows();
    std::vector<Vector> px, pzv, qy, pzw;
    for (Index i = 0; i < n; ++i) {
        px.push_back(ume_feature(s2x, V, X.row(i).transpose()));
        pzv.push_back(ume_feature(s2x, V, Z.row(i).transpose()));
        qy.push_back(ume_feature(s2y, W, Y.row(i).transpose()));
        pzw.push_back(ume_feature(s2y, W, Z.row(i).transpose()));
    }
    Vector a = Vector::Zero(V.rows()), b = Vector::Zero(W.rows());
    for (Index i = 0; i < n; ++i) {
        a += px[static_cast<std::size_t>(i)] - pzv[static_cast<std::size_t>(i)];
        b += qy[static_cast<std::size_t>(i)] - pzw[static_cast<std::size_t>(i)];
    }
    a /= static_cast<double>(n);
    b /= static_cast<double>(n);
    const double zeta_p = a.dot((covariance(px) + covariance(pzv)) * a);
    const double zeta_q = b.dot((covariance(qy) + covariance(pzw)) * b);
    const double zeta_pq = a.dot(cross_covariance(pzv, pzw) * b);
    StatVar out;
    out.stat = ume_sq(s2x, V, X, Z) - ume_sq(s2y, W, Y, Z);
    out.variance = std::max(0.0, 4.0 * ((zeta_p + zeta_q) - 2.0 * zeta_pq));
    return out;
}

inline StatVar rel_fssd(double s2x, double s2y, const relfit::DensityModel& model_p,
                        const relfit::DensityModel& model_q, const Matrix& V, const Matrix& W,
                        const Matrix& Z) {
    const Index n = Z.rows();
    std::vector<Vector> tp, tq;
    for (Index i = 0; i < n; ++i) {
        tp.push_back(stein_tau(s2x, model_p, V, Z.row(i).transpose()));
        tq.push_back(stein_tau(s2y, model_q, W, Z.row(i).transpose()));
    }
    Vector mu_p = Vector::Zero(tp.front().size()), mu_q = Vector::Zero(tq.front().size());
    for (Index i = 0; i < n; ++i) {
        mu_p += tp[static_cast<std::size_t>(i)];
        mu_q += tq[static_cast<std::size_t>(i)];
    }
    mu_p /= static_cast<double>(n);
    mu_q /= static_cast<double>(n);
    const double sigma_p = mu_p.dot(covariance(tp) * mu_p);
    const double sigma_q = mu_q.dot(covariance(tq) * mu_q);
    const double sigma_pq = mu_p.dot(cross_covariance(tp, tq) * mu_q);
    StatVar out;
    out.stat = fssd_sq(s2x, model_p, V, Z) - fssd_sq(s2y, model_q, W, Z);
    out.variance = std::max(0.0, 4.0 * ((sigma_p + sigma_q) - 2.0 * sigma_pq));
    return out;
}

inline StatVar rel_mmd(double sigma2, const Matrix& X, const Matrix& Y, const Matrix& Z) {
    const Index n = Z.rows();
    const auto mean_embed = [&](const Vector& t, const Matrix& S) {
        double acc = 0.0;
        for (Index j = 0; j < S.rows(); ++j) acc += gauss(sigma2, t, S.row(j).transpose());
        return acc / static_cast<double>(S.rows());
    };
    std::vector<Vector> gp, gq;
    for (Index i = 0; i < n; ++i) {
        const Vector xi = X.row(i).transpose();
        const Vector yi = Y.row(i).transpose();
        const Vector zi = Z.row(i).transpose();
        Vector p(1), q(1);
        p(0) = mean_embed(xi, X) + mean_embed(zi, Z) - mean_embed(xi, Z) - mean_embed(zi, X);
        q(0) = mean_embed(yi, Y) + mean_embed(zi, Z) - mean_embed(yi, Z) - mean_embed(zi, Y);
        gp.push_back(p);
        gq.push_back(q);
    }
    const double var_p = covariance(gp)(0, 0);
    const double var_q = covariance(gq)(0, 0);
    const double cov_pq = cross_covariance(gp, gq)(0, 0);
    StatVar out;
    out.stat = mmd_u_sq(sigma2, X, Z) - mmd_u_sq(sigma2, Y, Z);
    out.variance = std::max(0.0, 4.0 * ((var_p + var_q) - 2.0 * cov_pq));
    return out;
}

// ------------------------------------------------------------- densities ---
// Log densities (up to additive constants that do not depend on the point)
// for finite-difference score checks.

inline double iso_gauss_log_density(const Vector& mean, double variance, const Vector& z) {
    return -(z - mean).squaredNorm() / (2.0 * variance);
}

inline double mixture_log_density(const Vector& weights, const Matrix& means,
                                  const std::vector<Matrix>& covariances, const Vector& z) {
    const Index K = means.rows();
    std::vector<double> terms(static_cast<std::size_t>(K));
    for (Index c = 0; c < K; ++c) {
        const Eigen::LLT<Matrix> llt(covariances[static_cast<std::size_t>(c)]);
        const Vector diff = z - means.row(c).transpose();
        const Vector solved = llt.solve(diff);
        double log_det = 0.0;
        for (Index i = 0; i < means.cols(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
        terms[static_cast<std::size_t>(c)] =
            std::log(weights(c)) - 0.5 * log_det - 0.5 * diff.dot(solved);
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - top);
    return top + std::log(acc);
}

// Gaussian-Bernoulli RBM log density by literal enumeration of all 2^{d_h}
// hidden configurations h in {-1, +1}^{d_h}:
//   log sum_h exp(x' B h + b' x + c' h) - ||x||^2 / 2
inline double rbm_log_density_enum(const relfit::RbmParams& params, const Vector& x) {
    const Index dh = params.c.size();
    const std::uint64_t states = std::uint64_t{1} << dh;
    std::vector<double> terms(states);
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        Vector h(dh);
        for (Index j = 0; j < dh; ++j) h(j) = (mask >> j) & 1u ? 1.0 : -1.0;
        terms[mask] = x.dot(params.B * h) + params.b.dot(x) + params.c.dot(h);
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - top);
    return top + std::log(acc) - 0.5 * x.squaredNorm();
}

// Central finite-difference gradient of a scalar function of a vector.
template <typename F>
Vector fd_gradient(const F& f, const Vector& at, double h) {
    Vector grad(at.size());
    for (Index i = 0; i < at.size(); ++i) {
        Vector up = at, down = at;
        up(i) += h;
        down(i) -= h;
        grad(i) = (f(up) - f(down)) / (2.0 * h);
    }
    return grad;
}

}  // namespace reference
