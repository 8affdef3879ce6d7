#include "relfit/models.hpp"

#include "relfit/error.hpp"
#include "relfit/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace relfit {

Matrix DensityModel::sample(Index, std::uint64_t) const {
    throw input_error("DensityModel: this model has no sampler");
}

Vector DensityModel::score_at(const Vector& z) const {
    if (z.size() != dim()) throw input_error("score_at: dimension mismatch");
    return score(z.transpose()).row(0).transpose();
}

// ---------------------------------------------------------------------------
// IsotropicGaussian
// ---------------------------------------------------------------------------

IsotropicGaussian::IsotropicGaussian(Vector mean, double variance)
    : mean_(std::move(mean)), variance_(variance) {
    if (mean_.size() < 1 || !mean_.allFinite())
        throw input_error("IsotropicGaussian: invalid mean");
    if (!std::isfinite(variance_) || variance_ <= 0.0)
        throw input_error("IsotropicGaussian: variance must be positive");
}

Matrix IsotropicGaussian::score(const Matrix& points) const {
    if (points.cols() != dim()) throw input_error("score: dimension mismatch");
    return ((-points).rowwise() + mean_.transpose()) / variance_;
}

Matrix IsotropicGaussian::sample(Index n, std::uint64_t seed) const {
    if (n < 1) throw input_error("sample: n must be >= 1");
    Rng rng = make_rng(seed);
    Matrix out = std::sqrt(variance_) * standard_normal_matrix(rng, n, dim());
    out.rowwise() += mean_.transpose();
    return out;
}

// ---------------------------------------------------------------------------
// GaussianMixture
// ---------------------------------------------------------------------------

GaussianMixture::GaussianMixture(Vector weights, Matrix means, std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)) {
    const Index k = means_.rows();
    const Index d = means_.cols();
    if (k < 1 || d < 1 || !means_.allFinite()) throw input_error("GaussianMixture: invalid means");
    if (weights_.size() != k || (weights_.array() <= 0.0).any() || !weights_.allFinite())
        throw input_error("GaussianMixture: weights must be positive, one per component");
    if (static_cast<Index>(covariances.size()) != k)
        throw input_error("GaussianMixture: one covariance per component required");
    weights_ /= weights_.sum();
    log_weights_ = weights_.array().log().matrix();
    log_norm_.resize(k);
    chol_.reserve(covariances.size());
    prec_.reserve(covariances.size());
    for (Index c = 0; c < k; ++c) {
        const Matrix& cov = covariances[static_cast<std::size_t>(c)];
        if (cov.rows() != d || cov.cols() != d || !cov.allFinite())
            throw input_error("GaussianMixture: covariance shape mismatch");
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success)
            throw input_error("GaussianMixture: covariance is not positive definite");
        chol_.push_back(llt.matrixL());
        prec_.push_back(llt.solve(Matrix::Identity(d, d)));
        const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
        log_norm_(c) = log_weights_(c) - 0.5 * log_det;
    }
}

Matrix GaussianMixture::score(const Matrix& points) const {
    if (points.cols() != dim()) throw input_error("score: dimension mismatch");
    const Index n = points.rows();
    const Index k = components();
    // Responsibility-weighted component scores, with log-sum-exp for the
    // responsibilities: score(z) = sum_c resp_c(z) * Sigma_c^{-1} (mu_c - z).
    Matrix log_comp(n, k);
    std::vector<Matrix> comp_score(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) {
        Matrix centered = points.rowwise() - means_.row(c);       // n x d
        Matrix solved = centered * prec_[static_cast<std::size_t>(c)];  // n x d
        log_comp.col(c) =
            ((centered.array() * solved.array()).rowwise().sum() * -0.5 + log_norm_(c)).matrix();
        comp_score[static_cast<std::size_t>(c)] = -solved;
    }
    const Vector max_log = log_comp.rowwise().maxCoeff();
    Matrix resp = (log_comp.colwise() - max_log).array().exp().matrix();
    const Vector row_sums = resp.rowwise().sum();
    resp.array().colwise() /= row_sums.array();
    Matrix out = Matrix::Zero(n, dim());
    for (Index c = 0; c < k; ++c)
        out += (comp_score[static_cast<std::size_t>(c)].array().colwise() * resp.col(c).array())
                   .matrix();
    return out;
}

Matrix GaussianMixture::sample(Index n, std::uint64_t seed) const {
    if (n < 1) throw input_error("sample: n must be >= 1");
    Rng rng = make_rng(seed);
    // Cumulative weights for component selection.
    Vector cum(weights_.size());
    double acc = 0.0;
    for (Index c = 0; c < weights_.size(); ++c) {
        acc += weights_(c);
        cum(c) = acc;
    }
    Matrix out(n, dim());
    for (Index i = 0; i < n; ++i) {
        const double u = uniform01(rng) * acc;
        Index c = 0;
        while (c + 1 < cum.size() && u > cum(c)) ++c;
        Vector noise(dim());
        for (Index j = 0; j < dim(); ++j) noise(j) = standard_normal(rng);
        out.row(i) = means_.row(c) + (chol_[static_cast<std::size_t>(c)] * noise).transpose();
    }
    return out;
}

// ---------------------------------------------------------------------------
// RBM
// ---------------------------------------------------------------------------

namespace {

void validate_rbm(const RbmParams& p) {
    if (p.B.rows() < 1 || p.B.cols() < 1 || !p.B.allFinite())
        throw input_error("RbmParams: invalid B");
    if (p.b.size() != p.B.rows() || !p.b.allFinite()) throw input_error("RbmParams: invalid b");
    if (p.c.size() != p.B.cols() || !p.c.allFinite()) throw input_error("RbmParams: invalid c");
}

void validate_gibbs(const GibbsConfig& g) {
    if (g.burn_in < 0) throw input_error("GibbsConfig: burn_in must be >= 0");
    if (g.thinning < 1) throw input_error("GibbsConfig: thinning must be >= 1");
}

}  // namespace

RbmModel::RbmModel(RbmParams params, GibbsConfig gibbs)
    : params_(std::move(params)), gibbs_(gibbs) {
    validate_rbm(params_);
    validate_gibbs(gibbs_);
}

Matrix RbmModel::score(const Matrix& points) const {
    if (points.cols() != dim()) throw input_error("score: dimension mismatch");
    // score(x) = b - x + B tanh(B'x + c)
    Matrix act = points * params_.B;  // n x d_h
    act.rowwise() += params_.c.transpose();
    Matrix out = act.array().tanh().matrix() * params_.B.transpose();
    out -= points;
    out.rowwise() += params_.b.transpose();
    return out;
}

Matrix RbmModel::sample(Index n, std::uint64_t seed) const {
    return rbm_sample(params_, n, seed, gibbs_);
}

RbmParams random_rbm_params(Index d, Index d_h, std::uint64_t seed) {
    if (d < 1 || d_h < 1) throw input_error("random_rbm_params: need d >= 1 and d_h >= 1");
    Rng rng = make_rng(seed);
    RbmParams p;
    p.B.resize(d, d_h);
    for (Index j = 0; j < d_h; ++j)
        for (Index i = 0; i < d; ++i) p.B(i, j) = (rng() & 1ULL) ? 1.0 : -1.0;
    p.b = standard_normal_matrix(rng, d, 1);
    p.c = standard_normal_matrix(rng, d_h, 1);
    return p;
}

RbmParams rbm_perturb(const RbmParams& params, double epsilon) {
    validate_rbm(params);
    if (!std::isfinite(epsilon)) throw input_error("rbm_perturb: epsilon must be finite");
    RbmParams out = params;
    out.B(0, 0) += epsilon;
    return out;
}

Matrix rbm_sample(const RbmParams& params, Index n, std::uint64_t seed, const GibbsConfig& gibbs) {
    validate_rbm(params);
    validate_gibbs(gibbs);
    if (n < 1) throw input_error("rbm_sample: n must be >= 1");
    const Index d = params.B.rows();
    const Index d_h = params.B.cols();
    Rng rng = make_rng(seed);

    // One independent chain per row, advanced in lockstep.
    Matrix x = standard_normal_matrix(rng, n, d);
    x.rowwise() += params.b.transpose();
    const Index sweeps = gibbs.burn_in + gibbs.thinning - 1;
    Matrix act(n, d_h);
    Matrix h(n, d_h);
    for (Index sweep = 0; sweep < sweeps; ++sweep) {
        act.noalias() = x * params.B;
        act.rowwise() += params.c.transpose();
        for (Index j = 0; j < d_h; ++j) {
            for (Index i = 0; i < n; ++i) {
                const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * act(i, j)));
                h(i, j) = uniform01(rng) < p_plus ? 1.0 : -1.0;
            }
        }
        fill_standard_normal(rng, x);
        x.noalias() += h * params.B.transpose();
        x.rowwise() += params.b.transpose();
    }
    return x;
}

GaussianMixture blobs_model(BlobsVariant variant) {
    Matrix means(4, 2);
    means << 0.0, 0.0, 0.0, 5.0, 5.0, 0.0, 5.0, 5.0;
    const Vector weights = Vector::Constant(4, 1.0);
    Matrix cov(2, 2);
    if (variant == BlobsVariant::reference) {
        cov = Matrix::Identity(2, 2);
    } else {
        const double angle = (variant == BlobsVariant::model_p) ? M_PI / 4.0 : M_PI / 8.0;
        Matrix rot(2, 2);
        rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        cov = rot * Eigen::DiagonalMatrix<double, 2>(2.0, 0.5) * rot.transpose();
    }
    return GaussianMixture(weights, means, {cov, cov, cov, cov});
}

}  // namespace relfit
