#pragma once

#include "relfit/types.hpp"

#include <cstdint>
#include <vector>

namespace relfit {

// A model known through its score function grad_z log q(z). Only the
// unnormalized log density enters: normalizing constants cancel in the score,
// so none of the implementations ever computes one.
class DensityModel {
  public:
    virtual ~DensityModel() = default;
    virtual Index dim() const = 0;

    // Row i of the result is the score at row i of `points` (n x d -> n x d).
    virtual Matrix score(const Matrix& points) const = 0;

    virtual bool has_sampler() const { return false; }
    virtual Matrix sample(Index n, std::uint64_t seed) const;

    Vector score_at(const Vector& z) const;
};

// N(mean, variance * I); score(z) = (mean - z) / variance.
class IsotropicGaussian final : public DensityModel {
  public:
    IsotropicGaussian(Vector mean, double variance);
    Index dim() const override { return mean_.size(); }
    Matrix score(const Matrix& points) const override;
    bool has_sampler() const override { return true; }
    Matrix sample(Index n, std::uint64_t seed) const override;

    const Vector& mean() const { return mean_; }
    double variance() const { return variance_; }

  private:
    Vector mean_;
    double variance_;
};

// Finite Gaussian mixture with full covariances. Weights may be given
// unnormalized; they are normalized once at construction.
class GaussianMixture final : public DensityModel {
  public:
    GaussianMixture(Vector weights, Matrix means, std::vector<Matrix> covariances);
    Index dim() const override { return means_.cols(); }
    Matrix score(const Matrix& points) const override;
    bool has_sampler() const override { return true; }
    Matrix sample(Index n, std::uint64_t seed) const override;

    Index components() const { return means_.rows(); }
    const Matrix& means() const { return means_; }

  private:
    Vector weights_;             // normalized
    Vector log_weights_;
    Matrix means_;               // K x d
    std::vector<Matrix> chol_;   // lower Cholesky factors
    std::vector<Matrix> prec_;   // inverses
    Vector log_norm_;            // log w_c - (1/2) log det(Sigma_c) (common terms dropped)
};

// Gaussian-Bernoulli restricted Boltzmann machine with x in R^d and hidden
// h in {-1, 1}^{d_h}:
//   density(x) proportional to sum_h exp(x'Bh + b'x + c'h - ||x||^2 / 2)
//   score(x) = b - x + B tanh(B'x + c)
struct RbmParams {
    Matrix B;  // d x d_h
    Vector b;  // d
    Vector c;  // d_h
};

struct GibbsConfig {
    Index burn_in = 2000;
    Index thinning = 1;
};

class RbmModel final : public DensityModel {
  public:
    explicit RbmModel(RbmParams params, GibbsConfig gibbs = {});
    Index dim() const override { return params_.b.size(); }
    Matrix score(const Matrix& points) const override;
    bool has_sampler() const override { return true; }
    Matrix sample(Index n, std::uint64_t seed) const override;

    const RbmParams& params() const { return params_; }

  private:
    RbmParams params_;
    GibbsConfig gibbs_;
};

// B entries drawn uniformly from {-1, 1}; b, c standard normal.
RbmParams random_rbm_params(Index d, Index d_h, std::uint64_t seed);

// Returns a copy with B(0, 0) shifted by epsilon.
RbmParams rbm_perturb(const RbmParams& params, double epsilon);

// Block Gibbs sampler: P(h_j = 1 | x) = logistic(2 (B'x + c)_j) and
// x | h ~ N(Bh + b, I). Runs one independent chain per returned row, each
// initialized from N(b, I) and advanced burn_in + thinning - 1 sweeps.
Matrix rbm_sample(const RbmParams& params, Index n, std::uint64_t seed,
                  const GibbsConfig& gibbs = {});

// Four-component mixture on the corner grid {0, 5}^2. The reference variant
// uses unit isotropic components; the model variants share eigenvalues (2, 0.5)
// and differ only in orientation (pi/4 vs pi/8), so the model-model difference
// is small relative to the global structure.
enum class BlobsVariant { model_p, model_q, reference };

GaussianMixture blobs_model(BlobsVariant variant);

}  // namespace relfit
