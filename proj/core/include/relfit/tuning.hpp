#pragma once

#include "relfit/fssd.hpp"
#include "relfit/kernel.hpp"
#include "relfit/models.hpp"
#include "relfit/types.hpp"
#include "relfit/ume.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace relfit {

// Disjoint train/test split of the triple (X, Y, Z). One shared shuffled
// permutation of [0, n) is applied to all three samples; the first
// round(train_fraction * n) rows form the training block.
struct SplitData {
    Matrix x_train, y_train, z_train;
    Matrix x_test, y_test, z_test;
};
SplitData split_train_test(const Matrix& X, const Matrix& Y, const Matrix& Z,
                           double train_fraction, std::uint64_t seed);

struct OptimConfig {
    Index J = 1;                          // number of test locations
    int max_iters = 200;                  // proposal budget (one eval each)
    double step_size = 1.0;               // initial ascent step
    double gamma = config::kDefaultGamma; // criterion regularizer
    std::uint64_t seed = 0;               // initial-location selection
};

struct OptimResult {
    Matrix V;                        // tuned locations (J x d)
    double sigma2 = 0.0;             // tuned bandwidth
    double value = 0.0;              // criterion at (V, sigma2)
    std::vector<double> trajectory;  // accepted criterion values, initial first
    int iterations = 0;              // accepted ascent steps
    bool aborted = false;            // stopped on step underflow / repeated failures
};

// Gradient ascent on the power criterion over (V, log sigma2) with a shared
// kernel for both models. Steps are accepted only when the criterion strictly
// improves; failed proposals halve the step. Initial locations are J rows
// drawn without replacement from the pooled training data (UME) or from the
// training sample itself (FSSD); the initial bandwidth comes from the median
// heuristic.
OptimResult optimize_ume_params(const Matrix& x_train, const Matrix& y_train,
                                const Matrix& z_train, const OptimConfig& cfg);
OptimResult optimize_fssd_params(const DensityModel& model_p, const DensityModel& model_q,
                                 const Matrix& z_train, const OptimConfig& cfg);

// Evaluates (stat, variance) for candidate location sets V (rows are
// locations; V = W, shared kernel). Sample matrices are copied into the
// context; the FSSD models are held by pointer and must outlive it.
using StatVarFn = std::function<StatVar(const Matrix&)>;
StatVarFn make_ume_context(const GaussianKernel& k, const Matrix& X, const Matrix& Y,
                           const Matrix& Z);
StatVarFn make_fssd_context(const GaussianKernel& k, const DensityModel& model_p,
                            const DensityModel& model_q, const Matrix& Z);

// Power criterion stat / (gamma + sqrt(variance)) of each pool row as a
// single test location. Rows whose variance falls below the degeneracy floor
// score 0 and are flagged.
struct PoolScores {
    Vector scores;
    std::vector<bool> degenerate;
};
PoolScores score_candidate_pool(const Matrix& pool, const StatVarFn& fn, double gamma);

enum class GreedyDirection { maximize, minimize };

struct GreedyResult {
    std::vector<Index> selected;         // pool row indices, in pick order
    Matrix V;                            // selected locations stacked as rows
    std::vector<double> criterion_path;  // criterion after each pick
    bool exhausted = false;              // ran out of usable candidates early
};

// Forward greedy selection of J pool rows: each round adds the candidate
// whose inclusion gives the best (largest or smallest) power criterion.
// Candidates producing degenerate variance or non-finite criteria are
// skipped.
GreedyResult greedy_select(const Matrix& pool, Index J, GreedyDirection direction,
                           const StatVarFn& fn, double gamma);

}  // namespace relfit
