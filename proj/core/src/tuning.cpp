#include "relfit/tuning.hpp"

#include "relfit/error.hpp"
#include "relfit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace relfit {

namespace {

// Median-heuristic inputs are capped at this many rows so bandwidth
// initialization stays linear in the sample size.
constexpr Index kMedianCapRows = 1000;

std::vector<Index> shuffled_indices(Index n, Rng& rng) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

Matrix take_rows(const Matrix& src, const std::vector<Index>& idx, std::size_t begin,
                 std::size_t count) {
    Matrix out(static_cast<Index>(count), src.cols());
    for (std::size_t i = 0; i < count; ++i)
        out.row(static_cast<Index>(i)) = src.row(idx[begin + i]);
    return out;
}

void check_optim_config(const OptimConfig& cfg, const char* who) {
    if (cfg.J < 1) throw input_error(std::string(who) + ": J must be >= 1");
    if (cfg.max_iters < 1) throw input_error(std::string(who) + ": max_iters must be >= 1");
    if (!std::isfinite(cfg.step_size) || cfg.step_size <= 0.0)
        throw input_error(std::string(who) + ": step_size must be finite and positive");
    if (!std::isfinite(cfg.gamma) || cfg.gamma < 0.0)
        throw input_error(std::string(who) + ": gamma must be finite and >= 0");
}

using EvalFn = std::function<ValueGrad(const Matrix&, double)>;

// Gradient ascent over (V, log sigma2). A proposal is accepted only when the
// criterion strictly improves; otherwise the step is halved. Evaluation
// failures (exceptions, non-finite values) count as rejected proposals.
OptimResult run_ascent(Matrix V, double sigma2, const OptimConfig& cfg, const EvalFn& eval) {
    const Index d = V.cols();
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    auto try_eval = [&](const Matrix& Vc, double s2) -> ValueGrad {
        try {
            ValueGrad vg = eval(Vc, s2);
            if (!std::isfinite(vg.value)) vg.value = nan;
            return vg;
        } catch (const std::exception&) {
            ValueGrad vg;
            vg.value = nan;
            return vg;
        }
    };

    ValueGrad cur = try_eval(V, sigma2);
    if (!std::isfinite(cur.value))
        throw degenerate_sample_error("optimize: criterion undefined at the initial point");

    OptimResult res;
    res.trajectory.push_back(cur.value);
    double log_s2 = std::log(sigma2);
    double step = cfg.step_size;
    int failures = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
        if (!cur.grad.allFinite()) {
            res.aborted = true;
            break;
        }
        Matrix Vp = V;
        for (Index j = 0; j < V.rows(); ++j)
            for (Index c = 0; c < d; ++c) Vp(j, c) += step * cur.grad(j * d + c);
        const double log_s2_p = log_s2 + step * cur.grad(V.size());
        const ValueGrad nxt = try_eval(Vp, std::exp(log_s2_p));
        if (std::isfinite(nxt.value) && nxt.value > cur.value) {
            V = std::move(Vp);
            log_s2 = log_s2_p;
            cur = nxt;
            res.trajectory.push_back(cur.value);
            ++res.iterations;
            step *= 1.2;
            failures = 0;
        } else {
            step *= 0.5;
            if (++failures >= 60 || step <= cfg.step_size * 1e-18) {
                res.aborted = true;
                break;
            }
        }
    }
    res.V = std::move(V);
    res.sigma2 = std::exp(log_s2);
    res.value = cur.value;
    return res;
}

}  // namespace

SplitData split_train_test(const Matrix& X, const Matrix& Y, const Matrix& Z,
                           double train_fraction, std::uint64_t seed) {
    const Index n = Z.rows();
    if (X.rows() != n || Y.rows() != n)
        throw input_error("split_train_test: samples must have equal row counts");
    if (!std::isfinite(train_fraction) || train_fraction <= 0.0 || train_fraction >= 1.0)
        throw input_error("split_train_test: train_fraction must lie in (0, 1)");
    const auto n_train =
        static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train < 2 || n - n_train < 2)
        throw input_error("split_train_test: both blocks need at least 2 rows");

    Rng rng = make_rng(derive_seed(seed, /*stream=*/0x73706c69ULL));
    const std::vector<Index> idx = shuffled_indices(n, rng);
    const auto nt = static_cast<std::size_t>(n_train);
    SplitData out;
    out.x_train = take_rows(X, idx, 0, nt);
    out.y_train = take_rows(Y, idx, 0, nt);
    out.z_train = take_rows(Z, idx, 0, nt);
    out.x_test = take_rows(X, idx, nt, static_cast<std::size_t>(n) - nt);
    out.y_test = take_rows(Y, idx, nt, static_cast<std::size_t>(n) - nt);
    out.z_test = take_rows(Z, idx, nt, static_cast<std::size_t>(n) - nt);
    return out;
}

OptimResult optimize_ume_params(const Matrix& x_train, const Matrix& y_train,
                                const Matrix& z_train, const OptimConfig& cfg) {
    check_optim_config(cfg, "optimize_ume_params");
    const Index n = z_train.rows();
    if (x_train.rows() != n || y_train.rows() != n)
        throw input_error("optimize_ume_params: samples must have equal row counts");
    if (x_train.cols() != z_train.cols() || y_train.cols() != z_train.cols())
        throw input_error("optimize_ume_params: dimension mismatch");
    if (3 * n < cfg.J)
        throw input_error("optimize_ume_params: J exceeds pooled training rows");

    Matrix pool(3 * n, z_train.cols());
    pool << x_train, y_train, z_train;
    Rng rng = make_rng(derive_seed(cfg.seed, /*stream=*/0x696e6974ULL));
    const std::vector<Index> idx = shuffled_indices(pool.rows(), rng);
    Matrix v0 = take_rows(pool, idx, 0, static_cast<std::size_t>(cfg.J));
    const double sigma2 =
        init_bandwidth_subsampled(x_train, y_train, z_train, kMedianCapRows, cfg.seed);
    return run_ascent(std::move(v0), sigma2, cfg, [&](const Matrix& V, double s2) {
        return ume_criterion_with_grad(V, s2, x_train, y_train, z_train, cfg.gamma);
    });
}

OptimResult optimize_fssd_params(const DensityModel& model_p, const DensityModel& model_q,
                                 const Matrix& z_train, const OptimConfig& cfg) {
    check_optim_config(cfg, "optimize_fssd_params");
    if (z_train.cols() != model_p.dim() || z_train.cols() != model_q.dim())
        throw input_error("optimize_fssd_params: dimension mismatch");
    if (z_train.rows() < cfg.J)
        throw input_error("optimize_fssd_params: J exceeds training rows");

    Rng rng = make_rng(derive_seed(cfg.seed, /*stream=*/0x696e6974ULL));
    const std::vector<Index> idx = shuffled_indices(z_train.rows(), rng);
    Matrix v0 = take_rows(z_train, idx, 0, static_cast<std::size_t>(cfg.J));
    const double med = median_heuristic_subsampled(z_train, kMedianCapRows,
                                                   derive_seed(cfg.seed, /*stream=*/0x6d656432ULL));
    if (!(med > 0.0))
        throw degenerate_sample_error("optimize_fssd_params: zero median bandwidth");
    return run_ascent(std::move(v0), med * med, cfg, [&](const Matrix& V, double s2) {
        return fssd_criterion_with_grad(V, s2, model_p, model_q, z_train, cfg.gamma);
    });
}

StatVarFn make_ume_context(const GaussianKernel& k, const Matrix& X, const Matrix& Y,
                           const Matrix& Z) {
    return [k, X, Y, Z](const Matrix& V) { return rel_ume_stat_and_var(k, k, V, V, X, Y, Z); };
}

StatVarFn make_fssd_context(const GaussianKernel& k, const DensityModel& model_p,
                            const DensityModel& model_q, const Matrix& Z) {
    const DensityModel* p = &model_p;
    const DensityModel* q = &model_q;
    return [k, p, q, Z](const Matrix& V) { return rel_fssd_stat_and_var(k, k, *p, *q, V, V, Z); };
}

PoolScores score_candidate_pool(const Matrix& pool, const StatVarFn& fn, double gamma) {
    if (pool.rows() < 1) throw input_error("score_candidate_pool: empty pool");
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw input_error("score_candidate_pool: gamma must be finite and >= 0");
    PoolScores out;
    out.scores = Vector::Zero(pool.rows());
    out.degenerate.assign(static_cast<std::size_t>(pool.rows()), false);
    for (Index i = 0; i < pool.rows(); ++i) {
        const StatVar sv = fn(pool.row(i));
        if (!(sv.variance >= config::kVarianceFloor) || !std::isfinite(sv.stat))
            out.degenerate[static_cast<std::size_t>(i)] = true;
        else
            out.scores(i) = sv.stat / (gamma + std::sqrt(sv.variance));
    }
    return out;
}

GreedyResult greedy_select(const Matrix& pool, Index J, GreedyDirection direction,
                           const StatVarFn& fn, double gamma) {
    if (pool.rows() < 1) throw input_error("greedy_select: empty pool");
    if (J < 1 || J > pool.rows())
        throw input_error("greedy_select: J must lie in [1, pool rows]");
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw input_error("greedy_select: gamma must be finite and >= 0");

    GreedyResult res;
    std::vector<bool> used(static_cast<std::size_t>(pool.rows()), false);
    Matrix cur(0, pool.cols());
    auto with_row = [&](const Matrix& base, Index row) {
        Matrix ext(base.rows() + 1, pool.cols());
        if (base.rows() > 0) ext.topRows(base.rows()) = base;
        ext.row(ext.rows() - 1) = pool.row(row);
        return ext;
    };
    for (Index round = 0; round < J; ++round) {
        Index best_idx = -1;
        double best_val = 0.0;
        for (Index c = 0; c < pool.rows(); ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            StatVar sv;
            try {
                sv = fn(with_row(cur, c));
            } catch (const std::exception&) {
                continue;
            }
            if (!(sv.variance >= config::kVarianceFloor) || !std::isfinite(sv.stat)) continue;
            const double crit = sv.stat / (gamma + std::sqrt(sv.variance));
            if (!std::isfinite(crit)) continue;
            const bool better =
                best_idx < 0 ||
                (direction == GreedyDirection::maximize ? crit > best_val : crit < best_val);
            if (better) {
                best_idx = c;
                best_val = crit;
            }
        }
        if (best_idx < 0) {
            res.exhausted = true;
            break;
        }
        used[static_cast<std::size_t>(best_idx)] = true;
        res.selected.push_back(best_idx);
        res.criterion_path.push_back(best_val);
        cur = with_row(cur, best_idx);
    }
    res.V = std::move(cur);
    return res;
}

}  // namespace relfit
