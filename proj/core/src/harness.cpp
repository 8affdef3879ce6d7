#include "relfit/harness.hpp"

#include "relfit/error.hpp"
#include "relfit/matrix_io.hpp"
#include "relfit/mmd.hpp"
#include "relfit/rng.hpp"
#include "relfit/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <thread>
#include <utility>

namespace relfit {

namespace {

// Seed substreams, one per independent source of randomness.
constexpr std::uint64_t kStreamDraw = 0x64726177ULL;       // sample generation
constexpr std::uint64_t kStreamMethod = 0x6d657468ULL;     // method pipeline root
constexpr std::uint64_t kStreamSplit = 0x73706c74ULL;      // train/test split
constexpr std::uint64_t kStreamLocations = 0x756c6f63ULL;  // random test locations
constexpr std::uint64_t kStreamBandwidth = 0x62616e64ULL;  // bandwidth subsampling
constexpr std::uint64_t kStreamOptimizer = 0x6f707469ULL;  // optimizer init
constexpr std::uint64_t kStreamX = 0x78ULL;
constexpr std::uint64_t kStreamY = 0x79ULL;
constexpr std::uint64_t kStreamZ = 0x7aULL;

// Row caps for the median-heuristic scans inside pipelines, keeping bandwidth
// selection from dominating the linear-time tests at large n.
constexpr Index kPipelineMedianCap = 1000;
constexpr Index kMmdMedianCap = 2000;

Matrix vstack3(const Matrix& A, const Matrix& B, const Matrix& C) {
    Matrix out(A.rows() + B.rows() + C.rows(), A.cols());
    out << A, B, C;
    return out;
}

class MeanShiftProblem final : public Problem {
  public:
    explicit MeanShiftProblem(Index d)
        : p_(shifted_mean(d, 0.5), 1.0), q_(shifted_mean(d, 1.0), 1.0),
          r_(Vector::Zero(d), 1.0) {}

    Triple draw(Index n, std::uint64_t seed) const override {
        return {p_.sample(n, derive_seed(seed, kStreamX)),
                q_.sample(n, derive_seed(seed, kStreamY)),
                r_.sample(n, derive_seed(seed, kStreamZ))};
    }
    Index dim() const override { return p_.dim(); }
    const DensityModel* model_p() const override { return &p_; }
    const DensityModel* model_q() const override { return &q_; }

  private:
    static Vector shifted_mean(Index d, double first) {
        Vector m = Vector::Zero(d);
        m(0) = first;
        return m;
    }
    IsotropicGaussian p_, q_, r_;
};

class BlobsProblem final : public Problem {
  public:
    BlobsProblem()
        : p_(blobs_model(BlobsVariant::model_p)), q_(blobs_model(BlobsVariant::model_q)),
          r_(blobs_model(BlobsVariant::reference)) {}

    Triple draw(Index n, std::uint64_t seed) const override {
        return {p_.sample(n, derive_seed(seed, kStreamX)),
                q_.sample(n, derive_seed(seed, kStreamY)),
                r_.sample(n, derive_seed(seed, kStreamZ))};
    }
    Index dim() const override { return 2; }
    const DensityModel* model_p() const override { return &p_; }
    const DensityModel* model_q() const override { return &q_; }

  private:
    GaussianMixture p_, q_, r_;
};

class RbmProblem final : public Problem {
  public:
    RbmProblem(Index d, Index d_h, double epsilon, std::uint64_t seed_problem,
               const GibbsConfig& gibbs)
        : gibbs_(gibbs), reference_params_(random_rbm_params(
                             d, d_h, derive_seed(seed_problem, /*stream=*/0x72626d70ULL))),
          p_(rbm_perturb(reference_params_, epsilon), gibbs),
          q_(rbm_perturb(reference_params_, 0.3), gibbs), r_(reference_params_, gibbs) {}

    Triple draw(Index n, std::uint64_t seed) const override {
        return {rbm_sample(p_.params(), n, derive_seed(seed, kStreamX), gibbs_),
                rbm_sample(q_.params(), n, derive_seed(seed, kStreamY), gibbs_),
                rbm_sample(r_.params(), n, derive_seed(seed, kStreamZ), gibbs_)};
    }
    Index dim() const override { return r_.dim(); }
    const DensityModel* model_p() const override { return &p_; }
    const DensityModel* model_q() const override { return &q_; }

  private:
    GibbsConfig gibbs_;
    RbmParams reference_params_;
    RbmModel p_, q_, r_;
};

// Two unit-variance Gaussians at -2 and +2; the reference mixes them with
// weight `mix` on the first.
class Mixture1dProblem final : public Problem {
  public:
    explicit Mixture1dProblem(double mix)
        : p_(Vector::Constant(1, -2.0), 1.0), q_(Vector::Constant(1, 2.0), 1.0),
          r_(make_reference(mix)) {}

    Triple draw(Index n, std::uint64_t seed) const override {
        return {p_.sample(n, derive_seed(seed, kStreamX)),
                q_.sample(n, derive_seed(seed, kStreamY)),
                r_.sample(n, derive_seed(seed, kStreamZ))};
    }
    Index dim() const override { return 1; }
    const DensityModel* model_p() const override { return &p_; }
    const DensityModel* model_q() const override { return &q_; }

  private:
    static GaussianMixture make_reference(double mix) {
        Vector weights(2);
        weights << mix, 1.0 - mix;
        Matrix means(2, 1);
        means << -2.0, 2.0;
        return GaussianMixture(weights, means, {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    }
    IsotropicGaussian p_, q_;
    GaussianMixture r_;
};

class ExternalProblem final : public Problem {
  public:
    ExternalProblem(const std::string& path_x, const std::string& path_y,
                    const std::string& path_z)
        : x_(load_matrix(path_x)), y_(load_matrix(path_y)), z_(load_matrix(path_z)) {
        if (x_.cols() != z_.cols())
            throw input_error("external problem: X has " + std::to_string(x_.cols()) +
                              " columns but Z has " + std::to_string(z_.cols()));
        if (y_.cols() != z_.cols())
            throw input_error("external problem: Y has " + std::to_string(y_.cols()) +
                              " columns but Z has " + std::to_string(z_.cols()));
    }

    // n = 0 returns the full matrices; a smaller n takes a seeded row
    // subsample from each.
    Triple draw(Index n, std::uint64_t seed) const override {
        if (n == 0) return {x_, y_, z_};
        return {subsample(x_, n, derive_seed(seed, kStreamX)),
                subsample(y_, n, derive_seed(seed, kStreamY)),
                subsample(z_, n, derive_seed(seed, kStreamZ))};
    }
    Index dim() const override { return z_.cols(); }

  private:
    static Matrix subsample(const Matrix& src, Index n, std::uint64_t seed) {
        if (n > src.rows())
            throw input_error("external problem: requested n exceeds available rows");
        if (n == src.rows()) return src;
        std::vector<Index> idx(static_cast<std::size_t>(src.rows()));
        std::iota(idx.begin(), idx.end(), Index{0});
        Rng rng = make_rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        Matrix out(n, src.cols());
        for (Index i = 0; i < n; ++i) out.row(i) = src.row(idx[static_cast<std::size_t>(i)]);
        return out;
    }
    Matrix x_, y_, z_;
};

Index resolve_dim(const ProblemConfig& cfg) {
    const Index requested = cfg.dim;
    switch (cfg.kind) {
        case ProblemKind::mean_shift:
            return requested == 0 ? 50 : requested;
        case ProblemKind::blobs:
            if (requested != 0 && requested != 2)
                throw input_error("make_problem: the blobs problem is two-dimensional");
            return 2;
        case ProblemKind::rbm:
            return requested == 0 ? 20 : requested;
        case ProblemKind::mixture1d:
            if (requested != 0 && requested != 1)
                throw input_error("make_problem: the mixture1d problem is one-dimensional");
            return 1;
        case ProblemKind::external:
            return requested;  // determined by the files
    }
    throw input_error("make_problem: unknown problem kind");
}

void time_pipeline(TrialRecord& rec, const std::function<TestResult()>& pipeline) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const TestResult res = pipeline();
        rec.stat = res.stat;
        rec.threshold = res.threshold;
        rec.p_value = res.p_value;
        rec.reject = res.reject;
        rec.degenerate = res.degenerate;
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
}

void check_method_spec(const MethodSpec& spec) {
    if (spec.J < 1) throw input_error("method spec: J must be >= 1");
    if (!std::isfinite(spec.alpha) || spec.alpha <= 0.0 || spec.alpha >= 1.0)
        throw input_error("method spec: alpha must lie in (0, 1)");
    if (!std::isfinite(spec.train_fraction) || spec.train_fraction <= 0.0 ||
        spec.train_fraction >= 1.0)
        throw input_error("method spec: train_fraction must lie in (0, 1)");
    if (!std::isfinite(spec.gamma) || spec.gamma < 0.0)
        throw input_error("method spec: gamma must be finite and >= 0");
}

OptimConfig optimizer_config(const MethodSpec& spec, std::uint64_t seed) {
    OptimConfig oc;
    oc.J = spec.J;
    oc.max_iters = spec.max_iters;
    oc.step_size = spec.step_size;
    oc.gamma = spec.gamma;
    oc.seed = seed;
    return oc;
}

TestResult run_pipeline(const Problem& problem, const Problem::Triple& data,
                        const MethodSpec& spec, std::uint64_t seed) {
    check_method_spec(spec);
    switch (spec.method) {
        case Method::rel_mmd_median: {
            const Matrix pooled = vstack3(data.x, data.y, data.z);
            const double med = median_heuristic_subsampled(
                pooled, kMmdMedianCap, derive_seed(seed, kStreamBandwidth));
            if (!(med > 0.0))
                throw degenerate_sample_error("rel_mmd_median: zero median bandwidth");
            const GaussianKernel k(med * med);
            return rel_mmd_test(k, data.x, data.y, data.z, spec.alpha);
        }
        case Method::rel_ume_random: {
            const SplitData split =
                split_train_test(data.x, data.y, data.z, spec.train_fraction,
                                 derive_seed(seed, kStreamSplit));
            const Matrix pool = vstack3(split.x_train, split.y_train, split.z_train);
            if (pool.rows() < spec.J)
                throw input_error("rel_ume_random: J exceeds pooled training rows");
            std::vector<Index> idx(static_cast<std::size_t>(pool.rows()));
            std::iota(idx.begin(), idx.end(), Index{0});
            Rng rng = make_rng(derive_seed(seed, kStreamLocations));
            std::shuffle(idx.begin(), idx.end(), rng);
            Matrix V(spec.J, pool.cols());
            for (Index j = 0; j < spec.J; ++j)
                V.row(j) = pool.row(idx[static_cast<std::size_t>(j)]);
            const double sigma2 =
                init_bandwidth_subsampled(split.x_train, split.y_train, split.z_train,
                                          kPipelineMedianCap, derive_seed(seed, kStreamBandwidth));
            const GaussianKernel k(sigma2);
            return rel_ume_test(k, k, V, V, split.x_test, split.y_test, split.z_test, spec.alpha);
        }
        case Method::rel_ume_opt: {
            const SplitData split =
                split_train_test(data.x, data.y, data.z, spec.train_fraction,
                                 derive_seed(seed, kStreamSplit));
            const OptimResult tuned =
                optimize_ume_params(split.x_train, split.y_train, split.z_train,
                                    optimizer_config(spec, derive_seed(seed, kStreamOptimizer)));
            const GaussianKernel k(tuned.sigma2);
            return rel_ume_test(k, k, tuned.V, tuned.V, split.x_test, split.y_test, split.z_test,
                                spec.alpha);
        }
        case Method::rel_fssd_opt: {
            const DensityModel* p = problem.model_p();
            const DensityModel* q = problem.model_q();
            if (p == nullptr || q == nullptr)
                throw input_error("rel_fssd_opt: the problem provides no model densities");
            const SplitData split =
                split_train_test(data.x, data.y, data.z, spec.train_fraction,
                                 derive_seed(seed, kStreamSplit));
            const OptimResult tuned = optimize_fssd_params(
                *p, *q, split.z_train, optimizer_config(spec, derive_seed(seed, kStreamOptimizer)));
            const GaussianKernel k(tuned.sigma2);
            return rel_fssd_test(k, k, *p, *q, tuned.V, tuned.V, split.z_test, spec.alpha);
        }
    }
    throw input_error("run_method_on_triple: unknown method");
}

nlohmann::json problem_json(const ProblemConfig& cfg) {
    nlohmann::json j;
    j["problem"] = to_string(cfg.kind);
    j["n"] = cfg.n;
    j["dim"] = cfg.dim;
    j["rbm_hidden"] = cfg.rbm_hidden;
    j["epsilon"] = cfg.epsilon;
    j["mix"] = cfg.mix;
    j["gibbs_burn_in"] = cfg.gibbs.burn_in;
    j["gibbs_thinning"] = cfg.gibbs.thinning;
    j["seed_problem"] = cfg.seed_problem;
    j["path_x"] = cfg.path_x;
    j["path_y"] = cfg.path_y;
    j["path_z"] = cfg.path_z;
    return j;
}

nlohmann::json method_json(const MethodSpec& spec) {
    nlohmann::json j;
    j["method"] = to_string(spec.method);
    j["J"] = spec.J;
    j["alpha"] = spec.alpha;
    j["train_fraction"] = spec.train_fraction;
    j["gamma"] = spec.gamma;
    j["max_iters"] = spec.max_iters;
    j["step_size"] = spec.step_size;
    return j;
}

}  // namespace

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::mean_shift: return "mean_shift";
        case ProblemKind::blobs: return "blobs";
        case ProblemKind::rbm: return "rbm";
        case ProblemKind::mixture1d: return "mixture1d";
        case ProblemKind::external: return "external";
    }
    return "unknown";
}

std::string to_string(Method method) {
    switch (method) {
        case Method::rel_ume_random: return "rel_ume_random";
        case Method::rel_ume_opt: return "rel_ume_opt";
        case Method::rel_fssd_opt: return "rel_fssd_opt";
        case Method::rel_mmd_median: return "rel_mmd_median";
    }
    return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
    if (name == "mean_shift") return ProblemKind::mean_shift;
    if (name == "blobs") return ProblemKind::blobs;
    if (name == "rbm") return ProblemKind::rbm;
    if (name == "mixture1d") return ProblemKind::mixture1d;
    if (name == "external") return ProblemKind::external;
    throw input_error("unknown problem: " + name);
}

Method parse_method(const std::string& name) {
    if (name == "rel_ume_random") return Method::rel_ume_random;
    if (name == "rel_ume_opt") return Method::rel_ume_opt;
    if (name == "rel_fssd_opt") return Method::rel_fssd_opt;
    if (name == "rel_mmd_median") return Method::rel_mmd_median;
    throw input_error("unknown method: " + name);
}

std::unique_ptr<Problem> make_problem(const ProblemConfig& cfg) {
    if (cfg.dim < 0) throw input_error("make_problem: dim must be >= 0");
    const Index dim = resolve_dim(cfg);
    switch (cfg.kind) {
        case ProblemKind::mean_shift:
            if (dim < 1) throw input_error("make_problem: mean_shift needs dim >= 1");
            return std::make_unique<MeanShiftProblem>(dim);
        case ProblemKind::blobs:
            return std::make_unique<BlobsProblem>();
        case ProblemKind::rbm:
            if (dim < 1 || cfg.rbm_hidden < 1)
                throw input_error("make_problem: rbm needs dim >= 1 and rbm_hidden >= 1");
            if (!std::isfinite(cfg.epsilon))
                throw input_error("make_problem: epsilon must be finite");
            return std::make_unique<RbmProblem>(dim, cfg.rbm_hidden, cfg.epsilon,
                                                cfg.seed_problem, cfg.gibbs);
        case ProblemKind::mixture1d:
            if (!std::isfinite(cfg.mix) || cfg.mix <= 0.0 || cfg.mix >= 1.0)
                throw input_error("make_problem: mix must lie in (0, 1)");
            return std::make_unique<Mixture1dProblem>(cfg.mix);
        case ProblemKind::external:
            if (cfg.path_x.empty() || cfg.path_y.empty() || cfg.path_z.empty())
                throw input_error("make_problem: external needs all three matrix paths");
            return std::make_unique<ExternalProblem>(cfg.path_x, cfg.path_y, cfg.path_z);
    }
    throw input_error("make_problem: unknown problem kind");
}

TrialRecord run_method_on_triple(const Problem& problem, const Problem::Triple& data,
                                 const MethodSpec& spec, std::uint64_t seed, Index trial_index) {
    TrialRecord rec;
    rec.trial_index = trial_index;
    rec.method = to_string(spec.method);
    time_pipeline(rec, [&] { return run_pipeline(problem, data, spec, seed); });
    return rec;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const char* env = std::getenv("RELFIT_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1 || value > 4096)
        throw input_error("RELFIT_WORKERS must be a positive integer");
    return static_cast<int>(value);
}

TrialsResult run_trials(const ProblemConfig& problem, const MethodSpec& spec, Index trials,
                        std::uint64_t seed_base, int workers) {
    if (trials < 1) throw input_error("run_trials: trials must be >= 1");
    if (problem.kind != ProblemKind::external && problem.n < 4)
        throw input_error("run_trials: n must be >= 4");
    check_method_spec(spec);
    const std::unique_ptr<Problem> prob = make_problem(problem);

    TrialsResult out;
    out.records.resize(static_cast<std::size_t>(trials));
    std::atomic<Index> next{0};
    auto worker = [&] {
        while (true) {
            const Index i = next.fetch_add(1);
            if (i >= trials) break;
            auto& rec = out.records[static_cast<std::size_t>(i)];
            const std::uint64_t trial_seed = seed_base + static_cast<std::uint64_t>(i);
            try {
                const Problem::Triple data =
                    prob->draw(problem.n, derive_seed(trial_seed, kStreamDraw));
                rec = run_method_on_triple(*prob, data, spec,
                                           derive_seed(trial_seed, kStreamMethod), i);
            } catch (const std::exception& e) {
                rec.trial_index = i;
                rec.method = to_string(spec.method);
                rec.failed = true;
                rec.error = e.what();
            }
        }
    };

    const int n_workers =
        std::min<int>(resolve_workers(workers), static_cast<int>(trials));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    Index failures = 0;
    Index rejects = 0;
    for (const TrialRecord& rec : out.records) {
        if (rec.failed)
            ++failures;
        else if (rec.reject)
            ++rejects;
    }
    const Index completed = trials - failures;
    out.summary.trials = trials;
    out.summary.failures = failures;
    out.summary.rejection_rate =
        completed > 0 ? static_cast<double>(rejects) / static_cast<double>(completed) : 0.0;
    const BinomialCi ci = wilson_interval(rejects, completed);
    out.summary.ci_low = ci.low;
    out.summary.ci_high = ci.high;
    return out;
}

BenchResult runtime_bench(const ProblemConfig& problem, const std::vector<MethodSpec>& methods,
                          const std::vector<Index>& n_grid, int reps, std::uint64_t seed_base) {
    if (methods.empty()) throw input_error("runtime_bench: no methods given");
    if (n_grid.empty()) throw input_error("runtime_bench: empty sample-size grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 4) throw input_error("runtime_bench: n must be >= 4");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw input_error("runtime_bench: sample sizes must be strictly increasing");
    }
    if (reps < 3) throw input_error("runtime_bench: reps must be >= 3");
    const std::unique_ptr<Problem> prob = make_problem(problem);

    // Below this median the steady-clock resolution distorts ratios; rerun
    // with more reps.
    constexpr double kMinReliableSeconds = 1e-4;
    constexpr int kMaxReps = 192;

    BenchResult out;
    for (const MethodSpec& spec : methods) {
        std::vector<double> log_n, log_t;
        for (Index n : n_grid) {
            int cur_reps = reps;
            bool increased = false;
            std::vector<double> times;
            while (true) {
                times.clear();
                for (int r = 0; r < cur_reps; ++r) {
                    const std::uint64_t rep_seed = seed_base + static_cast<std::uint64_t>(r);
                    const Problem::Triple data = prob->draw(
                        n, derive_seed(rep_seed, kStreamDraw, static_cast<std::uint64_t>(n)));
                    const TrialRecord rec = run_method_on_triple(
                        *prob, data, spec,
                        derive_seed(rep_seed, kStreamMethod, static_cast<std::uint64_t>(n)), r);
                    if (rec.failed)
                        throw std::runtime_error("runtime_bench: trial failed: " + rec.error);
                    times.push_back(rec.wall_time_seconds);
                }
                if (median_of(times) >= kMinReliableSeconds || cur_reps >= kMaxReps) break;
                cur_reps = std::min(kMaxReps, cur_reps * 4);
                increased = true;
            }
            BenchPoint pt;
            pt.n = n;
            pt.method = to_string(spec.method);
            pt.median_seconds = median_of(times);
            pt.min_seconds = *std::min_element(times.begin(), times.end());
            pt.max_seconds = *std::max_element(times.begin(), times.end());
            pt.reps = cur_reps;
            pt.reps_increased = increased;
            out.points.push_back(pt);
            log_n.push_back(std::log(static_cast<double>(n)));
            log_t.push_back(std::log(std::max(pt.median_seconds, 1e-9)));
        }
        double mean_x = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            mean_x += log_n[i];
            mean_y += log_t[i];
        }
        mean_x /= static_cast<double>(log_n.size());
        mean_y /= static_cast<double>(log_n.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxy += (log_n[i] - mean_x) * (log_t[i] - mean_y);
            sxx += (log_n[i] - mean_x) * (log_n[i] - mean_x);
        }
        out.slopes.emplace_back(to_string(spec.method), sxx > 0.0 ? sxy / sxx : 0.0);
    }
    return out;
}

CriterionCurve criterion_curve(const ProblemConfig& problem, Index n, Index grid_points,
                               double lo, double hi, double sigma2, std::uint64_t seed,
                               double gamma) {
    if (grid_points < 2) throw input_error("criterion_curve: need at least 2 grid points");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi <= lo)
        throw input_error("criterion_curve: need lo < hi");
    if (!std::isfinite(sigma2) || sigma2 <= 0.0)
        throw input_error("criterion_curve: sigma2 must be positive");
    const std::unique_ptr<Problem> prob = make_problem(problem);
    if (prob->dim() != 1)
        throw input_error("criterion_curve: requires a one-dimensional problem");
    const Problem::Triple data = prob->draw(n, derive_seed(seed, kStreamDraw));
    const DensityModel* p = prob->model_p();
    const DensityModel* q = prob->model_q();
    const GaussianKernel k(sigma2);

    CriterionCurve out;
    out.sigma2 = sigma2;
    out.grid.resize(grid_points);
    out.ume.resize(grid_points);
    out.fssd.resize(grid_points);
    for (Index i = 0; i < grid_points; ++i) {
        const double v =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        Matrix V(1, 1);
        V(0, 0) = v;
        out.grid(i) = v;
        out.ume(i) = ume_power_criterion(k, k, V, V, data.x, data.y, data.z, gamma);
        out.fssd(i) = (p != nullptr && q != nullptr)
                          ? fssd_power_criterion(k, k, *p, *q, V, V, data.z, gamma)
                          : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("write_csv: cannot open " + path);
    out << "x,method,value,ci_low,ci_high\n" << std::setprecision(17);
    for (const CsvRow& r : rows)
        out << r.x << ',' << r.method << ',' << r.value << ',' << r.ci_low << ',' << r.ci_high
            << '\n';
    out.flush();
    if (!out) throw io_error("write_csv: write failed for " + path);
}

void save_trials_json(const std::string& path, const ProblemConfig& problem,
                      const MethodSpec& spec, Index trials, std::uint64_t seed_base,
                      const TrialsResult& result) {
    nlohmann::json j;
    j["config"]["problem"] = problem_json(problem);
    j["config"]["method"] = method_json(spec);
    j["config"]["trials"] = trials;
    j["config"]["seed"] = seed_base;
    j["summary"] = {{"trials", result.summary.trials},
                    {"failures", result.summary.failures},
                    {"rejection_rate", result.summary.rejection_rate},
                    {"ci_low", result.summary.ci_low},
                    {"ci_high", result.summary.ci_high}};
    nlohmann::json recs = nlohmann::json::array();
    for (const TrialRecord& r : result.records) {
        nlohmann::json jr;
        jr["trial_index"] = r.trial_index;
        jr["method"] = r.method;
        jr["stat"] = r.stat;
        jr["threshold"] = r.threshold;
        jr["p_value"] = r.p_value;
        jr["reject"] = r.reject;
        jr["degenerate"] = r.degenerate;
        jr["failed"] = r.failed;
        jr["error"] = r.error;
        jr["wall_time_seconds"] = r.wall_time_seconds;
        recs.push_back(std::move(jr));
    }
    j["records"] = std::move(recs);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("save_trials_json: cannot open " + path);
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw io_error("save_trials_json: write failed for " + path);
}

}  // namespace relfit
