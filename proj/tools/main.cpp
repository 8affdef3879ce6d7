// Command-line runner for the relative goodness-of-fit test suite:
//   trials          rejection-rate studies over fresh sample draws
//   bench           wall-time scaling of the statistic pipelines
//   criterion-curve 1-D power-criterion landscapes
//   pool-score      per-location power criterion over a candidate pool
//   greedy          greedy location selection by the power criterion
#include "relfit/error.hpp"
#include "relfit/harness.hpp"
#include "relfit/matrix_io.hpp"
#include "relfit/rng.hpp"
#include "relfit/tuning.hpp"

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <iostream>
#include <string>
#include <vector>

using namespace relfit;
using nlohmann::json;

namespace {

struct ProblemOpts {
    std::string problem = "mean_shift";
    Index dim = 0;
    Index rbm_hidden = 5;
    double mix = 0.5;
    std::uint64_t seed_problem = 101;
    Index gibbs_burn_in = 2000;
    Index gibbs_thinning = 1;
    std::string path_x, path_y, path_z;
};

void add_problem_options(CLI::App* cmd, ProblemOpts& o) {
    cmd->add_option("--problem", o.problem,
                    "Problem preset: mean_shift, blobs, rbm, mixture1d, external")
        ->capture_default_str();
    cmd->add_option("--dim", o.dim, "Data dimension (0 = preset default)")->capture_default_str();
    cmd->add_option("--rbm-hidden", o.rbm_hidden, "Hidden units (rbm)")->capture_default_str();
    cmd->add_option("--mix", o.mix, "Reference mixing weight (mixture1d)")->capture_default_str();
    cmd->add_option("--seed-problem", o.seed_problem, "Problem-level seed (rbm parameters)")
        ->capture_default_str();
    cmd->add_option("--gibbs-burn-in", o.gibbs_burn_in, "Gibbs burn-in sweeps (rbm)")
        ->capture_default_str();
    cmd->add_option("--gibbs-thinning", o.gibbs_thinning, "Gibbs thinning (rbm)")
        ->capture_default_str();
    cmd->add_option("--x", o.path_x, "Matrix file with the first model's sample (external)");
    cmd->add_option("--y", o.path_y, "Matrix file with the second model's sample (external)");
    cmd->add_option("--z", o.path_z, "Matrix file with the reference sample (external)");
}

ProblemConfig to_problem_config(const ProblemOpts& o, Index n, double epsilon) {
    ProblemConfig pc;
    pc.kind = parse_problem_kind(o.problem);
    pc.n = n;
    pc.dim = o.dim;
    pc.rbm_hidden = o.rbm_hidden;
    pc.epsilon = epsilon;
    pc.mix = o.mix;
    pc.gibbs.burn_in = o.gibbs_burn_in;
    pc.gibbs.thinning = o.gibbs_thinning;
    pc.seed_problem = o.seed_problem;
    pc.path_x = o.path_x;
    pc.path_y = o.path_y;
    pc.path_z = o.path_z;
    return pc;
}

json problem_opts_json(const ProblemOpts& o) {
    return json{{"problem", o.problem},
                {"dim", o.dim},
                {"rbm_hidden", o.rbm_hidden},
                {"mix", o.mix},
                {"seed_problem", o.seed_problem},
                {"gibbs_burn_in", o.gibbs_burn_in},
                {"gibbs_thinning", o.gibbs_thinning},
                {"path_x", o.path_x},
                {"path_y", o.path_y},
                {"path_z", o.path_z}};
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open " + path);
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw io_error("write failed for " + path);
}

// ---------------------------------------------------------------- trials ---

struct TrialsOpts {
    ProblemOpts prob;
    std::vector<std::string> methods{"rel_ume_opt"};
    std::vector<Index> ns{2000};
    std::vector<double> epsilons;  // empty = single default 0.3
    Index J = 5;
    double alpha = 0.05;
    Index trials = 300;
    std::uint64_t seed = 0;
    double train_frac = config::kDefaultTrainFraction;
    double gamma = config::kDefaultGamma;
    int max_iters = 200;
    double step_size = 1.0;
    int workers = 0;
    std::string out, csv;
};

void run_trials_cmd(const TrialsOpts& o) {
    const std::vector<double> epsilons = o.epsilons.empty() ? std::vector<double>{0.3}
                                                            : o.epsilons;
    if (o.methods.empty() || o.ns.empty()) throw input_error("trials: empty method or n list");
    const bool eps_axis = epsilons.size() > 1;
    const std::size_t combos = o.methods.size() * o.ns.size() * epsilons.size();

    std::vector<CsvRow> rows;
    json runs = json::array();
    for (const double eps : epsilons) {
        for (const Index n : o.ns) {
            for (const std::string& m : o.methods) {
                MethodSpec spec;
                spec.method = parse_method(m);
                spec.J = o.J;
                spec.alpha = o.alpha;
                spec.train_fraction = o.train_frac;
                spec.gamma = o.gamma;
                spec.max_iters = o.max_iters;
                spec.step_size = o.step_size;
                const ProblemConfig pc = to_problem_config(o.prob, n, eps);
                const TrialsResult res = run_trials(pc, spec, o.trials, o.seed, o.workers);
                const TrialsSummary& s = res.summary;
                std::cout << "[trials] problem=" << o.prob.problem << " method=" << m
                          << " n=" << n << " epsilon=" << eps << " trials=" << s.trials
                          << " reject_rate=" << s.rejection_rate << " ci=[" << s.ci_low << ","
                          << s.ci_high << "] failures=" << s.failures << '\n';
                rows.push_back({eps_axis ? eps : static_cast<double>(n), m, s.rejection_rate,
                                s.ci_low, s.ci_high});
                if (combos == 1 && !o.out.empty()) {
                    save_trials_json(o.out, pc, spec, o.trials, o.seed, res);
                } else if (!o.out.empty()) {
                    json run;
                    run["problem"] = problem_opts_json(o.prob);
                    run["problem"]["n"] = n;
                    run["problem"]["epsilon"] = eps;
                    run["method"] = m;
                    run["J"] = o.J;
                    run["alpha"] = o.alpha;
                    run["trials"] = s.trials;
                    run["seed"] = o.seed;
                    run["summary"] = {{"rejection_rate", s.rejection_rate},
                                      {"ci_low", s.ci_low},
                                      {"ci_high", s.ci_high},
                                      {"failures", s.failures}};
                    runs.push_back(std::move(run));
                }
            }
        }
    }
    if (combos > 1 && !o.out.empty()) write_json_file(o.out, json{{"runs", runs}});
    if (!o.csv.empty()) {
        write_csv(o.csv, rows);
        std::cout << "[trials] wrote " << rows.size() << " rows to " << o.csv << '\n';
    }
}

// ----------------------------------------------------------------- bench ---

struct BenchOpts {
    ProblemOpts prob;
    std::vector<std::string> methods{"rel_ume_opt", "rel_mmd_median"};
    std::vector<Index> ns{1000, 2000, 4000, 8000};
    Index J = 5;
    double alpha = 0.05;
    double epsilon = 0.3;
    int reps = 5;
    std::uint64_t seed = 0;
    double train_frac = config::kDefaultTrainFraction;
    double gamma = config::kDefaultGamma;
    int max_iters = 200;
    double step_size = 1.0;
    std::string out, csv;
};

void run_bench_cmd(const BenchOpts& o) {
    std::vector<MethodSpec> specs;
    for (const std::string& m : o.methods) {
        MethodSpec spec;
        spec.method = parse_method(m);
        spec.J = o.J;
        spec.alpha = o.alpha;
        spec.train_fraction = o.train_frac;
        spec.gamma = o.gamma;
        spec.max_iters = o.max_iters;
        spec.step_size = o.step_size;
        specs.push_back(spec);
    }
    const ProblemConfig pc = to_problem_config(o.prob, o.ns.back(), o.epsilon);
    const BenchResult res = runtime_bench(pc, specs, o.ns, o.reps, o.seed);

    std::vector<CsvRow> rows;
    for (const BenchPoint& p : res.points) {
        std::cout << "[bench] method=" << p.method << " n=" << p.n
                  << " median_s=" << p.median_seconds << " reps=" << p.reps
                  << (p.reps_increased ? " (reps auto-increased for timer resolution)" : "")
                  << '\n';
        rows.push_back({static_cast<double>(p.n), p.method, p.median_seconds, p.min_seconds,
                        p.max_seconds});
    }
    for (const auto& [method, slope] : res.slopes)
        std::cout << "[bench] slope method=" << method << " loglog=" << slope << '\n';

    if (!o.out.empty()) {
        json j;
        j["config"] = {{"problem", problem_opts_json(o.prob)},
                       {"methods", o.methods},
                       {"n_grid", o.ns},
                       {"J", o.J},
                       {"reps", o.reps},
                       {"seed", o.seed}};
        json pts = json::array();
        for (const BenchPoint& p : res.points)
            pts.push_back({{"method", p.method},
                           {"n", p.n},
                           {"median_seconds", p.median_seconds},
                           {"min_seconds", p.min_seconds},
                           {"max_seconds", p.max_seconds},
                           {"reps", p.reps},
                           {"reps_increased", p.reps_increased}});
        j["points"] = std::move(pts);
        json slopes = json::object();
        for (const auto& [method, slope] : res.slopes) slopes[method] = slope;
        j["slopes"] = std::move(slopes);
        write_json_file(o.out, j);
    }
    if (!o.csv.empty()) write_csv(o.csv, rows);
}

// ------------------------------------------------------- criterion-curve ---

struct CurveOpts {
    ProblemOpts prob{.problem = "mixture1d"};
    Index n = 20000;
    Index grid = 200;
    double lo = -6.0;
    double hi = 6.0;
    double sigma2 = 1.0;
    double gamma = config::kDefaultGamma;
    std::uint64_t seed = 0;
    std::string out, csv;
};

void run_curve_cmd(const CurveOpts& o) {
    const ProblemConfig pc = to_problem_config(o.prob, o.n, 0.3);
    const CriterionCurve curve =
        criterion_curve(pc, o.n, o.grid, o.lo, o.hi, o.sigma2, o.seed, o.gamma);

    std::vector<CsvRow> rows;
    for (Index i = 0; i < curve.grid.size(); ++i) {
        rows.push_back({curve.grid(i), "rel_ume", curve.ume(i), curve.ume(i), curve.ume(i)});
        rows.push_back({curve.grid(i), "rel_fssd", curve.fssd(i), curve.fssd(i), curve.fssd(i)});
    }
    std::cout << "[criterion-curve] problem=" << o.prob.problem << " mix=" << o.prob.mix
              << " n=" << o.n << " points=" << o.grid << " sigma2=" << curve.sigma2 << '\n';
    if (!o.csv.empty()) {
        write_csv(o.csv, rows);
        std::cout << "[criterion-curve] wrote " << rows.size() << " rows to " << o.csv << '\n';
    }
    if (!o.out.empty()) {
        json j;
        j["config"] = {{"problem", problem_opts_json(o.prob)}, {"n", o.n},   {"grid", o.grid},
                       {"lo", o.lo},                           {"hi", o.hi}, {"sigma2", o.sigma2},
                       {"gamma", o.gamma},                     {"seed", o.seed}};
        j["grid"] = std::vector<double>(curve.grid.data(), curve.grid.data() + curve.grid.size());
        j["ume"] = std::vector<double>(curve.ume.data(), curve.ume.data() + curve.ume.size());
        j["fssd"] =
            std::vector<double>(curve.fssd.data(), curve.fssd.data() + curve.fssd.size());
        write_json_file(o.out, j);
    }
}

// ------------------------------------------------- pool-score and greedy ---

struct PoolOpts {
    ProblemOpts prob{.problem = "mixture1d"};
    Index n = 2000;
    std::string method = "rel_ume_opt";
    std::string pool_path;
    Index grid = 0;  // 1-D alternative to --pool
    double lo = -6.0;
    double hi = 6.0;
    double sigma2 = 0.0;  // 0 = median heuristic
    double gamma = config::kDefaultGamma;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    Index J = 5;                    // greedy only
    std::string direction = "max";  // greedy only
    std::string out, csv;
};

void add_pool_options(CLI::App* cmd, PoolOpts& o) {
    add_problem_options(cmd, o.prob);
    cmd->add_option("--n", o.n, "Sample size drawn from the problem")->capture_default_str();
    cmd->add_option("--method", o.method,
                    "Statistic family: rel_ume_random/rel_ume_opt (location-difference) or "
                    "rel_fssd_opt (score-based)")
        ->capture_default_str();
    cmd->add_option("--pool", o.pool_path, "Matrix file with candidate locations (rows)");
    cmd->add_option("--grid", o.grid, "Generate a 1-D candidate grid of this many points");
    cmd->add_option("--lo", o.lo, "Grid lower bound")->capture_default_str();
    cmd->add_option("--hi", o.hi, "Grid upper bound")->capture_default_str();
    cmd->add_option("--sigma2", o.sigma2, "Kernel bandwidth (0 = median heuristic)")
        ->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "Power-criterion regularizer")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Level of the reported confirmation test")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed for data draw and bandwidth subsampling")
        ->capture_default_str();
}

struct PoolContext {
    std::unique_ptr<Problem> problem;
    Problem::Triple data;
    Matrix pool;
    double sigma2 = 0.0;
    bool use_fssd = false;
};

PoolContext build_pool_context(const PoolOpts& o) {
    PoolContext ctx;
    const ProblemConfig pc = to_problem_config(o.prob, o.n, 0.3);
    ctx.problem = make_problem(pc);
    if (pc.kind != ProblemKind::external && o.n < 4)
        throw input_error("pool-score/greedy: n must be >= 4");
    ctx.data = ctx.problem->draw(pc.kind == ProblemKind::external ? 0 : o.n,
                                 derive_seed(o.seed, /*stream=*/0x64726177ULL));

    if (!o.pool_path.empty()) {
        ctx.pool = load_matrix(o.pool_path);
        if (ctx.pool.cols() != ctx.problem->dim())
            throw input_error("pool has " + std::to_string(ctx.pool.cols()) +
                              " columns but the data has " +
                              std::to_string(ctx.problem->dim()));
    } else if (o.grid >= 2) {
        if (ctx.problem->dim() != 1)
            throw input_error("--grid requires a one-dimensional problem; use --pool");
        ctx.pool.resize(o.grid, 1);
        for (Index i = 0; i < o.grid; ++i)
            ctx.pool(i, 0) =
                o.lo + (o.hi - o.lo) * static_cast<double>(i) / static_cast<double>(o.grid - 1);
    } else {
        throw input_error("provide --pool <file> or --grid <points>");
    }

    const Method method = parse_method(o.method);
    if (method == Method::rel_mmd_median)
        throw input_error("pool scoring needs a location-based statistic, not rel_mmd_median");
    ctx.use_fssd = (method == Method::rel_fssd_opt);
    if (ctx.use_fssd &&
        (ctx.problem->model_p() == nullptr || ctx.problem->model_q() == nullptr))
        throw input_error("rel_fssd_opt pool scoring needs problem densities");

    ctx.sigma2 = o.sigma2;
    if (ctx.sigma2 <= 0.0) {
        const std::uint64_t bw_seed = derive_seed(o.seed, /*stream=*/0x62616e64ULL);
        if (ctx.use_fssd) {
            const double med = median_heuristic_subsampled(ctx.data.z, 2000, bw_seed);
            ctx.sigma2 = med * med;
        } else {
            ctx.sigma2 =
                init_bandwidth_subsampled(ctx.data.x, ctx.data.y, ctx.data.z, 2000, bw_seed);
        }
    }
    return ctx;
}

StatVarFn pool_stat_fn(const PoolContext& ctx, const GaussianKernel& k) {
    if (ctx.use_fssd)
        return make_fssd_context(k, *ctx.problem->model_p(), *ctx.problem->model_q(),
                                 ctx.data.z);
    return make_ume_context(k, ctx.data.x, ctx.data.y, ctx.data.z);
}

TestResult confirmation_test(const PoolContext& ctx, const GaussianKernel& k, const Matrix& V,
                             double alpha) {
    if (ctx.use_fssd)
        return rel_fssd_test(k, k, *ctx.problem->model_p(), *ctx.problem->model_q(), V, V,
                             ctx.data.z, alpha);
    return rel_ume_test(k, k, V, V, ctx.data.x, ctx.data.y, ctx.data.z, alpha);
}

void run_pool_score_cmd(const PoolOpts& o) {
    const PoolContext ctx = build_pool_context(o);
    const GaussianKernel k(ctx.sigma2);
    const StatVarFn fn = pool_stat_fn(ctx, k);
    const PoolScores scores = score_candidate_pool(ctx.pool, fn, o.gamma);

    Index best = 0;
    for (Index i = 1; i < scores.scores.size(); ++i)
        if (scores.scores(i) > scores.scores(best)) best = i;
    const TestResult confirm = confirmation_test(ctx, k, ctx.pool.row(best), o.alpha);

    std::cout << "[pool-score] scored " << ctx.pool.rows() << " candidates, sigma2=" << ctx.sigma2
              << " best_index=" << best << " best_score=" << scores.scores(best)
              << " test_rejected=" << (confirm.reject ? "true" : "false") << '\n';
    if (!confirm.reject)
        std::cout << "[pool-score] note: the confirmation test did not reject; location scores"
                     " may not be interpretable\n";

    if (!o.csv.empty()) {
        std::vector<CsvRow> rows;
        for (Index i = 0; i < scores.scores.size(); ++i)
            rows.push_back({static_cast<double>(i), o.method, scores.scores(i),
                            scores.scores(i), scores.scores(i)});
        write_csv(o.csv, rows);
    }
    if (!o.out.empty()) {
        std::vector<Index> order(static_cast<std::size_t>(scores.scores.size()));
        std::iota(order.begin(), order.end(), Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Index a, Index b) { return scores.scores(a) > scores.scores(b); });
        json j;
        j["config"] = {{"problem", problem_opts_json(o.prob)}, {"n", o.n},
                       {"method", o.method},                   {"sigma2", ctx.sigma2},
                       {"gamma", o.gamma},                     {"alpha", o.alpha},
                       {"seed", o.seed}};
        j["scores"] = std::vector<double>(scores.scores.data(),
                                          scores.scores.data() + scores.scores.size());
        j["degenerate"] = scores.degenerate;
        j["ranking_desc"] = order;
        j["best_index"] = best;
        j["test_rejected"] = confirm.reject;
        write_json_file(o.out, j);
    }
}

void run_greedy_cmd(const PoolOpts& o) {
    const PoolContext ctx = build_pool_context(o);
    const GaussianKernel k(ctx.sigma2);
    const StatVarFn fn = pool_stat_fn(ctx, k);
    const GreedyDirection dir = o.direction == "max"   ? GreedyDirection::maximize
                                : o.direction == "min" ? GreedyDirection::minimize
                                : throw input_error("greedy: --direction must be max or min");
    const GreedyResult res = greedy_select(ctx.pool, o.J, dir, fn, o.gamma);

    bool rejected = false;
    if (!res.selected.empty())
        rejected = confirmation_test(ctx, k, res.V, o.alpha).reject;

    std::cout << "[greedy] direction=" << o.direction << " selected=" << res.selected.size()
              << "/" << o.J << (res.exhausted ? " (pool exhausted)" : "")
              << " sigma2=" << ctx.sigma2 << " test_rejected=" << (rejected ? "true" : "false")
              << '\n';
    for (std::size_t i = 0; i < res.selected.size(); ++i) {
        std::cout << "[greedy] pick " << i + 1 << ": pool_index=" << res.selected[i]
                  << " criterion=" << res.criterion_path[i];
        if (ctx.pool.cols() <= 4) {
            std::cout << " location=(";
            for (Index c = 0; c < ctx.pool.cols(); ++c)
                std::cout << (c > 0 ? "," : "") << ctx.pool(res.selected[i], c);
            std::cout << ')';
        }
        std::cout << '\n';
    }
    if (!rejected)
        std::cout << "[greedy] note: the confirmation test did not reject; selected locations"
                     " may not be interpretable\n";

    if (!o.csv.empty()) {
        std::vector<CsvRow> rows;
        for (std::size_t i = 0; i < res.selected.size(); ++i)
            rows.push_back({static_cast<double>(i + 1), o.method, res.criterion_path[i],
                            res.criterion_path[i], res.criterion_path[i]});
        write_csv(o.csv, rows);
    }
    if (!o.out.empty()) {
        json j;
        j["config"] = {{"problem", problem_opts_json(o.prob)},
                       {"n", o.n},
                       {"method", o.method},
                       {"sigma2", ctx.sigma2},
                       {"gamma", o.gamma},
                       {"alpha", o.alpha},
                       {"seed", o.seed},
                       {"J", o.J},
                       {"direction", o.direction}};
        j["selected"] = res.selected;
        json locs = json::array();
        for (Index r = 0; r < res.V.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(res.V.cols()));
            for (Index c = 0; c < res.V.cols(); ++c) row[static_cast<std::size_t>(c)] = res.V(r, c);
            locs.push_back(row);
        }
        j["locations"] = std::move(locs);
        j["criterion_path"] = res.criterion_path;
        j["exhausted"] = res.exhausted;
        j["test_rejected"] = rejected;
        write_json_file(o.out, j);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-time relative goodness-of-fit tests"};
    app.require_subcommand(1);

    TrialsOpts trials_opts;
    auto* trials_cmd =
        app.add_subcommand("trials", "Rejection rates over repeated trials");
    add_problem_options(trials_cmd, trials_opts.prob);
    trials_cmd->add_option("--method", trials_opts.methods, "Methods (comma-separated)")
        ->delimiter(',')
        ->capture_default_str();
    trials_cmd->add_option("--n", trials_opts.ns, "Sample sizes (comma-separated)")
        ->delimiter(',')
        ->capture_default_str();
    trials_cmd
        ->add_option("--epsilon", trials_opts.epsilons,
                     "RBM perturbations (comma-separated; grid x-axis when multiple)")
        ->delimiter(',');
    trials_cmd->add_option("--J", trials_opts.J, "Number of test locations")
        ->capture_default_str();
    trials_cmd->add_option("--alpha", trials_opts.alpha, "Test level")->capture_default_str();
    trials_cmd->add_option("--trials", trials_opts.trials, "Trials per configuration")
        ->capture_default_str();
    trials_cmd->add_option("--seed", trials_opts.seed, "Base seed (trial i uses seed + i)")
        ->capture_default_str();
    trials_cmd
        ->add_option("--train-frac", trials_opts.train_frac,
                     "Fraction of rows held out for parameter tuning")
        ->capture_default_str();
    trials_cmd->add_option("--gamma", trials_opts.gamma, "Power-criterion regularizer")
        ->capture_default_str();
    trials_cmd->add_option("--max-iters", trials_opts.max_iters, "Optimizer proposal budget")
        ->capture_default_str();
    trials_cmd->add_option("--step-size", trials_opts.step_size, "Optimizer initial step")
        ->capture_default_str();
    trials_cmd
        ->add_option("--workers", trials_opts.workers,
                     "Worker threads (0 = RELFIT_WORKERS env or 1)")
        ->capture_default_str();
    trials_cmd->add_option("--out", trials_opts.out, "JSON result file");
    trials_cmd->add_option("--csv", trials_opts.csv, "CSV summary (x,method,value,ci)");
    trials_cmd->callback([&] { run_trials_cmd(trials_opts); });

    BenchOpts bench_opts;
    auto* bench_cmd = app.add_subcommand("bench", "Wall-time scaling of the test pipelines");
    add_problem_options(bench_cmd, bench_opts.prob);
    bench_cmd->add_option("--method", bench_opts.methods, "Methods (comma-separated)")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--n", bench_opts.ns, "Sample-size grid (comma-separated, increasing)")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--J", bench_opts.J, "Number of test locations")->capture_default_str();
    bench_cmd->add_option("--alpha", bench_opts.alpha, "Test level")->capture_default_str();
    bench_cmd->add_option("--epsilon", bench_opts.epsilon, "RBM perturbation")
        ->capture_default_str();
    bench_cmd->add_option("--reps", bench_opts.reps, "Repetitions per point (median reported)")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench_opts.seed, "Base seed")->capture_default_str();
    bench_cmd->add_option("--train-frac", bench_opts.train_frac, "Training fraction")
        ->capture_default_str();
    bench_cmd->add_option("--gamma", bench_opts.gamma, "Power-criterion regularizer")
        ->capture_default_str();
    bench_cmd->add_option("--max-iters", bench_opts.max_iters, "Optimizer proposal budget")
        ->capture_default_str();
    bench_cmd->add_option("--step-size", bench_opts.step_size, "Optimizer initial step")
        ->capture_default_str();
    bench_cmd->add_option("--out", bench_opts.out, "JSON result file");
    bench_cmd->add_option("--csv", bench_opts.csv, "CSV summary (x,method,value,ci)");
    bench_cmd->callback([&] { run_bench_cmd(bench_opts); });

    CurveOpts curve_opts;
    auto* curve_cmd =
        app.add_subcommand("criterion-curve", "1-D power-criterion landscape");
    add_problem_options(curve_cmd, curve_opts.prob);
    curve_cmd->add_option("--n", curve_opts.n, "Sample size")->capture_default_str();
    curve_cmd->add_option("--grid", curve_opts.grid, "Grid points")->capture_default_str();
    curve_cmd->add_option("--lo", curve_opts.lo, "Grid lower bound")->capture_default_str();
    curve_cmd->add_option("--hi", curve_opts.hi, "Grid upper bound")->capture_default_str();
    curve_cmd->add_option("--sigma2", curve_opts.sigma2, "Kernel bandwidth")
        ->capture_default_str();
    curve_cmd->add_option("--gamma", curve_opts.gamma, "Power-criterion regularizer")
        ->capture_default_str();
    curve_cmd->add_option("--seed", curve_opts.seed, "Data seed")->capture_default_str();
    curve_cmd->add_option("--out", curve_opts.out, "JSON result file");
    curve_cmd->add_option("--csv", curve_opts.csv, "CSV curve (x,method,value,ci)");
    curve_cmd->callback([&] { run_curve_cmd(curve_opts); });

    PoolOpts pool_opts;
    auto* pool_cmd =
        app.add_subcommand("pool-score", "Power criterion of each candidate location");
    add_pool_options(pool_cmd, pool_opts);
    pool_cmd->add_option("--out", pool_opts.out, "JSON result file");
    pool_cmd->add_option("--csv", pool_opts.csv, "CSV scores (x,method,value,ci)");
    pool_cmd->callback([&] { run_pool_score_cmd(pool_opts); });

    PoolOpts greedy_opts;
    auto* greedy_cmd =
        app.add_subcommand("greedy", "Greedy location selection by the power criterion");
    add_pool_options(greedy_cmd, greedy_opts);
    greedy_cmd->add_option("--J", greedy_opts.J, "Locations to select")->capture_default_str();
    greedy_cmd->add_option("--direction", greedy_opts.direction, "max or min")
        ->capture_default_str();
    greedy_cmd->add_option("--out", greedy_opts.out, "JSON result file");
    greedy_cmd->add_option("--csv", greedy_opts.csv, "CSV criterion path (x,method,value,ci)");
    greedy_cmd->callback([&] { run_greedy_cmd(greedy_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
