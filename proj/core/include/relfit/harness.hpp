#pragma once

#include "relfit/models.hpp"
#include "relfit/tuning.hpp"
#include "relfit/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace relfit {

enum class ProblemKind { mean_shift, blobs, rbm, mixture1d, external };
enum class Method { rel_ume_random, rel_ume_opt, rel_fssd_opt, rel_mmd_median };

std::string to_string(ProblemKind kind);
std::string to_string(Method method);
ProblemKind parse_problem_kind(const std::string& name);
Method parse_method(const std::string& name);

struct ProblemConfig {
    ProblemKind kind = ProblemKind::mean_shift;
    Index n = 2000;      // default sample size per trial
    Index dim = 0;       // 0 = per-kind default (mean_shift 50, blobs 2, rbm 20, mixture1d 1)
    Index rbm_hidden = 5;
    double epsilon = 0.3;  // rbm only: coupling perturbation of the first model
    double mix = 0.5;      // mixture1d only: reference weight on the first component
    GibbsConfig gibbs;     // rbm only
    std::uint64_t seed_problem = 101;  // problem-level randomness, fixed across trials
    std::string path_x, path_y, path_z;  // external only
};

// A data-generating triple (model P sample X, model Q sample Y, reference
// sample Z). Draws are deterministic per seed; problem-level parameters are
// fixed at construction. model_p/model_q are null when no tractable density
// exists (external data).
class Problem {
  public:
    virtual ~Problem() = default;
    struct Triple {
        Matrix x, y, z;
    };
    virtual Triple draw(Index n, std::uint64_t seed) const = 0;
    virtual Index dim() const = 0;
    virtual const DensityModel* model_p() const { return nullptr; }
    virtual const DensityModel* model_q() const { return nullptr; }
};

std::unique_ptr<Problem> make_problem(const ProblemConfig& cfg);

struct MethodSpec {
    Method method = Method::rel_ume_opt;
    Index J = 5;
    double alpha = 0.05;
    double train_fraction = config::kDefaultTrainFraction;
    double gamma = config::kDefaultGamma;
    int max_iters = 200;      // optimizer proposal budget
    double step_size = 1.0;   // optimizer initial step
};

struct TrialRecord {
    Index trial_index = 0;
    std::string method;
    double stat = 0.0;
    double threshold = 0.0;
    double p_value = 1.0;
    bool reject = false;
    bool degenerate = false;
    bool failed = false;  // pipeline threw; see error
    std::string error;
    double wall_time_seconds = 0.0;
};

// Runs one method pipeline on an already-drawn triple: train/test split and
// parameter selection for the optimized methods, pooled median bandwidth for
// the MMD baseline, then the test itself. Wall time covers this statistic
// pipeline only, never data generation. The seed drives the split and the
// optimizer initialization.
TrialRecord run_method_on_triple(const Problem& problem, const Problem::Triple& data,
                                 const MethodSpec& spec, std::uint64_t seed,
                                 Index trial_index = 0);

struct TrialsSummary {
    Index trials = 0;
    Index failures = 0;
    double rejection_rate = 0.0;  // over completed trials
    double ci_low = 0.0;          // 95% binomial (Wilson)
    double ci_high = 0.0;
};

struct TrialsResult {
    TrialsSummary summary;
    std::vector<TrialRecord> records;  // ordered by trial_index
};

// Reads the RELFIT_WORKERS environment variable when requested <= 0;
// defaults to 1.
int resolve_workers(int requested);

// Fresh samples every trial; trial i derives all of its randomness from
// seed_base + i. Per-trial failures are recorded, not fatal. workers <= 0
// defers to RELFIT_WORKERS.
TrialsResult run_trials(const ProblemConfig& problem, const MethodSpec& spec, Index trials,
                        std::uint64_t seed_base, int workers = 0);

struct BenchPoint {
    Index n = 0;
    std::string method;
    double median_seconds = 0.0;
    double min_seconds = 0.0;
    double max_seconds = 0.0;
    int reps = 0;
    bool reps_increased = false;  // coarse timer forced extra reps
};

struct BenchResult {
    std::vector<BenchPoint> points;
    std::vector<std::pair<std::string, double>> slopes;  // log-time vs log-n per method
};

// Times the statistic pipeline per method across the sample-size grid.
BenchResult runtime_bench(const ProblemConfig& problem, const std::vector<MethodSpec>& methods,
                          const std::vector<Index>& n_grid, int reps, std::uint64_t seed_base);

struct CriterionCurve {
    Vector grid;   // test-location coordinate
    Vector ume;    // power criterion of the location-difference test (J = 1)
    Vector fssd;   // power criterion of the score-based test (J = 1)
    double sigma2 = 1.0;
};

// One-dimensional power-criterion landscape: draws a single triple of size n
// from the problem and sweeps one shared test location across [lo, hi].
CriterionCurve criterion_curve(const ProblemConfig& problem, Index n, Index grid_points,
                               double lo, double hi, double sigma2, std::uint64_t seed,
                               double gamma = config::kDefaultGamma);

// Figure-file contract: CSV with columns (x, method, value, ci_low, ci_high).
struct CsvRow {
    double x = 0.0;
    std::string method;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

// JSON result file: full configuration echo plus every trial record.
void save_trials_json(const std::string& path, const ProblemConfig& problem,
                      const MethodSpec& spec, Index trials, std::uint64_t seed_base,
                      const TrialsResult& result);

}  // namespace relfit
