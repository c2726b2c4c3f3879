// experiments.hpp — Seeded, reproducible statistical studies over random
// state pairs: performance vs dimension, iteration-count scaling, multistart
// percentile studies, and perturbation stability.  Trials are independent
// (seeds derived per trial) and distributed over a worker pool; records are
// canonicalized by trial index so parallel and serial runs emit identical
// files.

#pragma once

#include "brachisto/solver.hpp"

#include <filesystem>
#include <map>
#include <span>

namespace brachisto {

// ---------------------------------- plans -----------------------------------

enum class Ensemble { haar_pure, bures_mixed };
enum class SigmaMode { rotate, independent_project };

struct ExperimentPlan {
    std::vector<int> dims;
    int samples_per_dim = 100;
    double epsilon = 1e-2;
    Ensemble ensemble = Ensemble::bures_mixed;
    SigmaMode sigma_mode = SigmaMode::rotate;
    RngSeed base_seed;
    // Solver overrides; phases default to an independent uniform draw per trial.
    SignConvention sign = SignConvention::plus;
    MaskSide side = MaskSide::initial;
    int max_iterations = 0;
    int jobs = 1;

    void validate() const;
};

struct ExperimentRecord {
    int dim = 0;
    int trial = 0;
    std::uint64_t seed = 0;  // digest of the trial's derived stream
    int iterations = 0;
    bool converged = false;
    double time_ratio = 0.0;
    double efficiency_star = 0.0;
    double wall_time_seconds = 0.0;  // in-memory only; never persisted
};

// ------------------------------ statistics -----------------------------------

double mean_of(std::span<const double> xs);
double percentile_of(std::vector<double> xs, double p);  // p in [0, 100]

struct BootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap CI for the mean; deterministic given the stream.
BootstrapCi bootstrap_ci_mean(std::span<const double> xs, double level, int resamples,
                              RngStream& rng);

double spearman_rho(std::span<const double> x, std::span<const double> y);
// One-sided permutation p-value for positive association; deterministic.
double spearman_perm_pvalue(std::span<const double> x, std::span<const double> y,
                            int permutations, RngStream& rng);

// --------------------------------- sweeps ------------------------------------

struct DimSummary {
    int dim = 0;
    int samples = 0;
    int converged = 0;
    int excluded_ratios = 0;  // non-finite time ratios (degenerate bounds)
    double mean_ratio = 0.0;
    double median_ratio = 0.0;
    BootstrapCi ci90;
    BootstrapCi ci99;
    double mean_iterations = 0.0;
};

struct PerformanceResult {
    ExperimentPlan plan;
    std::vector<ExperimentRecord> records;
    std::vector<DimSummary> summaries;
};

// Solves one sampled problem per (dim, trial); reproducible from the plan and
// trial index alone.
ExperimentRecord run_single_trial(const ExperimentPlan& plan, int dim, int trial);

PerformanceResult run_performance_sweep(const ExperimentPlan& plan);

struct LogFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

struct IterationResult {
    ExperimentPlan plan;
    std::vector<ExperimentRecord> records;
    std::vector<DimSummary> summaries;
    std::vector<std::map<int, int>> histograms;  // per dim: n -> count
    LogFit fit;           // mean iterations vs ln(dim)
    bool nondecreasing_95 = false;  // one-sided bootstrap test across adjacent dims
};

IterationResult run_iteration_sweep(const ExperimentPlan& plan);

// -------------------------------- multistart ---------------------------------

struct MultistartResult {
    std::vector<int> iterations;       // per start; -1 when cancelled (early stop)
    std::vector<bool> converged;
    std::vector<double> time_ratios;   // NaN when not converged or cancelled
    int min_n = 0;
    double p20_n = 0.0;
    double median_n = 0.0;
    double ratio_spread = 0.0;   // max - min over converged starts
    bool consistent = true;      // spread <= 10 epsilon
    int winner = -1;             // lowest-index converged start
    SolverRun winning_run;
};

// All starts share the pair; phases are drawn uniformly per start from a
// stream derived per start index.  With early_stop the remaining starts are
// cancelled once the lowest-index converged start is known, and only min_n
// and the winning run are meaningful (percentiles need run-to-completion).
MultistartResult run_multistart(const IsospectralPair& pair, int num_starts,
                                const SolverConfig& config, const RngSeed& seed,
                                bool early_stop = false, int jobs = 1);

// ------------------------------- perturbations -------------------------------

enum class PerturbationKind { convex, unitary };

struct PerturbationPoint {
    double delta = 0.0;
    bool converged = false;
    double deviation = 0.0;  // ||H - H'||_HS / ||H||_HS
    int iterations = 0;
};

struct PerturbationResult {
    SolverRun baseline;
    std::vector<PerturbationPoint> points;
    double spearman = 0.0;    // rank correlation of deviation vs delta
    double spearman_p = 1.0;  // one-sided permutation p-value
};

// Baseline solve on the pair, then per delta: perturb rho, rebuild sigma by
// transporting the perturbed state with the unperturbed pair's eigenvector-
// matching unitary, and re-solve with the same initial phases.
PerturbationResult run_perturbation_sweep(const IsospectralPair& pair,
                                          const std::vector<double>& deltas,
                                          PerturbationKind kind, const SolverConfig& config,
                                          const RngSeed& seed);

// ------------------------------- persistence ---------------------------------

std::uint64_t plan_hash(const ExperimentPlan& plan);
std::string plan_to_string(const ExperimentPlan& plan);

// One record per row; ratios are printed with round-trip precision so reruns
// with the same plan are byte-identical.
std::string records_to_csv(std::span<const ExperimentRecord> records);

nlohmann::json performance_to_json(const PerformanceResult& result);
nlohmann::json iterations_to_json(const IterationResult& result);

// Writes <stem>.csv and <stem>.json where stem embeds the plan hash and seed;
// returns the stem path.
std::filesystem::path write_performance(const std::filesystem::path& dir,
                                        const PerformanceResult& result,
                                        const std::string& name = "performance");
std::filesystem::path write_iterations(const std::filesystem::path& dir,
                                       const IterationResult& result);

}  // namespace brachisto
