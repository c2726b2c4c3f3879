#include "brachisto/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace brachisto {

namespace {

constexpr int kBootstrapResamples = 1000;
constexpr int kPermutations = 1000;

// Runs fn(0..total-1) on a small worker pool.  Work items only write to their
// own output slot, so the result is independent of scheduling.
void parallel_for(int total, int jobs, const std::function<void(int)>& fn) {
    jobs = std::clamp(jobs, 1, std::max(1, total));
    if (jobs == 1) {
        for (int i = 0; i < total; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= total) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

// ---------------------------------- plans -----------------------------------

void ExperimentPlan::validate() const {
    if (dims.empty()) {
        throw std::invalid_argument("ExperimentPlan: dims must be nonempty");
    }
    for (int d : dims) {
        if (d < 2) {
            throw std::invalid_argument("ExperimentPlan: every dim must be >= 2");
        }
    }
    if (samples_per_dim < 1) {
        throw std::invalid_argument("ExperimentPlan: samples_per_dim must be >= 1");
    }
    if (epsilon <= 0.0 || epsilon >= 1.0) {
        throw std::invalid_argument("ExperimentPlan: epsilon must lie in (0, 1)");
    }
    if (jobs < 1) {
        throw std::invalid_argument("ExperimentPlan: jobs must be >= 1");
    }
}

// ------------------------------ statistics -----------------------------------

double mean_of(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double percentile_of(std::vector<double> xs, double p) {
    if (xs.empty()) {
        return 0.0;
    }
    std::sort(xs.begin(), xs.end());
    const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

BootstrapCi bootstrap_ci_mean(std::span<const double> xs, double level, int resamples,
                              RngStream& rng) {
    if (xs.empty()) {
        return {};
    }
    const std::size_t n = xs.size();
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum += xs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))];
        }
        m = sum / static_cast<double>(n);
    }
    const double tail = (1.0 - level) / 2.0 * 100.0;
    BootstrapCi ci;
    ci.lo = percentile_of(means, tail);
    ci.hi = percentile_of(std::move(means), 100.0 - tail);
    return ci;
}

namespace {

std::vector<double> ranks_with_ties(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman_rho: need two samples of equal size >= 2");
    }
    const auto rx = ranks_with_ties(x);
    const auto ry = ranks_with_ties(y);
    return pearson(rx, ry);
}

double spearman_perm_pvalue(std::span<const double> x, std::span<const double> y,
                            int permutations, RngStream& rng) {
    const double observed = spearman_rho(x, y);
    std::vector<double> shuffled(y.begin(), y.end());
    int at_least = 0;
    for (int p = 0; p < permutations; ++p) {
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(shuffled[i - 1], shuffled[j]);
        }
        if (spearman_rho(x, shuffled) >= observed) {
            ++at_least;
        }
    }
    return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(permutations) + 1.0);
}

// --------------------------------- sweeps ------------------------------------

namespace {

RngSeed trial_seed(const ExperimentPlan& plan, int dim, int trial) {
    return plan.base_seed.derive("d" + std::to_string(dim)).derive("t" + std::to_string(trial));
}

IsospectralPair sample_pair(const ExperimentPlan& plan, const RngSeed& seed, int dim) {
    if (plan.ensemble == Ensemble::haar_pure) {
        RngStream rho_stream(seed.derive("rho"));
        RngStream sigma_stream(seed.derive("sigma"));
        return IsospectralPair::make(sample_haar_pure(dim, rho_stream),
                                     sample_haar_pure(dim, sigma_stream));
    }
    RngStream rho_stream(seed.derive("rho"));
    const DensityMatrix rho = sample_bures_mixed(dim, rho_stream);
    if (plan.sigma_mode == SigmaMode::rotate) {
        RngStream target_stream(seed.derive("target"));
        return make_isospectral_target(rho, target_stream);
    }
    RngStream sigma_stream(seed.derive("sigma"));
    const DensityMatrix drawn = sample_bures_mixed(dim, sigma_stream);
    return IsospectralPair::make(rho, project_spectrum(drawn, rho));
}

double ratio_for(const ExperimentPlan& plan, const IsospectralPair& pair, const Matrix& h) {
    try {
        if (plan.ensemble == Ensemble::haar_pure) {
            return qsl_pure(pair.rho, pair.sigma, h).time_ratio;
        }
        return qsl_mixed(pair.rho, pair.sigma, h).time_ratio;
    } catch (const std::invalid_argument&) {
        return std::numeric_limits<double>::infinity();
    }
}

DimSummary summarize_dim(const ExperimentPlan& plan, int dim,
                         std::span<const ExperimentRecord> records) {
    DimSummary s;
    s.dim = dim;
    std::vector<double> ratios;
    std::vector<double> iters;
    for (const auto& r : records) {
        if (r.dim != dim) {
            continue;
        }
        ++s.samples;
        if (r.converged) {
            ++s.converged;
            iters.push_back(static_cast<double>(r.iterations));
            if (std::isfinite(r.time_ratio)) {
                ratios.push_back(r.time_ratio);
            } else {
                ++s.excluded_ratios;
            }
        }
    }
    s.mean_ratio = mean_of(ratios);
    s.median_ratio = percentile_of(ratios, 50.0);
    s.mean_iterations = mean_of(iters);
    RngStream boot(plan.base_seed.derive("bootstrap/d" + std::to_string(dim)));
    s.ci90 = bootstrap_ci_mean(ratios, 0.90, kBootstrapResamples, boot);
    s.ci99 = bootstrap_ci_mean(ratios, 0.99, kBootstrapResamples, boot);
    return s;
}

std::vector<ExperimentRecord> run_all_trials(const ExperimentPlan& plan) {
    const int per_dim = plan.samples_per_dim;
    const int total = static_cast<int>(plan.dims.size()) * per_dim;
    std::vector<ExperimentRecord> records(static_cast<std::size_t>(total));
    parallel_for(total, plan.jobs, [&](int i) {
        const int dim = plan.dims[static_cast<std::size_t>(i / per_dim)];
        const int trial = i % per_dim;
        records[static_cast<std::size_t>(i)] = run_single_trial(plan, dim, trial);
    });
    return records;
}

}  // namespace

ExperimentRecord run_single_trial(const ExperimentPlan& plan, int dim, int trial) {
    const auto t0 = std::chrono::steady_clock::now();
    const RngSeed seed = trial_seed(plan, dim, trial);
    const IsospectralPair pair = sample_pair(plan, seed, dim);

    SolverConfig config;
    config.epsilon = plan.epsilon;
    config.max_iterations = plan.max_iterations;
    config.sign = plan.sign;
    config.side = plan.side;
    config.initial_phases = PhaseInit::random();
    config.rng = seed.derive("phases");
    const SolverRun run = solve(pair, config);

    ExperimentRecord rec;
    rec.dim = dim;
    rec.trial = trial;
    rec.seed = seed_digest(seed);
    rec.iterations = run.steps();
    rec.converged = run.converged;
    rec.time_ratio = ratio_for(plan, pair, run.final_hamiltonian);
    rec.efficiency_star = run.iterations.back().efficiency_star;
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

PerformanceResult run_performance_sweep(const ExperimentPlan& plan) {
    plan.validate();
    PerformanceResult out;
    out.plan = plan;
    out.records = run_all_trials(plan);
    for (int dim : plan.dims) {
        out.summaries.push_back(summarize_dim(plan, dim, out.records));
    }
    return out;
}

IterationResult run_iteration_sweep(const ExperimentPlan& plan) {
    plan.validate();
    IterationResult out;
    out.plan = plan;
    out.records = run_all_trials(plan);

    std::vector<double> log_dims;
    std::vector<double> mean_ns;
    std::vector<std::vector<double>> per_dim_ns;
    for (int dim : plan.dims) {
        out.summaries.push_back(summarize_dim(plan, dim, out.records));
        std::map<int, int> hist;
        std::vector<double> ns;
        for (const auto& r : out.records) {
            if (r.dim == dim && r.converged) {
                ++hist[r.iterations];
                ns.push_back(static_cast<double>(r.iterations));
            }
        }
        out.histograms.push_back(std::move(hist));
        log_dims.push_back(std::log(static_cast<double>(dim)));
        mean_ns.push_back(mean_of(ns));
        per_dim_ns.push_back(std::move(ns));
    }

    // Least squares n(d) ~ a + b ln d over the per-dim means.
    const double mx = mean_of(log_dims);
    const double my = mean_of(mean_ns);
    double sxy = 0.0, sxx = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < log_dims.size(); ++i) {
        sxy += (log_dims[i] - mx) * (mean_ns[i] - my);
        sxx += (log_dims[i] - mx) * (log_dims[i] - mx);
        sst += (mean_ns[i] - my) * (mean_ns[i] - my);
    }
    out.fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    out.fit.intercept = my - out.fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < log_dims.size(); ++i) {
        const double pred = out.fit.intercept + out.fit.slope * log_dims[i];
        ssr += (mean_ns[i] - pred) * (mean_ns[i] - pred);
    }
    out.fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

    // One-sided bootstrap: reject "nondecreasing" for an adjacent pair only
    // when >= 95% of resampled mean differences show a decrease.
    out.nondecreasing_95 = true;
    RngStream boot(plan.base_seed.derive("bootstrap/monotone"));
    for (std::size_t i = 0; i + 1 < per_dim_ns.size(); ++i) {
        const auto& lo = per_dim_ns[i];
        const auto& hi = per_dim_ns[i + 1];
        if (lo.empty() || hi.empty()) {
            continue;
        }
        int decreases = 0;
        for (int b = 0; b < kBootstrapResamples; ++b) {
            double sum_lo = 0.0, sum_hi = 0.0;
            for (std::size_t k = 0; k < lo.size(); ++k) {
                sum_lo += lo[static_cast<std::size_t>(boot.uniform() * static_cast<double>(lo.size()))];
            }
            for (std::size_t k = 0; k < hi.size(); ++k) {
                sum_hi += hi[static_cast<std::size_t>(boot.uniform() * static_cast<double>(hi.size()))];
            }
            if (sum_hi / static_cast<double>(hi.size()) < sum_lo / static_cast<double>(lo.size())) {
                ++decreases;
            }
        }
        if (decreases >= static_cast<int>(0.95 * kBootstrapResamples)) {
            out.nondecreasing_95 = false;
        }
    }
    return out;
}

// -------------------------------- multistart ---------------------------------

MultistartResult run_multistart(const IsospectralPair& pair, int num_starts,
                                const SolverConfig& config, const RngSeed& seed,
                                bool early_stop, int jobs) {
    if (num_starts < 1) {
        throw std::invalid_argument("run_multistart: num_starts must be >= 1");
    }
    MultistartResult out;
    out.iterations.assign(static_cast<std::size_t>(num_starts), -1);
    out.converged.assign(static_cast<std::size_t>(num_starts), false);
    out.time_ratios.assign(static_cast<std::size_t>(num_starts),
                           std::numeric_limits<double>::quiet_NaN());

    const bool pure = pair.rho.is_pure() && pair.sigma.is_pure();
    std::vector<SolverRun> runs(static_cast<std::size_t>(num_starts));
    std::atomic<int> winner{num_starts};

    auto run_one = [&](int i) {
        if (early_stop && i > winner.load()) {
            return;
        }
        SolverConfig c = config;
        c.initial_phases = PhaseInit::random();
        c.rng = seed.derive("start" + std::to_string(i));
        SolverRun run = solve(pair, c);
        out.iterations[static_cast<std::size_t>(i)] = run.steps();
        out.converged[static_cast<std::size_t>(i)] = run.converged;
        if (run.converged) {
            const auto report = pure ? qsl_pure(pair.rho, pair.sigma, run.final_hamiltonian)
                                     : qsl_mixed(pair.rho, pair.sigma, run.final_hamiltonian);
            out.time_ratios[static_cast<std::size_t>(i)] = report.time_ratio;
            int expected = winner.load();
            while (i < expected && !winner.compare_exchange_weak(expected, i)) {
            }
        }
        runs[static_cast<std::size_t>(i)] = std::move(run);
    };
    parallel_for(num_starts, jobs, run_one);

    std::vector<double> converged_ns;
    std::vector<double> converged_ratios;
    for (int i = 0; i < num_starts; ++i) {
        if (out.converged[static_cast<std::size_t>(i)]) {
            converged_ns.push_back(static_cast<double>(out.iterations[static_cast<std::size_t>(i)]));
            if (std::isfinite(out.time_ratios[static_cast<std::size_t>(i)])) {
                converged_ratios.push_back(out.time_ratios[static_cast<std::size_t>(i)]);
            }
        }
    }
    if (!converged_ns.empty()) {
        out.min_n = static_cast<int>(*std::min_element(converged_ns.begin(), converged_ns.end()));
        out.p20_n = percentile_of(converged_ns, 20.0);
        out.median_n = percentile_of(converged_ns, 50.0);
    } else {
        out.min_n = -1;
    }
    if (converged_ratios.size() >= 2) {
        const auto [lo, hi] =
            std::minmax_element(converged_ratios.begin(), converged_ratios.end());
        out.ratio_spread = *hi - *lo;
    }
    out.consistent = out.ratio_spread <= 10.0 * config.epsilon;
    if (winner.load() < num_starts) {
        out.winner = winner.load();
        out.winning_run = runs[static_cast<std::size_t>(out.winner)];
    }
    return out;
}

// ------------------------------- perturbations -------------------------------

PerturbationResult run_perturbation_sweep(const IsospectralPair& pair,
                                          const std::vector<double>& deltas,
                                          PerturbationKind kind, const SolverConfig& config,
                                          const RngSeed& seed) {
    PerturbationResult out;
    out.baseline = solve(pair, config);
    if (!out.baseline.converged) {
        throw std::runtime_error("run_perturbation_sweep: baseline solve did not converge");
    }
    const double base_norm = hs_norm(out.baseline.final_hamiltonian);
    const Matrix transport = transport_unitary(pair);

    for (double delta : deltas) {
        // Recreating the stream per delta reuses the same perturbation
        // direction, so points differ only through the strength.
        RngStream direction(seed.derive("direction"));
        const DensityMatrix rho_p = kind == PerturbationKind::convex
                                        ? perturb_convex(pair.rho, delta, direction)
                                        : perturb_unitary(pair.rho, delta, direction);
        const Matrix sig = hermitize(transport * rho_p.matrix() * transport.adjoint());
        const DensityMatrix sigma_p = DensityMatrix::from_matrix(sig, pair.rho.degeneracy_tol());
        const IsospectralPair perturbed = IsospectralPair::make(rho_p, sigma_p);

        PerturbationPoint point;
        point.delta = delta;
        const SolverRun run = solve(perturbed, config);
        point.converged = run.converged;
        point.iterations = run.steps();
        point.deviation = base_norm > 0.0
                              ? hs_norm(out.baseline.final_hamiltonian - run.final_hamiltonian) /
                                    base_norm
                              : 0.0;
        out.points.push_back(point);
    }

    if (out.points.size() >= 3) {
        std::vector<double> xs, ys;
        for (const auto& p : out.points) {
            xs.push_back(p.delta);
            ys.push_back(p.deviation);
        }
        out.spearman = spearman_rho(xs, ys);
        RngStream perm(seed.derive("spearman"));
        out.spearman_p = spearman_perm_pvalue(xs, ys, kPermutations, perm);
    }
    return out;
}

// ------------------------------- persistence ---------------------------------

std::string plan_to_string(const ExperimentPlan& plan) {
    std::ostringstream os;
    os << "dims=";
    for (std::size_t i = 0; i < plan.dims.size(); ++i) {
        os << (i ? "," : "") << plan.dims[i];
    }
    os << "|samples=" << plan.samples_per_dim << "|epsilon=" << format_g17(plan.epsilon)
       << "|ensemble=" << (plan.ensemble == Ensemble::haar_pure ? "haar_pure" : "bures_mixed")
       << "|sigma=" << (plan.sigma_mode == SigmaMode::rotate ? "rotate" : "independent_project")
       << "|seed=" << plan.base_seed.value << ":" << plan.base_seed.label
       << "|sign=" << (plan.sign == SignConvention::plus ? "plus" : "minus")
       << "|side="
       << (plan.side == MaskSide::initial ? "initial"
                                          : (plan.side == MaskSide::final ? "final" : "both"))
       << "|maxit=" << plan.max_iterations;
    return os.str();
}

std::uint64_t plan_hash(const ExperimentPlan& plan) {
    const std::string s = plan_to_string(plan);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string records_to_csv(std::span<const ExperimentRecord> records) {
    std::ostringstream os;
    os << "dim,trial,seed,iterations,converged,time_ratio,efficiency_star\n";
    for (const auto& r : records) {
        os << r.dim << ',' << r.trial << ',' << r.seed << ',' << r.iterations << ','
           << (r.converged ? 1 : 0) << ',' << format_g17(r.time_ratio) << ','
           << format_g17(r.efficiency_star) << '\n';
    }
    return os.str();
}

namespace {

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
    return nlohmann::json{
        {"dims", plan.dims},
        {"samples_per_dim", plan.samples_per_dim},
        {"epsilon", plan.epsilon},
        {"ensemble", plan.ensemble == Ensemble::haar_pure ? "haar_pure" : "bures_mixed"},
        {"sigma_mode",
         plan.sigma_mode == SigmaMode::rotate ? "rotate" : "independent_project"},
        {"seed", plan.base_seed.value},
        {"seed_label", plan.base_seed.label},
        {"sign", plan.sign == SignConvention::plus ? "plus" : "minus"},
        {"mask_side", plan.side == MaskSide::initial
                          ? "initial"
                          : (plan.side == MaskSide::final ? "final" : "both")},
        {"max_iterations", plan.max_iterations},
    };
}

nlohmann::json finite_or_null(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return x;
}

nlohmann::json records_to_json(std::span<const ExperimentRecord> records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back(nlohmann::json{
            {"dim", r.dim},
            {"trial", r.trial},
            {"seed", r.seed},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"time_ratio", finite_or_null(r.time_ratio)},
            {"efficiency_star", finite_or_null(r.efficiency_star)},
        });
    }
    return arr;
}

nlohmann::json summaries_to_json(std::span<const DimSummary> summaries) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : summaries) {
        arr.push_back(nlohmann::json{
            {"dim", s.dim},
            {"samples", s.samples},
            {"converged", s.converged},
            {"excluded_ratios", s.excluded_ratios},
            {"mean_ratio", s.mean_ratio},
            {"median_ratio", s.median_ratio},
            {"ci90", {s.ci90.lo, s.ci90.hi}},
            {"ci99", {s.ci99.lo, s.ci99.hi}},
            {"mean_iterations", s.mean_iterations},
        });
    }
    return arr;
}

std::filesystem::path write_pair(const std::filesystem::path& dir, const std::string& name,
                                 const ExperimentPlan& plan, const std::string& csv,
                                 const nlohmann::json& json) {
    std::filesystem::create_directories(dir);
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(plan_hash(plan)));
    const std::string stem =
        name + "_" + hash_hex + "_s" + std::to_string(plan.base_seed.value);
    const auto base = dir / stem;
    {
        std::ofstream out(base.string() + ".csv", std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + base.string() + ".csv");
        }
        out << csv;
    }
    {
        std::ofstream out(base.string() + ".json", std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + base.string() + ".json");
        }
        out << json.dump(2) << '\n';
    }
    return base;
}

}  // namespace

nlohmann::json performance_to_json(const PerformanceResult& result) {
    return nlohmann::json{
        {"plan", plan_to_json(result.plan)},
        {"records", records_to_json(result.records)},
        {"summary", summaries_to_json(result.summaries)},
    };
}

nlohmann::json iterations_to_json(const IterationResult& result) {
    nlohmann::json hists = nlohmann::json::array();
    for (std::size_t i = 0; i < result.histograms.size(); ++i) {
        nlohmann::json bins = nlohmann::json::array();
        for (const auto& [n, count] : result.histograms[i]) {
            bins.push_back(nlohmann::json{{"n", n}, {"count", count}});
        }
        hists.push_back(nlohmann::json{{"dim", result.plan.dims[i]}, {"bins", std::move(bins)}});
    }
    return nlohmann::json{
        {"plan", plan_to_json(result.plan)},
        {"records", records_to_json(result.records)},
        {"summary", summaries_to_json(result.summaries)},
        {"histograms", std::move(hists)},
        {"log_fit",
         {{"intercept", result.fit.intercept},
          {"slope", result.fit.slope},
          {"r_squared", result.fit.r_squared}}},
        {"nondecreasing_95", result.nondecreasing_95},
    };
}

std::filesystem::path write_performance(const std::filesystem::path& dir,
                                        const PerformanceResult& result,
                                        const std::string& name) {
    return write_pair(dir, name, result.plan, records_to_csv(result.records),
                      performance_to_json(result));
}

std::filesystem::path write_iterations(const std::filesystem::path& dir,
                                       const IterationResult& result) {
    return write_pair(dir, "iterations", result.plan, records_to_csv(result.records),
                      iterations_to_json(result));
}

}  // namespace brachisto
