// brachisto.cpp — command-line surface: solve single problems, run the
// benchmark sweeps, and sample random states, all reproducible from the flag
// set alone.
//
// Exit codes: 0 success/converged, 1 invalid input, 2 stopped on the
// iteration budget without converging.

#include "brachisto/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace brachisto;

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) {
                ++used;
            }
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(flag) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) {
        throw CLI::ValidationError(std::string(flag) + ": empty list");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> out;
    for (double v : parse_double_list(text, flag)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) {
            throw CLI::ValidationError(std::string(flag) + ": expected integers");
        }
        out.push_back(i);
    }
    return out;
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) {
        return *flag_seed;
    }
    if (const char* env = std::getenv("BRACHISTO_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw CLI::ValidationError("BRACHISTO_SEED: cannot parse '" + std::string(env) + "'");
        }
    }
    return 0;
}

SignConvention parse_sign(const std::string& s) {
    if (s == "plus") return SignConvention::plus;
    if (s == "minus") return SignConvention::minus;
    throw CLI::ValidationError("--sign: expected plus or minus");
}

MaskSide parse_side(const std::string& s) {
    if (s == "initial") return MaskSide::initial;
    if (s == "final") return MaskSide::final;
    if (s == "both") return MaskSide::both;
    throw CLI::ValidationError("--mask-side: expected initial, final or both");
}

Ensemble parse_ensemble(const std::string& s) {
    if (s == "haar_pure") return Ensemble::haar_pure;
    if (s == "bures_mixed") return Ensemble::bures_mixed;
    throw CLI::ValidationError("--ensemble: expected haar_pure or bures_mixed");
}

// ----------------------------------- solve -----------------------------------

struct SolveArgs {
    std::string rho_path;
    std::string sigma_path;
    int random_dim = 0;
    std::string ensemble = "bures_mixed";
    double epsilon = 1e-4;
    int max_iter = 0;
    std::string sign = "plus";
    std::string mask_side = "initial";
    std::string phases;
    bool random_phases = false;
    bool project_spectrum_flag = false;
    std::optional<std::uint64_t> seed;
    std::string output = "solver_run.json";
};

int cmd_solve(const SolveArgs& args) {
    IsospectralPair pair = [&] {
        if (args.random_dim > 0) {
            RngStream rng(seed_or_env(args.seed), "cli/solve/random");
            if (parse_ensemble(args.ensemble) == Ensemble::haar_pure) {
                RngStream rho_rng = rng.fork("rho");
                RngStream sigma_rng = rng.fork("sigma");
                return IsospectralPair::make(sample_haar_pure(args.random_dim, rho_rng),
                                             sample_haar_pure(args.random_dim, sigma_rng));
            }
            RngStream rho_rng = rng.fork("rho");
            const DensityMatrix rho = sample_bures_mixed(args.random_dim, rho_rng);
            RngStream target_rng = rng.fork("target");
            return make_isospectral_target(rho, target_rng);
        }
        const DensityMatrix rho = read_state_json(args.rho_path);
        DensityMatrix sigma = read_state_json(args.sigma_path);
        if (args.project_spectrum_flag) {
            sigma = project_spectrum(sigma, rho);
        }
        return IsospectralPair::make(rho, sigma);
    }();

    SolverConfig config;
    config.epsilon = args.epsilon;
    config.max_iterations = args.max_iter;
    config.sign = parse_sign(args.sign);
    config.side = parse_side(args.mask_side);
    config.rng = RngSeed{seed_or_env(args.seed), "cli/solve/phases"};
    if (!args.phases.empty()) {
        config.initial_phases = PhaseInit::from_vector(parse_double_list(args.phases, "--phases"));
    } else if (args.random_phases) {
        config.initial_phases = PhaseInit::random();
    }

    const SolverRun run = solve(pair, config);

    const bool pure = pair.rho.is_pure() && pair.sigma.is_pure();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    try {
        ratio = (pure ? qsl_pure(pair.rho, pair.sigma, run.final_hamiltonian)
                      : qsl_mixed(pair.rho, pair.sigma, run.final_hamiltonian))
                    .time_ratio;
    } catch (const std::invalid_argument&) {
    }
    const double eta_star = run.iterations.back().efficiency_star;

    nlohmann::json doc = solver_run_to_json(run);
    doc["cli"] = {
        {"command", "solve"},
        {"rho", args.rho_path},
        {"sigma", args.sigma_path},
        {"random", args.random_dim},
        {"ensemble", args.ensemble},
        {"epsilon", args.epsilon},
        {"max_iter", args.max_iter},
        {"sign", args.sign},
        {"mask_side", args.mask_side},
        {"phases", args.phases},
        {"project_spectrum", args.project_spectrum_flag},
        {"seed", seed_or_env(args.seed)},
    };
    doc["time_ratio"] = std::isfinite(ratio) ? nlohmann::json(ratio) : nlohmann::json();
    {
        std::ofstream out(args.output, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << args.output << "\n";
            return 1;
        }
        out << doc.dump(2) << '\n';
    }

    std::cout << "iterations: " << run.steps() << "\n"
              << "converged: " << (run.converged ? "yes" : "no") << "\n"
              << "time_ratio: " << ratio << "\n"
              << "efficiency_star: " << eta_star << "\n"
              << "run file: " << args.output << "\n";
    return run.converged ? 0 : 2;
}

// ----------------------------------- bench -----------------------------------

struct BenchArgs {
    std::string dims = "2,3,4,5,6,8,12,16,24,32";
    int samples = 100;
    std::optional<double> epsilon;
    std::string ensemble = "bures_mixed";
    std::string sigma_mode = "rotate";
    std::string sign = "plus";
    std::string mask_side = "initial";
    int max_iter = 0;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string format = "both";
    std::string output = "bench_out";
    // multistart
    int dim = 8;
    int starts = 100;
    bool early_stop = false;
    // perturbation
    std::string deltas = "1e-6,1e-5,1e-4,1e-3,1e-2";
    std::string kind = "unitary";
};

ExperimentPlan make_plan(const BenchArgs& args) {
    ExperimentPlan plan;
    plan.dims = parse_int_list(args.dims, "--dims");
    plan.samples_per_dim = args.samples;
    plan.ensemble = parse_ensemble(args.ensemble);
    plan.epsilon = args.epsilon.value_or(plan.ensemble == Ensemble::haar_pure ? 1e-4 : 1e-2);
    if (args.sigma_mode == "rotate") {
        plan.sigma_mode = SigmaMode::rotate;
    } else if (args.sigma_mode == "independent_project") {
        plan.sigma_mode = SigmaMode::independent_project;
    } else {
        throw CLI::ValidationError("--sigma-mode: expected rotate or independent_project");
    }
    plan.base_seed = RngSeed{seed_or_env(args.seed), "bench"};
    plan.sign = parse_sign(args.sign);
    plan.side = parse_side(args.mask_side);
    plan.max_iterations = args.max_iter;
    plan.jobs = args.jobs;
    plan.validate();
    return plan;
}

void write_selected(const std::filesystem::path& dir, const std::string& name,
                    const ExperimentPlan& plan, const std::string& csv,
                    const nlohmann::json& json, const std::string& format) {
    std::filesystem::create_directories(dir);
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(plan_hash(plan)));
    const std::string stem = name + "_" + hash_hex + "_s" + std::to_string(plan.base_seed.value);
    if (format == "csv" || format == "both") {
        std::ofstream out(dir / (stem + ".csv"), std::ios::binary);
        out << csv;
        std::cout << "wrote " << (dir / (stem + ".csv")).string() << "\n";
    }
    if (format == "json" || format == "both") {
        std::ofstream out(dir / (stem + ".json"), std::ios::binary);
        out << json.dump(2) << '\n';
        std::cout << "wrote " << (dir / (stem + ".json")).string() << "\n";
    }
}

int cmd_bench_performance(const BenchArgs& args) {
    const ExperimentPlan plan = make_plan(args);
    const PerformanceResult result = run_performance_sweep(plan);
    for (const auto& s : result.summaries) {
        std::cout << "d=" << s.dim << ": mean_ratio=" << s.mean_ratio
                  << " median=" << s.median_ratio << " ci90=[" << s.ci90.lo << "," << s.ci90.hi
                  << "] converged=" << s.converged << "/" << s.samples
                  << " excluded=" << s.excluded_ratios << "\n";
    }
    write_selected(args.output, "performance", plan, records_to_csv(result.records),
                   performance_to_json(result), args.format);
    return 0;
}

int cmd_bench_iterations(const BenchArgs& args) {
    const ExperimentPlan plan = make_plan(args);
    const IterationResult result = run_iteration_sweep(plan);
    for (const auto& s : result.summaries) {
        std::cout << "d=" << s.dim << ": mean_n=" << s.mean_iterations << " converged="
                  << s.converged << "/" << s.samples << "\n";
    }
    std::cout << "log fit: n(d) ~ " << result.fit.intercept << " + " << result.fit.slope
              << " ln d (R^2=" << result.fit.r_squared << ")\n"
              << "nondecreasing at 95%: " << (result.nondecreasing_95 ? "yes" : "no") << "\n";
    write_selected(args.output, "iterations", plan, records_to_csv(result.records),
                   iterations_to_json(result), args.format);
    return 0;
}

int cmd_bench_multistart(const BenchArgs& args) {
    if (args.dim < 2 || args.starts < 1) {
        std::cerr << "error: --dim must be >= 2 and --starts >= 1\n";
        return 1;
    }
    const RngSeed seed{seed_or_env(args.seed), "bench/multistart"};
    RngStream pair_rng(seed.derive("pair"));
    const DensityMatrix rho = args.ensemble == "haar_pure"
                                  ? sample_haar_pure(args.dim, pair_rng)
                                  : sample_bures_mixed(args.dim, pair_rng);
    RngStream target_rng(seed.derive("target"));
    const IsospectralPair pair = make_isospectral_target(rho, target_rng);

    SolverConfig config;
    config.epsilon = args.epsilon.value_or(1e-2);
    config.max_iterations = args.max_iter;
    config.sign = parse_sign(args.sign);
    config.side = parse_side(args.mask_side);

    const MultistartResult result =
        run_multistart(pair, args.starts, config, seed, args.early_stop, args.jobs);

    int converged = 0;
    for (bool c : result.converged) {
        converged += c ? 1 : 0;
    }
    std::cout << "starts: " << args.starts << " converged: " << converged << "\n"
              << "n: min=" << result.min_n << " p20=" << result.p20_n
              << " median=" << result.median_n << "\n"
              << "time_ratio spread: " << result.ratio_spread
              << " (consistent within 10*epsilon: " << (result.consistent ? "yes" : "no")
              << ")\n";
    if (!result.consistent) {
        std::cout << "WARNING: converged starts disagree on time_ratio beyond 10*epsilon\n";
    }

    nlohmann::json doc{
        {"command", "multistart"},
        {"dim", args.dim},
        {"starts", args.starts},
        {"epsilon", config.epsilon},
        {"seed", seed.value},
        {"early_stop", args.early_stop},
        {"iterations", result.iterations},
        {"converged", result.converged},
        {"min_n", result.min_n},
        {"p20_n", result.p20_n},
        {"median_n", result.median_n},
        {"ratio_spread", result.ratio_spread},
        {"consistent", result.consistent},
        {"winner", result.winner},
    };
    nlohmann::json ratios = nlohmann::json::array();
    for (double r : result.time_ratios) {
        ratios.push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json());
    }
    doc["time_ratios"] = std::move(ratios);

    std::filesystem::create_directories(args.output);
    const auto path = std::filesystem::path(args.output) /
                      ("multistart_d" + std::to_string(args.dim) + "_s" +
                       std::to_string(seed.value) + ".json");
    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_bench_perturbation(const BenchArgs& args) {
    if (args.dim < 2) {
        std::cerr << "error: --dim must be >= 2\n";
        return 1;
    }
    const PerturbationKind kind = [&] {
        if (args.kind == "convex") return PerturbationKind::convex;
        if (args.kind == "unitary") return PerturbationKind::unitary;
        throw CLI::ValidationError("--kind: expected convex or unitary");
    }();
    const std::vector<double> deltas = parse_double_list(args.deltas, "--deltas");

    const RngSeed seed{seed_or_env(args.seed), "bench/perturbation"};
    RngStream pair_rng(seed.derive("pair"));
    const DensityMatrix rho = sample_bures_mixed(args.dim, pair_rng);
    RngStream target_rng(seed.derive("target"));
    const IsospectralPair pair = make_isospectral_target(rho, target_rng);

    SolverConfig config;
    config.epsilon = args.epsilon.value_or(1e-3);
    config.max_iterations = args.max_iter;
    config.sign = parse_sign(args.sign);
    config.side = parse_side(args.mask_side);
    config.initial_phases = PhaseInit::random();
    config.rng = seed.derive("phases");

    const PerturbationResult result =
        run_perturbation_sweep(pair, deltas, kind, config, seed);
    for (const auto& p : result.points) {
        std::cout << "delta=" << p.delta << ": deviation=" << p.deviation
                  << " converged=" << (p.converged ? "yes" : "no") << " n=" << p.iterations
                  << "\n";
    }
    std::cout << "spearman rho=" << result.spearman << " (one-sided p=" << result.spearman_p
              << ")\n";

    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        points.push_back(nlohmann::json{{"delta", p.delta},
                                        {"deviation", p.deviation},
                                        {"converged", p.converged},
                                        {"iterations", p.iterations}});
    }
    nlohmann::json doc{
        {"command", "perturbation"},
        {"dim", args.dim},
        {"kind", args.kind},
        {"epsilon", config.epsilon},
        {"seed", seed.value},
        {"baseline_iterations", result.baseline.steps()},
        {"points", std::move(points)},
        {"spearman", result.spearman},
        {"spearman_p", result.spearman_p},
    };
    std::filesystem::create_directories(args.output);
    const auto path = std::filesystem::path(args.output) /
                      ("perturbation_d" + std::to_string(args.dim) + "_" + args.kind + "_s" +
                       std::to_string(seed.value) + ".json");
    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

// ----------------------------------- sample ----------------------------------

struct SampleArgs {
    std::string ensemble = "bures_mixed";
    int dim = 2;
    int count = 1;
    std::optional<std::uint64_t> seed;
    std::string output = "states";
};

int cmd_sample(const SampleArgs& args) {
    if (args.dim < 2 || args.count < 1) {
        std::cerr << "error: --dim must be >= 2 and --count >= 1\n";
        return 1;
    }
    const Ensemble ensemble = parse_ensemble(args.ensemble);
    const RngSeed seed{seed_or_env(args.seed), "cli/sample"};

    std::error_code ec;
    std::filesystem::create_directories(args.output, ec);
    if (ec) {
        std::cerr << "error: cannot create " << args.output << ": " << ec.message() << "\n";
        return 1;
    }

    nlohmann::json manifest{
        {"ensemble", args.ensemble},
        {"dim", args.dim},
        {"count", args.count},
        {"seed", seed.value},
        {"files", nlohmann::json::array()},
    };
    for (int k = 0; k < args.count; ++k) {
        RngStream rng(seed.derive("state" + std::to_string(k)));
        const DensityMatrix state = ensemble == Ensemble::haar_pure
                                        ? sample_haar_pure(args.dim, rng)
                                        : sample_bures_mixed(args.dim, rng);
        const std::string name = args.ensemble + "_d" + std::to_string(args.dim) + "_" +
                                 std::to_string(k) + ".json";
        try {
            write_state_json(std::filesystem::path(args.output) / name, state);
        } catch (const std::runtime_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        manifest["files"].push_back(name);
        std::cout << "wrote " << (std::filesystem::path(args.output) / name).string() << "\n";
    }
    std::ofstream out(std::filesystem::path(args.output) / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-optimal Hamiltonians between isospectral density matrices"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and write the run trace");
    solve_cmd->add_option("rho", solve_args.rho_path, "initial state file");
    solve_cmd->add_option("sigma", solve_args.sigma_path, "final state file");
    solve_cmd->add_option("--random", solve_args.random_dim, "draw a random pair of this dimension");
    solve_cmd->add_option("--ensemble", solve_args.ensemble, "haar_pure or bures_mixed");
    solve_cmd->add_option("--epsilon", solve_args.epsilon, "convergence threshold");
    solve_cmd->add_option("--max-iter", solve_args.max_iter, "iteration budget (0 = automatic)");
    solve_cmd->add_option("--sign", solve_args.sign, "plus or minus");
    solve_cmd->add_option("--mask-side", solve_args.mask_side, "initial, final or both");
    solve_cmd->add_option("--phases", solve_args.phases, "comma-separated initial phases (radians)");
    solve_cmd->add_flag("--random-phases", solve_args.random_phases, "draw initial phases uniformly");
    solve_cmd->add_flag("--project-spectrum", solve_args.project_spectrum_flag,
                        "force sigma onto rho's spectrum");
    solve_cmd->add_option("--seed", solve_args.seed, "RNG seed (BRACHISTO_SEED as fallback)");
    solve_cmd->add_option("--output", solve_args.output, "run file path");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Statistical studies over random pairs");
    bench_cmd->require_subcommand(1);
    auto add_plan_flags = [&](CLI::App* cmd) {
        cmd->add_option("--dims", bench_args.dims, "comma-separated dimensions");
        cmd->add_option("--samples", bench_args.samples, "samples per dimension");
        cmd->add_option("--epsilon", bench_args.epsilon, "convergence threshold");
        cmd->add_option("--ensemble", bench_args.ensemble, "haar_pure or bures_mixed");
        cmd->add_option("--sigma-mode", bench_args.sigma_mode, "rotate or independent_project");
        cmd->add_option("--sign", bench_args.sign, "plus or minus");
        cmd->add_option("--mask-side", bench_args.mask_side, "initial, final or both");
        cmd->add_option("--max-iter", bench_args.max_iter, "iteration budget (0 = automatic)");
        cmd->add_option("--seed", bench_args.seed, "RNG seed (BRACHISTO_SEED as fallback)");
        cmd->add_option("--jobs", bench_args.jobs, "worker threads");
        cmd->add_option("--format", bench_args.format, "csv, json or both");
        cmd->add_option("--output", bench_args.output, "output directory");
    };
    auto* perf_cmd = bench_cmd->add_subcommand("performance", "time-ratio sweep vs dimension");
    add_plan_flags(perf_cmd);
    auto* iter_cmd = bench_cmd->add_subcommand("iterations", "iteration-count scaling sweep");
    add_plan_flags(iter_cmd);
    auto* multi_cmd = bench_cmd->add_subcommand("multistart", "many starts on one fixed pair");
    add_plan_flags(multi_cmd);
    multi_cmd->add_option("--dim", bench_args.dim, "pair dimension");
    multi_cmd->add_option("--starts", bench_args.starts, "number of random starts");
    multi_cmd->add_flag("--early-stop", bench_args.early_stop, "cancel once a start converges");
    auto* pert_cmd = bench_cmd->add_subcommand("perturbation", "stability under perturbations");
    add_plan_flags(pert_cmd);
    pert_cmd->add_option("--dim", bench_args.dim, "pair dimension");
    pert_cmd->add_option("--deltas", bench_args.deltas, "comma-separated strengths");
    pert_cmd->add_option("--kind", bench_args.kind, "convex or unitary");

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample", "Write random state files");
    sample_cmd->add_option("ensemble", sample_args.ensemble, "haar_pure or bures_mixed")
        ->required();
    sample_cmd->add_option("--dim", sample_args.dim, "state dimension")->required();
    sample_cmd->add_option("--count", sample_args.count, "number of states");
    sample_cmd->add_option("--seed", sample_args.seed, "RNG seed (BRACHISTO_SEED as fallback)");
    sample_cmd->add_option("--output", sample_args.output, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            if (solve_args.random_dim == 0 &&
                (solve_args.rho_path.empty() || solve_args.sigma_path.empty())) {
                std::cerr << "error: provide rho and sigma files or --random <dim>\n";
                return 1;
            }
            return cmd_solve(solve_args);
        }
        if (bench_cmd->parsed()) {
            if (perf_cmd->parsed()) return cmd_bench_performance(bench_args);
            if (iter_cmd->parsed()) return cmd_bench_iterations(bench_args);
            if (multi_cmd->parsed()) return cmd_bench_multistart(bench_args);
            if (pert_cmd->parsed()) return cmd_bench_perturbation(bench_args);
        }
        if (sample_cmd->parsed()) {
            return cmd_sample(sample_args);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
