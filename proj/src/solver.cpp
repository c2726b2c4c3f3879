#include "brachisto/solver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace brachisto {

// ---------------------------------- mask ------------------------------------

MaskSpec::MaskSpec(Matrix basis, const std::vector<std::vector<int>>& groups) {
    basis_ = std::move(basis);
    const Eigen::Index d = basis_.rows();
    mask_ = RealMatrix::Zero(d, d);
    for (const auto& g : groups) {
        for (int i : g) {
            for (int j : g) {
                mask_(i, j) = 1.0;
            }
        }
    }
}

MaskSpec MaskSpec::for_state(const DensityMatrix& state) {
    return MaskSpec(state.eigenbasis(), state.degeneracy_groups());
}

Matrix MaskSpec::apply(const Matrix& h) const {
    if (h.rows() != basis_.rows() || h.cols() != basis_.cols()) {
        throw std::invalid_argument("MaskSpec::apply: dimension mismatch");
    }
    const Matrix in_basis = basis_.adjoint() * h * basis_;
    return basis_ * in_basis.cwiseProduct(mask_.cast<Complex>()) * basis_.adjoint();
}

// ------------------------------- configuration ------------------------------

PhaseInit PhaseInit::from_vector(std::vector<double> v) {
    PhaseInit out;
    out.kind = Kind::vector;
    out.phases = std::move(v);
    return out;
}

PhaseInit PhaseInit::random() {
    PhaseInit out;
    out.kind = Kind::random_uniform;
    return out;
}

PhaseInit PhaseInit::from_blocks(std::vector<Matrix> b) {
    PhaseInit out;
    out.kind = Kind::blocks;
    out.blocks = std::move(b);
    return out;
}

int default_max_iterations(int dim, double epsilon) {
    const double log2d = std::ceil(std::log2(std::max(dim, 2)));
    const double eps_term = std::ceil(1.0 / std::sqrt(epsilon));
    const double n = 10.0 * std::max(log2d, 1.0) * eps_term;
    return static_cast<int>(std::min(n, 1e4));
}

// -------------------------------- operations --------------------------------

namespace {

// Per-group aligned sigma frames: for group g with rho columns R_g and sigma
// columns S_g, the polar factor W of S_g' R_g gives the aligned frame S_g W.
std::vector<Matrix> aligned_target_frames(const IsospectralPair& pair) {
    const auto& groups = pair.rho.degeneracy_groups();
    const Matrix& r = pair.rho.eigenbasis();
    const Matrix& s = pair.sigma.eigenbasis();
    std::vector<Matrix> frames;
    frames.reserve(groups.size());
    for (const auto& g : groups) {
        const int m = static_cast<int>(g.size());
        Matrix rg(r.rows(), m), sg(s.rows(), m);
        for (int c = 0; c < m; ++c) {
            rg.col(c) = r.col(g[c]);
            sg.col(c) = s.col(g[c]);
        }
        const Matrix overlap = sg.adjoint() * rg;
        Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix w = svd.matrixU() * svd.matrixV().adjoint();
        frames.push_back(sg * w);
    }
    return frames;
}

Matrix rho_group_columns(const IsospectralPair& pair, const std::vector<int>& g) {
    const Matrix& r = pair.rho.eigenbasis();
    Matrix rg(r.rows(), static_cast<Eigen::Index>(g.size()));
    for (std::size_t c = 0; c < g.size(); ++c) {
        rg.col(static_cast<Eigen::Index>(c)) = r.col(g[c]);
    }
    return rg;
}

Matrix haar_block(int m, RngStream& rng) {
    if (m == 1) {
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        Matrix u(1, 1);
        u(0, 0) = std::polar(1.0, phi);
        return u;
    }
    return sample_haar_unitary(m, rng);
}

}  // namespace

Matrix transport_unitary(const IsospectralPair& pair) {
    const auto& groups = pair.rho.degeneracy_groups();
    const auto frames = aligned_target_frames(pair);
    Matrix o = Matrix::Zero(pair.rho.dim(), pair.rho.dim());
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        o += frames[gi] * rho_group_columns(pair, groups[gi]).adjoint();
    }
    return o;
}

Matrix initial_unitary(const IsospectralPair& pair, const PhaseInit& phases, RngStream* rng) {
    const auto& groups = pair.rho.degeneracy_groups();
    if (pair.sigma.degeneracy_groups().size() != groups.size()) {
        throw std::invalid_argument("initial_unitary: degeneracy structures differ");
    }
    const int d = pair.rho.dim();
    const auto frames = aligned_target_frames(pair);

    std::vector<Matrix> block_unitaries(groups.size());
    switch (phases.kind) {
        case PhaseInit::Kind::zeros:
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                const int m = static_cast<int>(groups[gi].size());
                block_unitaries[gi] = Matrix::Identity(m, m);
            }
            break;
        case PhaseInit::Kind::vector: {
            if (static_cast<int>(phases.phases.size()) != d) {
                throw std::invalid_argument("initial_unitary: phase vector arity differs from dim");
            }
            if (pair.rho.is_degenerate()) {
                throw std::invalid_argument(
                    "initial_unitary: degenerate spectrum requires per-block unitaries");
            }
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                Matrix u(1, 1);
                u(0, 0) = std::polar(1.0, phases.phases[groups[gi][0]]);
                block_unitaries[gi] = u;
            }
            break;
        }
        case PhaseInit::Kind::random_uniform: {
            if (rng == nullptr) {
                throw std::invalid_argument("initial_unitary: random phases need an RngStream");
            }
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                block_unitaries[gi] = haar_block(static_cast<int>(groups[gi].size()), *rng);
            }
            break;
        }
        case PhaseInit::Kind::blocks: {
            if (phases.blocks.size() != groups.size()) {
                throw std::invalid_argument(
                    "initial_unitary: block count differs from degeneracy group count");
            }
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                const auto m = static_cast<Eigen::Index>(groups[gi].size());
                const Matrix& u = phases.blocks[gi];
                if (u.rows() != m || u.cols() != m) {
                    throw std::invalid_argument("initial_unitary: block size differs from group");
                }
                if (unitarity_defect(u) > NumericPolicy::defaults().unitarity) {
                    throw std::invalid_argument("initial_unitary: block is not unitary");
                }
                block_unitaries[gi] = u;
            }
            break;
        }
    }

    Matrix o = Matrix::Zero(d, d);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        o += frames[gi] * block_unitaries[gi] * rho_group_columns(pair, groups[gi]).adjoint();
    }
    return o;
}

std::vector<double> extract_geometric_phases(const Matrix& o, const IsospectralPair& pair) {
    if (pair.rho.is_degenerate()) {
        throw std::invalid_argument("extract_geometric_phases: spectrum is degenerate");
    }
    if (o.rows() != pair.rho.dim() || o.cols() != pair.rho.dim()) {
        throw std::invalid_argument("extract_geometric_phases: dimension mismatch");
    }
    const auto frames = aligned_target_frames(pair);
    const Matrix& r = pair.rho.eigenbasis();
    const int d = pair.rho.dim();
    std::vector<double> phis(d);
    for (int k = 0; k < d; ++k) {
        const Complex amp = (frames[k].col(0).adjoint() * o * r.col(k)).value();
        phis[k] = std::arg(amp);
    }
    return phis;
}

StepResult solver_step(const Matrix& o, const MaskSpec& mask, SignConvention sign,
                       const NumericPolicy& policy) {
    StepResult out;
    out.h = logm_unitary_principal(o, policy);
    out.h_parallel = mask.apply(out.h);
    const Complex scale(0.0, sign == SignConvention::plus ? 1.0 : -1.0);
    out.o_next = o * expm_hermitian(out.h_parallel, scale, policy);
    return out;
}

namespace {

double eta_star_or_nan(const Matrix& h, const DensityMatrix& rho) {
    try {
        return efficiency_eta_star(h, rho);
    } catch (const std::invalid_argument&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

SolverRun solve(const IsospectralPair& pair, const SolverConfig& config,
                const NumericPolicy& policy) {
    if (config.epsilon <= 0.0 || config.epsilon >= 1.0) {
        throw std::invalid_argument("solve: epsilon must lie in (0, 1)");
    }
    const int d = pair.rho.dim();
    const int max_iter = config.max_iterations > 0
                             ? config.max_iterations
                             : default_max_iterations(d, config.epsilon);

    SolverRun run;
    run.config = config;

    RngStream rng(config.rng);
    Matrix o = initial_unitary(pair, config.initial_phases, &rng);

    const MaskSpec mask_rho = MaskSpec::for_state(pair.rho);
    const bool need_sigma = config.side != MaskSide::initial;
    std::optional<MaskSpec> mask_sigma;
    if (need_sigma) {
        mask_sigma.emplace(MaskSpec::for_state(pair.sigma));
    }

    const bool record_phases = !pair.rho.is_degenerate();
    const double left_sign = config.sign == SignConvention::plus ? 1.0 : -1.0;

    for (int j = 0; j <= max_iter; ++j) {
        const Matrix h = logm_unitary_principal(o, policy);
        // Below the noise floor the parallel ratio is meaningless; this is the
        // identity solution (rho = sigma) and the run is done.
        const double h_norm =
            hs_norm(h) > policy.zero_generator ? hs_norm(h) : 0.0;

        run.max_mapping_defect = std::max(
            run.max_mapping_defect,
            hs_norm(o * pair.rho.matrix() * o.adjoint() - pair.sigma.matrix()));

        IterationRecord rec;
        rec.index = j;
        rec.hamiltonian_hs_norm = h_norm;
        rec.efficiency_star = eta_star_or_nan(h, pair.rho);
        if (record_phases) {
            rec.geometric_phases = extract_geometric_phases(o, pair);
        }

        Matrix h_par_rho, h_par_sigma;
        double ratio = 0.0;
        if (h_norm > 0.0) {
            if (config.side != MaskSide::final) {
                h_par_rho = mask_rho.apply(h);
            }
            if (need_sigma) {
                h_par_sigma = mask_sigma->apply(h);
            }
            switch (config.side) {
                case MaskSide::initial: ratio = hs_norm(h_par_rho) / h_norm; break;
                case MaskSide::final: ratio = hs_norm(h_par_sigma) / h_norm; break;
                case MaskSide::both:
                    ratio = std::max(hs_norm(h_par_rho), hs_norm(h_par_sigma)) / h_norm;
                    break;
            }
        }
        rec.parallel_ratio = ratio;
        run.iterations.push_back(std::move(rec));

        if (h_norm == 0.0 || ratio <= config.epsilon) {
            run.converged = true;
            run.final_hamiltonian = h;
            run.final_unitary = o;
            return run;
        }
        if (j == max_iter) {
            run.converged = false;
            run.final_hamiltonian = h;
            run.final_unitary = o;
            return run;
        }

        switch (config.side) {
            case MaskSide::initial:
                o = o * expm_hermitian(h_par_rho, Complex(0.0, left_sign), policy);
                break;
            case MaskSide::final:
                o = expm_hermitian(h_par_sigma, Complex(0.0, left_sign), policy) * o;
                break;
            case MaskSide::both:
                // Simultaneous removal as written: e^{+i M_sigma[H]} O e^{-i M_rho[H]}
                // under the minus (update-equation) convention, mirrored for plus.
                o = expm_hermitian(h_par_sigma, Complex(0.0, -left_sign), policy) * o *
                    expm_hermitian(h_par_rho, Complex(0.0, left_sign), policy);
                break;
        }
    }
    return run;  // unreachable
}

// ------------------------------- serialization ------------------------------

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json re_row = nlohmann::json::array();
        nlohmann::json im_row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return nlohmann::json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const int d = j.at("dim").get<int>();
    Matrix m(d, d);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c < d; ++c) {
            m(i, c) = Complex(re.at(i).at(c).get<double>(), im.at(i).at(c).get<double>());
        }
    }
    return m;
}

namespace {

std::string to_string(SignConvention s) {
    return s == SignConvention::plus ? "plus" : "minus";
}

std::string to_string(MaskSide s) {
    switch (s) {
        case MaskSide::initial: return "initial";
        case MaskSide::final: return "final";
        case MaskSide::both: return "both";
    }
    return "initial";
}

std::string to_string(PhaseInit::Kind k) {
    switch (k) {
        case PhaseInit::Kind::zeros: return "zeros";
        case PhaseInit::Kind::vector: return "vector";
        case PhaseInit::Kind::random_uniform: return "random";
        case PhaseInit::Kind::blocks: return "blocks";
    }
    return "zeros";
}

SignConvention sign_from_string(const std::string& s) {
    if (s == "plus") return SignConvention::plus;
    if (s == "minus") return SignConvention::minus;
    throw std::invalid_argument("unknown sign convention: " + s);
}

MaskSide side_from_string(const std::string& s) {
    if (s == "initial") return MaskSide::initial;
    if (s == "final") return MaskSide::final;
    if (s == "both") return MaskSide::both;
    throw std::invalid_argument("unknown mask side: " + s);
}

PhaseInit::Kind phase_kind_from_string(const std::string& s) {
    if (s == "zeros") return PhaseInit::Kind::zeros;
    if (s == "vector") return PhaseInit::Kind::vector;
    if (s == "random") return PhaseInit::Kind::random_uniform;
    if (s == "blocks") return PhaseInit::Kind::blocks;
    throw std::invalid_argument("unknown phase init kind: " + s);
}

nlohmann::json nan_to_null(double x) {
    if (std::isnan(x)) {
        return nullptr;
    }
    return x;
}

double null_to_nan(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

nlohmann::json solver_run_to_json(const SolverRun& run) {
    nlohmann::json cfg{
        {"epsilon", run.config.epsilon},
        {"max_iterations", run.config.max_iterations},
        {"sign", to_string(run.config.sign)},
        {"mask_side", to_string(run.config.side)},
        {"phase_init", to_string(run.config.initial_phases.kind)},
        {"seed", run.config.rng.value},
        {"seed_label", run.config.rng.label},
    };
    if (run.config.initial_phases.kind == PhaseInit::Kind::vector) {
        cfg["phases"] = run.config.initial_phases.phases;
    }
    if (run.config.initial_phases.kind == PhaseInit::Kind::blocks) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const Matrix& b : run.config.initial_phases.blocks) {
            blocks.push_back(matrix_to_json(b));
        }
        cfg["blocks"] = std::move(blocks);
    }

    nlohmann::json iters = nlohmann::json::array();
    for (const IterationRecord& rec : run.iterations) {
        nlohmann::json r{
            {"index", rec.index},
            {"parallel_ratio", rec.parallel_ratio},
            {"efficiency_star", nan_to_null(rec.efficiency_star)},
            {"hamiltonian_hs_norm", rec.hamiltonian_hs_norm},
        };
        if (rec.geometric_phases) {
            r["geometric_phases"] = *rec.geometric_phases;
        }
        iters.push_back(std::move(r));
    }

    return nlohmann::json{
        {"config", std::move(cfg)},
        {"iterations", std::move(iters)},
        {"converged", run.converged},
        {"max_mapping_defect", run.max_mapping_defect},
        {"final_hamiltonian", matrix_to_json(run.final_hamiltonian)},
        {"final_unitary", matrix_to_json(run.final_unitary)},
    };
}

SolverRun solver_run_from_json(const nlohmann::json& j) {
    SolverRun run;
    const auto& cfg = j.at("config");
    run.config.epsilon = cfg.at("epsilon").get<double>();
    run.config.max_iterations = cfg.at("max_iterations").get<int>();
    run.config.sign = sign_from_string(cfg.at("sign").get<std::string>());
    run.config.side = side_from_string(cfg.at("mask_side").get<std::string>());
    run.config.initial_phases.kind = phase_kind_from_string(cfg.at("phase_init").get<std::string>());
    run.config.rng.value = cfg.at("seed").get<std::uint64_t>();
    run.config.rng.label = cfg.at("seed_label").get<std::string>();
    if (cfg.contains("phases")) {
        run.config.initial_phases.phases = cfg.at("phases").get<std::vector<double>>();
    }
    if (cfg.contains("blocks")) {
        for (const auto& b : cfg.at("blocks")) {
            run.config.initial_phases.blocks.push_back(matrix_from_json(b));
        }
    }

    for (const auto& r : j.at("iterations")) {
        IterationRecord rec;
        rec.index = r.at("index").get<int>();
        rec.parallel_ratio = r.at("parallel_ratio").get<double>();
        rec.efficiency_star = null_to_nan(r.at("efficiency_star"));
        rec.hamiltonian_hs_norm = r.at("hamiltonian_hs_norm").get<double>();
        if (r.contains("geometric_phases")) {
            rec.geometric_phases = r.at("geometric_phases").get<std::vector<double>>();
        }
        run.iterations.push_back(std::move(rec));
    }

    run.converged = j.at("converged").get<bool>();
    run.max_mapping_defect = j.at("max_mapping_defect").get<double>();
    run.final_hamiltonian = matrix_from_json(j.at("final_hamiltonian"));
    run.final_unitary = matrix_from_json(j.at("final_unitary"));
    return run;
}

}  // namespace brachisto
