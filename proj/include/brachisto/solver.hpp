// solver.hpp — The commutant mask, the iterative parallel-component removal
// that drives a unitary connecting two isospectral states toward a fully
// perpendicular generator, and full per-iteration tracing.

#pragma once

#include "brachisto/metrics.hpp"
#include "brachisto/states.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <vector>

namespace brachisto {

// ---------------------------------- mask ------------------------------------

// Blockwise projection onto the commutant of a reference state: in the
// state's eigenbasis D, M[H] = D (M o D'HD) D' where M_ij = 1 iff i and j
// share a degeneracy group.  Linear, idempotent, HS-orthogonal.
class MaskSpec {
  public:
    static MaskSpec for_state(const DensityMatrix& state);
    // Explicit basis + groups, mainly for gauge-invariance checks.
    MaskSpec(Matrix basis, const std::vector<std::vector<int>>& groups);

    Matrix apply(const Matrix& h) const;

    const Matrix& basis() const { return basis_; }
    const RealMatrix& mask_matrix() const { return mask_; }

  private:
    Matrix basis_;
    RealMatrix mask_;
};

// Free-function form used throughout the library and tests.
inline Matrix apply_mask(const Matrix& h, const MaskSpec& mask) {
    return mask.apply(h);
}

// ------------------------------- configuration ------------------------------

// The update exponent sign.  `plus` composes O e^{+i M[H]} (the form the
// derivation of the iteration yields); `minus` composes O e^{-i M[H]} (the
// update-equation form).  Both preserve the state mapping and share fixed
// points; only `plus` contracts the parallel component in practice.
enum class SignConvention { plus, minus };

// Which state's commutant is projected out each iteration.  `initial` masks
// with rho and right-composes; `final` masks with sigma and left-composes;
// `both` applies the simultaneous two-sided update verbatim.
enum class MaskSide { initial, final, both };

struct PhaseInit {
    enum class Kind { zeros, vector, random_uniform, blocks };
    Kind kind = Kind::zeros;
    std::vector<double> phases;   // Kind::vector, length d
    std::vector<Matrix> blocks;   // Kind::blocks, one unitary per degeneracy group

    static PhaseInit zeros() { return {}; }
    static PhaseInit from_vector(std::vector<double> v);
    static PhaseInit random();
    static PhaseInit from_blocks(std::vector<Matrix> b);
};

// 10 ceil(log2 d) ceil(eps^{-1/2}), capped at 10^4.
int default_max_iterations(int dim, double epsilon);

struct SolverConfig {
    double epsilon = 1e-4;
    int max_iterations = 0;  // 0 selects default_max_iterations(d, epsilon)
    SignConvention sign = SignConvention::plus;
    MaskSide side = MaskSide::initial;
    PhaseInit initial_phases;
    RngSeed rng;  // consumed only by PhaseInit::random
};

// --------------------------------- run trace --------------------------------

struct IterationRecord {
    int index = 0;
    double parallel_ratio = 0.0;   // ||H_par|| / ||H|| in HS norm
    double efficiency_star = 1.0;  // NaN when the generator acts trivially
    std::optional<std::vector<double>> geometric_phases;  // absent when degenerate
    double hamiltonian_hs_norm = 0.0;
};

struct SolverRun {
    SolverConfig config;
    std::vector<IterationRecord> iterations;
    bool converged = false;
    Matrix final_hamiltonian;
    Matrix final_unitary;
    double max_mapping_defect = 0.0;  // max_j ||O_j rho O_j' - sigma||_HS

    int steps() const { return static_cast<int>(iterations.size()) - 1; }
};

// -------------------------------- operations --------------------------------

// The zero-phase transport unitary mapping rho's eigenvectors onto sigma's,
// pairing by descending-spectrum order.  Within each degeneracy group the
// sigma frame is aligned to the rho frame through the polar factor of their
// overlap, which fixes the gauge deterministically and reduces to phase
// alignment of <s_k|r_k> for non-degenerate spectra.
Matrix transport_unitary(const IsospectralPair& pair);

// O carrying the given geometric phases (or per-block unitaries) on top of
// the transport frame.  Satisfies O rho O' = sigma by construction.
Matrix initial_unitary(const IsospectralPair& pair, const PhaseInit& phases,
                       RngStream* rng = nullptr);

// phi_k = arg <s_k|o|r_k> in (-pi, pi] against the transport frame; requires a
// non-degenerate spectrum.  initial_unitary(pair, phi) reproduces o exactly.
std::vector<double> extract_geometric_phases(const Matrix& o, const IsospectralPair& pair);

struct StepResult {
    Matrix o_next;
    Matrix h;           // i log o
    Matrix h_parallel;  // mask applied to h
};

// One update: h = i log o, h_par = mask[h], o_next = o e^{s i h_par}.
StepResult solver_step(const Matrix& o, const MaskSpec& mask, SignConvention sign,
                       const NumericPolicy& policy = NumericPolicy::defaults());

// Iterates until ||H_par|| <= eps ||H|| (both masked ratios for MaskSide::both)
// or the iteration budget runs out; a run that stops on the budget is returned
// with converged = false rather than raising.
SolverRun solve(const IsospectralPair& pair, const SolverConfig& config,
                const NumericPolicy& policy = NumericPolicy::defaults());

// ------------------------------- serialization ------------------------------

nlohmann::json solver_run_to_json(const SolverRun& run);
SolverRun solver_run_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace brachisto
