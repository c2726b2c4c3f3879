// states.hpp — Density-matrix domain type with cached eigensystem and
// degeneracy grouping, random ensembles (Haar pure, Bures mixed, Haar
// unitary, GUE), state perturbations, and the state file format.

#pragma once

#include "brachisto/linalg.hpp"
#include "brachisto/rng.hpp"

#include <filesystem>
#include <vector>

namespace brachisto {

// ------------------------------- DensityMatrix ------------------------------

// Hermitian, PSD, unit-trace state.  The spectrum is sorted descending, the
// eigenbasis carries the deterministic column gauge from eig_hermitian, and
// eigenvalues are partitioned into degeneracy groups by chaining adjacent
// gaps |lambda_i - lambda_{i+1}| <= tol on the sorted spectrum (the chained
// criterion: near-ties merge transitively).
class DensityMatrix {
  public:
    static DensityMatrix from_matrix(const Matrix& m,
                                     double degeneracy_tol = NumericPolicy::defaults().degeneracy,
                                     const NumericPolicy& policy = NumericPolicy::defaults());

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    const RealVector& spectrum() const { return spectrum_; }
    const Matrix& eigenbasis() const { return eigenbasis_; }
    const std::vector<std::vector<int>>& degeneracy_groups() const { return groups_; }
    double degeneracy_tol() const { return degeneracy_tol_; }

    double purity() const { return spectrum_.squaredNorm(); }
    bool is_pure(double tol = NumericPolicy::defaults().purity) const {
        return 1.0 - spectrum_(0) <= tol;
    }
    bool is_degenerate() const;

  private:
    DensityMatrix() = default;

    Matrix matrix_;
    RealVector spectrum_;
    Matrix eigenbasis_;
    std::vector<std::vector<int>> groups_;
    double degeneracy_tol_ = 0.0;
};

// Pair of states with matching spectra; exactly the pairs connected by some
// unitary.
struct IsospectralPair {
    DensityMatrix rho;
    DensityMatrix sigma;

    static IsospectralPair make(DensityMatrix rho, DensityMatrix sigma,
                                const NumericPolicy& policy = NumericPolicy::defaults());
};

// --------------------------------- sampling ---------------------------------

// d x d matrix of i.i.d. complex Gaussians.
Matrix sample_ginibre(int d, RngStream& rng);

// Haar-distributed unitary (Ginibre then QR with the diagonal of R
// phase-normalized).
Matrix sample_haar_unitary(int d, RngStream& rng);

// Rank-1 projector onto a Haar-random (Fubini-Study) pure state.
DensityMatrix sample_haar_pure(int d, RngStream& rng,
                               double degeneracy_tol = NumericPolicy::defaults().degeneracy);

// Bures-measure mixed state: rho ~ (1+U) G G' (1+U') normalized to unit
// trace, with G Ginibre and U Haar.
DensityMatrix sample_bures_mixed(int d, RngStream& rng,
                                 double degeneracy_tol = NumericPolicy::defaults().degeneracy);

// GUE draw, Hermitian, not normalized.
Matrix sample_gue(int d, RngStream& rng);

// sigma = U rho U' with U Haar, paired with rho.
IsospectralPair make_isospectral_target(const DensityMatrix& rho, RngStream& rng);

// Keeps sigma's eigenbasis but replaces its spectrum with rho's, pairing
// eigenvectors in descending order; used when rho and sigma are drawn
// independently and must be forced isospectral.
DensityMatrix project_spectrum(const DensityMatrix& sigma, const DensityMatrix& rho);

// ------------------------------- perturbations ------------------------------

// (1-delta) rho + delta chi with chi Bures-random.
DensityMatrix perturb_convex(const DensityMatrix& rho, double delta, RngStream& rng);

// e^{iV delta} rho e^{-iV delta} with V a GUE draw rescaled to unit HS norm.
DensityMatrix perturb_unitary(const DensityMatrix& rho, double delta, RngStream& rng);

// --------------------------------- state files ------------------------------

// {"dim": d, "re": [[...]], "im": [[...]]} with row-major d x d real arrays;
// values are written with 17 significant digits so doubles round-trip exactly.
std::string state_to_json(const DensityMatrix& state);
void write_state_json(const std::filesystem::path& path, const DensityMatrix& state);
DensityMatrix read_state_json(const std::filesystem::path& path,
                              double degeneracy_tol = NumericPolicy::defaults().degeneracy,
                              const NumericPolicy& policy = NumericPolicy::defaults());
DensityMatrix state_from_json_text(const std::string& text,
                                   double degeneracy_tol = NumericPolicy::defaults().degeneracy,
                                   const NumericPolicy& policy = NumericPolicy::defaults());

}  // namespace brachisto
