// linalg.hpp — Dense complex matrix primitives: Hilbert-Schmidt products,
// commutators, Hermitian/unitary spectral decompositions, matrix exponential
// and the principal matrix logarithm of unitaries.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace brachisto {

using Complex    = std::complex<double>;
using Matrix     = Eigen::MatrixXcd;
using Vector     = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// ------------------------------ numeric policy ------------------------------

// All tolerances used across the library, so tests can tighten or loosen
// them uniformly.
struct NumericPolicy {
    double hermiticity         = 1e-10;  // Hermiticity checks on operator inputs
    double unitarity           = 1e-10;  // ||U'U - 1||_HS bound for unitary inputs
    double reconstruction      = 1e-9;   // spectral reconstruction defects
    double density_hermiticity = 1e-12;  // Hermiticity of density-matrix inputs
    double unit_trace          = 1e-12;  // |tr(rho) - 1| bound
    double eigenvalue_clamp    = 1e-12;  // eigenvalues in [-clamp, 0) are zeroed
    double isospectral         = 1e-9;   // entrywise agreement of sorted spectra
    double degeneracy          = 1e-8;   // default eigenvalue grouping tolerance
    double state_mapping       = 1e-9;   // ||O rho O' - sigma||_HS along solver runs
    double purity              = 1e-9;   // 1 - lambda_max bound for pure states
    double branch_pi_snap      = 1e-12;  // eigenphases within this of -pi map to +pi
    double branch_cluster      = 1e-8;   // eigenphase clustering across the cut
    double zero_generator      = 1e-12;  // ||H||_HS below this counts as the zero generator

    static const NumericPolicy& defaults();
};

// Thrown when the principal log is requested for a unitary whose eigenphases
// cluster across the branch cut at -pi/pi; the result would be unstable under
// perturbations of the input, so it is reported rather than silently returned.
struct BranchCutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a spectral factorization fails to reproduce its input.
struct EigensolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------ basic operations ----------------------------

inline void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square with dim >= 1");
    }
}

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
}

// tr(a' b)
inline Complex hs_inner(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "hs_inner");
    return (a.adjoint() * b).trace();
}

inline double hs_norm(const Matrix& a) {
    return std::sqrt(std::max(a.squaredNorm(), 0.0));
}

// Largest singular value.
double op_norm(const Matrix& a);

inline Matrix commutator(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_dim(a, b, "hadamard");
    return a.cwiseProduct(b);
}

inline Matrix hermitize(const Matrix& a) {
    return (a + a.adjoint()) / 2.0;
}

inline bool is_hermitian(const Matrix& a, double tol) {
    return a.rows() == a.cols() && hs_norm(a - a.adjoint()) <= tol;
}

// ||U'U - 1||_HS
inline double unitarity_defect(const Matrix& u) {
    return hs_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

// ----------------------------- spectral routines ----------------------------

// Eigensystem of a Hermitian matrix: real eigenvalues sorted descending,
// orthonormal eigenvector columns with a deterministic gauge (the largest-
// magnitude component of each column is rotated to the positive real axis).
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;
};

SpectralDecomposition eig_hermitian(const Matrix& a,
                                    const NumericPolicy& policy = NumericPolicy::defaults());

// V diag(exp(scale * lambda_k)) V' built from eig_hermitian(h).
Matrix expm_hermitian(const Matrix& h, Complex scale,
                      const NumericPolicy& policy = NumericPolicy::defaults());

// H = i log O on the principal branch: eigenphases theta_k in (-pi, pi],
// H = V diag(-theta_k) V'.  Guarantees expm_hermitian(H, -i) ~ O and returns
// an exactly Hermitian matrix.  The unitary is factorized as a general normal
// matrix through its Schur form, so no Hermitian structure is assumed.
Matrix logm_unitary_principal(const Matrix& o,
                              const NumericPolicy& policy = NumericPolicy::defaults());

}  // namespace brachisto
