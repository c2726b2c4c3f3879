#include "brachisto/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace brachisto {

const NumericPolicy& NumericPolicy::defaults() {
    static const NumericPolicy policy{};
    return policy;
}

double op_norm(const Matrix& a) {
    require_square(a, "op_norm");
    if (!a.allFinite()) {
        throw std::invalid_argument("op_norm: matrix has non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.adjoint() * a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigensolverError("op_norm: eigensolver failed");
    }
    return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

namespace {

// Rotate each column so its largest-magnitude component is real positive.
// Ties are broken by the lowest row index, which keeps the gauge reproducible.
void fix_column_gauge(Matrix& v) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double m = std::abs(v(i, k));
            if (m > best + 1e-15) {
                best = m;
                imax = i;
            }
        }
        if (best > 0.0) {
            v.col(k) *= std::conj(v(imax, k)) / best;
        }
    }
}

}  // namespace

SpectralDecomposition eig_hermitian(const Matrix& a, const NumericPolicy& policy) {
    require_square(a, "eig_hermitian");
    if (!is_hermitian(a, policy.hermiticity)) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a));
    if (solver.info() != Eigen::Success) {
        throw EigensolverError("eig_hermitian: eigensolver failed to converge");
    }
    const Eigen::Index d = a.rows();
    SpectralDecomposition out;
    out.eigenvalues = RealVector(d);
    out.eigenvectors = Matrix(d, d);
    // SelfAdjointEigenSolver sorts ascending; flip to descending.
    for (Eigen::Index k = 0; k < d; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(d - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(d - 1 - k);
    }
    fix_column_gauge(out.eigenvectors);
    return out;
}

Matrix expm_hermitian(const Matrix& h, Complex scale, const NumericPolicy& policy) {
    const SpectralDecomposition es = eig_hermitian(h, policy);
    const Eigen::Index d = h.rows();
    Vector phases(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        phases(k) = std::exp(scale * es.eigenvalues(k));
    }
    return es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix logm_unitary_principal(const Matrix& o, const NumericPolicy& policy) {
    require_square(o, "logm_unitary_principal");
    if (unitarity_defect(o) > policy.unitarity) {
        throw std::invalid_argument("logm_unitary_principal: input is not unitary within tolerance");
    }
    Eigen::ComplexSchur<Matrix> schur(o, true);
    if (schur.info() != Eigen::Success) {
        throw EigensolverError("logm_unitary_principal: Schur factorization failed");
    }
    const Matrix& t = schur.matrixT();
    const Matrix& z = schur.matrixU();
    const Eigen::Index d = o.rows();

    // For a normal matrix the Schur form is diagonal up to roundoff; a large
    // residual means the factorization cannot be trusted as an eigensystem.
    double offdiag = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            offdiag += std::norm(t(i, j));
        }
    }
    if (std::sqrt(offdiag) > policy.reconstruction) {
        throw EigensolverError("logm_unitary_principal: Schur form of unitary is not diagonal");
    }

    constexpr double pi = std::numbers::pi;
    RealVector theta(d);
    double theta_min = pi;
    double theta_max = -pi;
    for (Eigen::Index k = 0; k < d; ++k) {
        double ph = std::arg(t(k, k));
        if (ph <= -pi + policy.branch_pi_snap) {
            ph = pi;  // deterministic branch assignment at the cut
        }
        theta(k) = ph;
        theta_min = std::min(theta_min, ph);
        theta_max = std::max(theta_max, ph);
    }
    if (theta_max > pi - policy.branch_cluster && theta_min < -pi + policy.branch_cluster) {
        throw BranchCutError(
            "logm_unitary_principal: eigenphases cluster across the branch cut at -pi/pi");
    }

    Matrix h = z * (-theta).cast<Complex>().asDiagonal() * z.adjoint();
    return hermitize(h);
}

}  // namespace brachisto
