#include "brachisto/states.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace brachisto {

// ------------------------------- DensityMatrix ------------------------------

DensityMatrix DensityMatrix::from_matrix(const Matrix& m, double degeneracy_tol,
                                         const NumericPolicy& policy) {
    require_square(m, "DensityMatrix");
    if (!m.allFinite()) {
        throw std::invalid_argument("DensityMatrix: non-finite entries");
    }
    if (!is_hermitian(m, policy.density_hermiticity)) {
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within tolerance");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > policy.unit_trace) {
        throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond tolerance");
    }

    DensityMatrix out;
    out.matrix_ = hermitize(m);
    out.degeneracy_tol_ = degeneracy_tol;

    SpectralDecomposition es = eig_hermitian(out.matrix_, policy);
    const int d = out.dim();
    for (int k = 0; k < d; ++k) {
        const double lam = es.eigenvalues(k);
        if (lam < -policy.eigenvalue_clamp) {
            throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
        }
        if (lam < 0.0) {
            es.eigenvalues(k) = 0.0;
        }
    }
    const double sum = es.eigenvalues.sum();
    if (sum <= 0.0) {
        throw std::invalid_argument("DensityMatrix: spectrum sums to zero");
    }
    es.eigenvalues /= sum;

    out.spectrum_ = es.eigenvalues;
    out.eigenbasis_ = es.eigenvectors;

    // Chained grouping on the sorted spectrum.
    out.groups_.push_back({0});
    for (int k = 1; k < d; ++k) {
        if (out.spectrum_(k - 1) - out.spectrum_(k) <= degeneracy_tol) {
            out.groups_.back().push_back(k);
        } else {
            out.groups_.push_back({k});
        }
    }
    return out;
}

bool DensityMatrix::is_degenerate() const {
    return groups_.size() != static_cast<std::size_t>(dim());
}

IsospectralPair IsospectralPair::make(DensityMatrix rho, DensityMatrix sigma,
                                      const NumericPolicy& policy) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("IsospectralPair: dimension mismatch");
    }
    for (int k = 0; k < rho.dim(); ++k) {
        if (std::abs(rho.spectrum()(k) - sigma.spectrum()(k)) > policy.isospectral) {
            throw std::invalid_argument("IsospectralPair: spectra differ beyond tolerance");
        }
    }
    return IsospectralPair{std::move(rho), std::move(sigma)};
}

// --------------------------------- sampling ---------------------------------

Matrix sample_ginibre(int d, RngStream& rng) {
    if (d < 1) {
        throw std::invalid_argument("sample_ginibre: d must be >= 1");
    }
    Matrix g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return g;
}

Matrix sample_haar_unitary(int d, RngStream& rng) {
    const Matrix g = sample_ginibre(d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        const Complex rkk = r(k, k);
        const double m = std::abs(rkk);
        q.col(k) *= (m > 0.0) ? rkk / m : Complex(1.0, 0.0);
    }
    return q;
}

DensityMatrix sample_haar_pure(int d, RngStream& rng, double degeneracy_tol) {
    if (d < 2) {
        throw std::invalid_argument("sample_haar_pure: d must be >= 2");
    }
    Vector psi(d);
    for (int i = 0; i < d; ++i) {
        psi(i) = Complex(rng.normal(), rng.normal());
    }
    psi.normalize();
    return DensityMatrix::from_matrix(psi * psi.adjoint(), degeneracy_tol);
}

DensityMatrix sample_bures_mixed(int d, RngStream& rng, double degeneracy_tol) {
    if (d < 2) {
        throw std::invalid_argument("sample_bures_mixed: d must be >= 2");
    }
    const Matrix g = sample_ginibre(d, rng);
    const Matrix u = sample_haar_unitary(d, rng);
    const Matrix a = (Matrix::Identity(d, d) + u) * g;
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::from_matrix(hermitize(rho), degeneracy_tol);
}

Matrix sample_gue(int d, RngStream& rng) {
    return hermitize(sample_ginibre(d, rng));
}

IsospectralPair make_isospectral_target(const DensityMatrix& rho, RngStream& rng) {
    const Matrix u = sample_haar_unitary(rho.dim(), rng);
    const Matrix sig = hermitize(u * rho.matrix() * u.adjoint());
    return IsospectralPair::make(rho, DensityMatrix::from_matrix(sig, rho.degeneracy_tol()));
}

DensityMatrix project_spectrum(const DensityMatrix& sigma, const DensityMatrix& rho) {
    if (sigma.dim() != rho.dim()) {
        throw std::invalid_argument("project_spectrum: dimension mismatch");
    }
    const Matrix& v = sigma.eigenbasis();
    const Matrix m =
        hermitize(v * rho.spectrum().cast<Complex>().asDiagonal() * v.adjoint());
    return DensityMatrix::from_matrix(m, rho.degeneracy_tol());
}

// ------------------------------- perturbations ------------------------------

DensityMatrix perturb_convex(const DensityMatrix& rho, double delta, RngStream& rng) {
    if (delta < 0.0 || delta > 1.0) {
        throw std::invalid_argument("perturb_convex: delta must lie in [0, 1]");
    }
    const DensityMatrix chi = sample_bures_mixed(rho.dim(), rng, rho.degeneracy_tol());
    const Matrix m = (1.0 - delta) * rho.matrix() + delta * chi.matrix();
    return DensityMatrix::from_matrix(m, rho.degeneracy_tol());
}

DensityMatrix perturb_unitary(const DensityMatrix& rho, double delta, RngStream& rng) {
    Matrix v = sample_gue(rho.dim(), rng);
    const double n = hs_norm(v);
    if (n > 0.0) {
        v /= n;
    }
    const Matrix u = expm_hermitian(v, Complex(0.0, delta));
    return DensityMatrix::from_matrix(hermitize(u * rho.matrix() * u.adjoint()),
                                      rho.degeneracy_tol());
}

// --------------------------------- state files ------------------------------

namespace {

std::string format_17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

}  // namespace

std::string state_to_json(const DensityMatrix& state) {
    const Matrix& m = state.matrix();
    const int d = state.dim();
    std::ostringstream os;
    os << "{\n  \"dim\": " << d << ",\n";
    for (int part = 0; part < 2; ++part) {
        os << "  \"" << (part == 0 ? "re" : "im") << "\": [\n";
        for (int i = 0; i < d; ++i) {
            os << "    [";
            for (int j = 0; j < d; ++j) {
                const double v = (part == 0) ? m(i, j).real() : m(i, j).imag();
                os << format_17(v) << (j + 1 < d ? ", " : "");
            }
            os << "]" << (i + 1 < d ? "," : "") << "\n";
        }
        os << "  ]" << (part == 0 ? "," : "") << "\n";
    }
    os << "}\n";
    return os.str();
}

void write_state_json(const std::filesystem::path& path, const DensityMatrix& state) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_state_json: cannot open " + path.string());
    }
    out << state_to_json(state);
    if (!out) {
        throw std::runtime_error("write_state_json: write failed for " + path.string());
    }
}

DensityMatrix state_from_json_text(const std::string& text, double degeneracy_tol,
                                   const NumericPolicy& policy) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("dim") || !j.contains("re") || !j.contains("im")) {
        throw std::invalid_argument("state file: missing dim/re/im fields");
    }
    const int d = j.at("dim").get<int>();
    if (d < 1) {
        throw std::invalid_argument("state file: dim must be >= 1");
    }
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d) {
        throw std::invalid_argument("state file: re/im row count differs from dim");
    }
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(re[i].size()) != d || static_cast<int>(im[i].size()) != d) {
            throw std::invalid_argument("state file: re/im column count differs from dim");
        }
        for (int jcol = 0; jcol < d; ++jcol) {
            m(i, jcol) = Complex(re[i][jcol].get<double>(), im[i][jcol].get<double>());
        }
    }
    return DensityMatrix::from_matrix(m, degeneracy_tol, policy);
}

DensityMatrix read_state_json(const std::filesystem::path& path, double degeneracy_tol,
                              const NumericPolicy& policy) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_state_json: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return state_from_json_text(buf.str(), degeneracy_tol, policy);
}

}  // namespace brachisto
