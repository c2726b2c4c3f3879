#include "brachisto/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brachisto {

namespace {

constexpr double kTiny = 1e-14;

void require_state_dims(const Matrix& h, const DensityMatrix& rho, const char* who) {
    if (h.rows() != rho.dim() || h.cols() != rho.dim()) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
}

double clamp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

double energy_stddev(const Matrix& h, const DensityMatrix& rho) {
    require_state_dims(h, rho, "energy_stddev");
    const Matrix& r = rho.matrix();
    const double second = (r * h * h).trace().real();
    const double first = (r * h).trace().real();
    return std::sqrt(std::max(second - first * first, 0.0));
}

double evolution_speed_hs(const Matrix& h, const DensityMatrix& rho) {
    require_state_dims(h, rho, "evolution_speed_hs");
    return hs_norm(commutator(h, rho.matrix()));
}

double fubini_study_distance(const DensityMatrix& psi, const DensityMatrix& phi) {
    if (!psi.is_pure() || !phi.is_pure()) {
        throw std::invalid_argument("fubini_study_distance: states must be pure");
    }
    if (psi.dim() != phi.dim()) {
        throw std::invalid_argument("fubini_study_distance: dimension mismatch");
    }
    const double overlap2 = (psi.matrix() * phi.matrix()).trace().real();
    return std::acos(clamp01(std::sqrt(std::max(overlap2, 0.0))));
}

QslReport qsl_pure(const DensityMatrix& psi, const DensityMatrix& phi, const Matrix& h,
                   double tau) {
    const double dfs = fubini_study_distance(psi, phi);
    const double dh = energy_stddev(h, psi);
    QslReport out;
    out.bound_kind = QslKind::mandelstam_tamm_pure;
    out.tau = tau;
    if (dfs <= kTiny) {
        // Coinciding states: zero bound, sentinel ratio excluded from stats.
        out.t_qsl = 0.0;
        out.time_ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    if (dh <= kTiny) {
        // Zero speed with distinct states: no finite time satisfies the bound.
        out.t_qsl = std::numeric_limits<double>::infinity();
        out.time_ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    out.t_qsl = dfs / dh;
    out.time_ratio = tau / out.t_qsl;
    return out;
}

QslReport qsl_mixed(const DensityMatrix& rho, const DensityMatrix& sigma, const Matrix& h,
                    double tau) {
    require_state_dims(h, rho, "qsl_mixed");
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("qsl_mixed: dimension mismatch");
    }
    const int d = rho.dim();
    const double r2 = rho.purity() - 1.0 / d;
    const double cross = (rho.matrix() * sigma.matrix()).trace().real() - 1.0 / d;
    const double distance2 = hs_norm(rho.matrix() - sigma.matrix());

    QslReport out;
    out.bound_kind = QslKind::bloch_angle_mixed;
    out.tau = tau;
    if (r2 <= kTiny || distance2 <= kTiny) {
        // Maximally mixed or coinciding states: zero angle, sentinel ratio.
        out.t_qsl = 0.0;
        out.time_ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    const double radius = std::sqrt(r2);
    const double theta = std::acos(std::clamp(cross / r2, -1.0, 1.0));
    const double speed = evolution_speed_hs(h, rho);
    if (speed <= kTiny) {
        throw std::invalid_argument("qsl_mixed: generator does not move the state");
    }
    out.t_qsl = radius * theta / speed;
    out.time_ratio = (out.t_qsl > 0.0) ? tau / out.t_qsl
                                       : std::numeric_limits<double>::infinity();
    return out;
}

double efficiency_eta(const Matrix& h, const DensityMatrix& rho) {
    require_state_dims(h, rho, "efficiency_eta");
    const double norm = op_norm(h);
    if (norm <= kTiny) {
        throw std::invalid_argument("efficiency_eta: zero Hamiltonian");
    }
    return clamp01(energy_stddev(h, rho) / norm);
}

double efficiency_eta_star(const Matrix& h, const DensityMatrix& rho) {
    require_state_dims(h, rho, "efficiency_eta_star");
    const Matrix& r = rho.matrix();
    const double a = (r * r * h * h).trace().real();
    const double b = (r * h * r * h).trace().real();
    const double c = (r * h).trace().real();
    const double num2 = std::max(a - b, 0.0);
    const double den2 = a - (b - c * c);
    if (den2 <= kTiny) {
        throw std::invalid_argument("efficiency_eta_star: generator acts trivially on the state");
    }
    return clamp01(std::sqrt(num2 / den2));
}

ScaledGenerator rescale_generator(const Matrix& h, double tau, EnergyConstraint kind,
                                  double budget, const DensityMatrix& rho) {
    if (budget <= 0.0) {
        throw std::invalid_argument("rescale_generator: budget must be positive");
    }
    double measure = 0.0;
    switch (kind) {
        case EnergyConstraint::stddev: measure = energy_stddev(h, rho); break;
        case EnergyConstraint::hs_norm: measure = hs_norm(h); break;
        case EnergyConstraint::op_norm: measure = op_norm(h); break;
    }
    if (measure <= kTiny) {
        throw std::invalid_argument("rescale_generator: energy measure of h is zero");
    }
    const double c = measure / budget;
    return ScaledGenerator{h / c, tau * c};
}

}  // namespace brachisto
