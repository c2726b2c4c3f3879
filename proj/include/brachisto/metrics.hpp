// metrics.hpp — Quantum speed limits, evolution-time accounting, and
// Hamiltonian efficiency measures used to score solutions.

#pragma once

#include "brachisto/states.hpp"

namespace brachisto {

enum class QslKind { mandelstam_tamm_pure, bloch_angle_mixed };

// A speed-limit evaluation for a given generator.  The nominal evolution time
// is tau (solver output uses tau = 1, since O = e^{-iH}); time_ratio is
// tau / t_qsl and is invariant under the rescaling (H, tau) -> (H/c, c tau).
// Degenerate cases (coinciding states, zero speed) report time_ratio as an
// infinity sentinel so aggregates can exclude them explicitly.
struct QslReport {
    double t_qsl = 0.0;
    double tau = 1.0;
    double time_ratio = 0.0;
    QslKind bound_kind = QslKind::mandelstam_tamm_pure;
};

// sqrt(tr(rho h^2) - tr(rho h)^2)
double energy_stddev(const Matrix& h, const DensityMatrix& rho);

// ||[h, rho]||_HS; invariant under h -> h + g for any g commuting with rho.
double evolution_speed_hs(const Matrix& h, const DensityMatrix& rho);

// arccos |<psi|phi>| for rank-1 states, in [0, pi/2].
double fubini_study_distance(const DensityMatrix& psi, const DensityMatrix& phi);

// Mandelstam-Tamm bound for pure states: t_qsl = d_FS / (energy stddev).
QslReport qsl_pure(const DensityMatrix& psi, const DensityMatrix& phi, const Matrix& h,
                   double tau = 1.0);

// Generalized-Bloch-angle bound for mixed states: with R = sqrt(tr rho^2 - 1/d),
// Theta = arccos[(tr rho sigma - 1/d) / (tr rho^2 - 1/d)], and speed
// v = ||[h, rho]||_HS, t_qsl = R Theta / v.  The Bloch component of rho moves
// on a sphere of radius R at constant speed v, so v tau bounds the arc R Theta
// from below for any valid solution.
QslReport qsl_mixed(const DensityMatrix& rho, const DensityMatrix& sigma, const Matrix& h,
                    double tau = 1.0);

// energy_stddev / operator norm, in [0, 1].
double efficiency_eta(const Matrix& h, const DensityMatrix& rho);

// sqrt(tr[rho^2 h^2] - tr[(rho h)^2]) /
// sqrt(tr[rho^2 h^2] - (tr[(rho h)^2] - tr[rho h]^2)), in (0, 1]; equals 1
// whenever the component of h commuting with rho vanishes.
double efficiency_eta_star(const Matrix& h, const DensityMatrix& rho);

// ----------------------------- energy rescaling ------------------------------

enum class EnergyConstraint { stddev, hs_norm, op_norm };

struct ScaledGenerator {
    Matrix h;
    double tau = 1.0;
};

// Pure reparametrization (H, tau) -> (H/c, c tau) with c chosen so the
// requested energy measure of H/c equals budget.  time_ratio is unchanged.
ScaledGenerator rescale_generator(const Matrix& h, double tau, EnergyConstraint kind,
                                  double budget, const DensityMatrix& rho);

}  // namespace brachisto
