#pragma once

#include <cstdint>
#include <vector>

#include "nsopt/control.hpp"
#include "nsopt/io.hpp"

namespace nsopt {

/// Adjoint-gradient verification: central finite differences of the cost
/// against the adjoint directional derivative for random directions, plus
/// the linearized/adjoint duality identity per direction.
struct GradCheckResult {
    std::vector<GradCheckRow> rows;
    double worst_rel_error_at_min_eps = 0; ///< judged at the smallest epsilon
    double worst_duality_error = 0;
};
GradCheckResult gradient_check(const ProblemConfig& cfg, int n_directions,
                               const std::vector<double>& eps_list, std::uint64_t seed);

/// Discrete energy-inequality suite: for random divergence-free initial
/// data with b = 0 and f = 0, every step must satisfy
///   E(u_{n+1}) - E(u_n) + dt (2 mu ||D u_{n+1}||^2 + alpha ||tr u_{n+1}||^2) <= slack
/// with slack measured relative to the initial energy.
struct EnergyCheckResult {
    struct Run {
        int run = 0;
        double worst_slack = 0;   ///< max over steps, relative to E(u_0)
        double initial_energy = 0;
    };
    std::vector<Run> runs;
    double worst_slack = 0;
};
EnergyCheckResult energy_check(const ProblemConfig& cfg, int n_runs, std::uint64_t seed);

/// Random divergence-free velocity from a node stream function (zero
/// normal trace by construction).
VelocityField random_divfree_field(const Grid& g, std::mt19937_64& rng, double amp = 1.0);

/// Random control direction of unit space-time norm on omega.
ControlTrajectory random_control_direction(const Grid& g, const ControlMask& mask, double dt,
                                           int nt, std::mt19937_64& rng);

} // namespace nsopt
