#pragma once

#include <utility>
#include <vector>

#include "nsopt/fields.hpp"
#include "nsopt/grid.hpp"
#include "nsopt/linalg.hpp"

namespace nsopt {

struct FluidParams {
    double mu = 1.0;
};

/// Everything one optimal-control problem needs: domain, horizon, boundary
/// condition, data (a, b), control region, target and cost weight.
struct ProblemConfig {
    Grid grid;
    TimeGrid time;
    BcSpec bc;
    FluidParams fluid;
    VelocityField initial;               ///< a; discretely divergence-free, a.nu = 0 on walls
    ControlMask mask;                    ///< omega
    std::vector<VelocityField> target;   ///< z_d at levels 0..nt (level 0 unused by the cost)
    double cost_weight = 1.0;            ///< M
    VelocityField body_force;            ///< steady volumetric force (zero by default)
    double solver_tol = 1e-10;
    SolverKind solver = SolverKind::Auto;
    double theta = 1.0;                  ///< 1 implicit Euler, 0.5 Crank-Nicolson (forward only)

    void validate() const;
    ProblemConfig with_bc(BcSpec new_bc) const {
        ProblemConfig c = *this;
        c.bc = std::move(new_bc);
        return c;
    }
};

struct StateTrajectory {
    std::vector<VelocityField> u;  ///< levels 0..nt; level 0 equals a
    std::vector<PressureField> p;  ///< levels 0..nt; level 0 is zero (no initial pressure)
    std::vector<double> step_residuals;   ///< relative linear residual per step
    std::vector<double> step_divergence;  ///< max-norm divergence per level 1..nt
};

/// One implicit step of the Oseen-linearized scheme. Builds its own
/// workspace; solve_forward uses the shared one.
std::pair<VelocityField, PressureField> advance_step(const VelocityField& prev,
                                                     const PressureField& prev_p,
                                                     const ProblemConfig& cfg,
                                                     const ControlField& f_n);

/// Integrates the state system over [0,T]; f has one entry per step (it may
/// be empty, meaning zero control). Deterministic given cfg.
StateTrajectory solve_forward(const ProblemConfig& cfg, const ControlTrajectory& f);

/// Steady Stokes solve with the given boundary condition and volumetric
/// force; used as the closed-form channel oracle.
std::pair<VelocityField, PressureField> solve_steady_stokes(const Grid& g, const BcSpec& bc,
                                                            double mu,
                                                            const VelocityField& body_force,
                                                            double tol = 1e-12,
                                                            SolverKind kind = SolverKind::Auto);

/// Projection onto the discretely divergence-free space (weighted L2
/// projection with the grid quadrature); wall trace dofs pass through.
VelocityField leray_project(const Grid& g, const BcSpec& bc, const VelocityField& v,
                            double tol = 1e-12, SolverKind kind = SolverKind::Auto);

/// Terms of the discrete energy identity: kinetic = 1/2||u||^2,
/// strain_sq = ||D(u)||^2 under the assembly quadrature (so the viscous
/// dissipation is exactly 2 mu strain_sq), trace_sq = ||(u-b)_tau||^2 on the
/// boundary faces.
struct EnergyBreakdown {
    double kinetic = 0;
    double strain_sq = 0;
    double trace_sq = 0;
};
EnergyBreakdown energy_breakdown(const Grid& g, const BcSpec& bc, const VelocityField& u);

/// Strain-rate square norm ||D(u)||^2 with the assembly quadrature.
double strain_square(const Grid& g, const VelocityField& u);

} // namespace nsopt
