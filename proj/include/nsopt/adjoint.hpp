#pragma once

#include <vector>

#include "nsopt/forward.hpp"

namespace nsopt {

/// Gateaux derivative of the control-to-state map: v(0) = 0, homogeneous
/// boundary condition of the same kind as the state.
struct LinearizedTrajectory {
    std::vector<VelocityField> v;  ///< levels 0..nt, v[0] = 0
    std::vector<PressureField> q;
};

/// Backward-in-time dual sweep. Level n holds the multiplier of step n+1
/// (scaled by 1/dt so phi matches the continuous adjoint); the terminal
/// level nt is exactly zero. The step operator is the algebraic transpose
/// of the linearized forward step.
struct AdjointTrajectory {
    std::vector<VelocityField> phi;  ///< levels 0..nt, phi[nt] = 0
    std::vector<PressureField> pi;
};

/// Linearization of the forward scheme about a computed state, driven by a
/// control direction g (one field per step; may be empty for zero).
LinearizedTrajectory solve_linearized(const StateTrajectory& state, const ProblemConfig& cfg,
                                      const ControlTrajectory& g);

/// Adjoint sweep with source u_n - z_d,n; exact discrete transposition of
/// solve_linearized.
AdjointTrajectory solve_adjoint(const StateTrajectory& state, const ProblemConfig& cfg);

/// Riesz representer of the cost derivative in L2(0,T;L2(omega)):
/// grad_n = phi_{n-1}|_omega + M f_n per step n.
ControlTrajectory cost_gradient(const AdjointTrajectory& adj, const ControlTrajectory& f,
                                double M, const ControlMask& mask);

} // namespace nsopt
