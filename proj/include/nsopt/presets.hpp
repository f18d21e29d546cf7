#pragma once

#include <string>
#include <vector>

#include "nsopt/fields.hpp"
#include "nsopt/forward.hpp"

namespace nsopt {

/// Divergence-free vortex initial condition: discrete curl of the stream
/// function amp * sin(pi x/Lx) * sin(pi y/Ly) sampled at grid nodes. Exactly
/// divergence-free with zero normal trace.
VelocityField taylor_vortex(const Grid& g, double amp);

/// Two-bump stream function variant (richer dynamics for targets).
VelocityField double_vortex(const Grid& g, double amp);

/// Closed-form channel profile U(y) = G y (Ly - y) / (2 mu) + c, with
/// c = G Ly / (2 alpha) for the slip wall (Robin balance mu U'(0) = alpha U(0))
/// and c = 0 for no-slip walls. Fills the interior rows and the wall trace
/// dofs of ux, uy = 0.
VelocityField poiseuille_profile(const Grid& g, double G, double mu, double alpha_or_zero,
                                 bool dirichlet);

/// Constant body force (G, 0) over the whole domain.
VelocityField constant_force(const Grid& g, double gx, double gy);

/// Constant control (cx, cy) on omega (mask-weighted support).
ControlTrajectory constant_control(const Grid& g, const ControlMask& m, int nt, double cx,
                                   double cy);

/// Smooth bump control supported on omega: amplitude * bump(x) * sin(pi t/T)
/// per step midpoint; bump is a product of squared sines over the omega box.
ControlTrajectory bump_control(const Grid& g, const ControlMask& m, const TimeGrid& t,
                               double amp_x, double amp_y);

/// Records z_d as the state trajectory of a forward solve under the given
/// config and control (the attainable-target construction).
std::vector<VelocityField> record_target(const ProblemConfig& cfg, const ControlTrajectory& f);

} // namespace nsopt
