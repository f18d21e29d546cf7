#pragma once

#include <cstddef>
#include <vector>

#include "nsopt/grid.hpp"

namespace nsopt {

/// Discrete velocity: x component on vertical faces (plus wall trace rows),
/// y component on horizontal faces (plus wall trace columns). Layout per Grid.
struct VelocityField {
    int nx = 0, ny = 0;
    std::vector<double> ux, uy;

    static VelocityField zeros(const Grid& g) {
        VelocityField f;
        f.nx = g.nx;
        f.ny = g.ny;
        f.ux.assign(g.ux_count(), 0.0);
        f.uy.assign(g.uy_count(), 0.0);
        return f;
    }
    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

VelocityField operator+(const VelocityField& a, const VelocityField& b);
VelocityField operator-(const VelocityField& a, const VelocityField& b);
VelocityField operator*(double s, const VelocityField& a);

/// Cell-centered pressure, gauge fixed to zero area-weighted mean.
struct PressureField {
    int nx = 0, ny = 0;
    std::vector<double> p;

    static PressureField zeros(const Grid& g) {
        PressureField f;
        f.nx = g.nx;
        f.ny = g.ny;
        f.p.assign(g.p_count(), 0.0);
        return f;
    }
    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

/// Distributed forcing supported on omega; same layout as a velocity field,
/// nonzero only where the control mask weight is positive.
struct ControlField {
    int nx = 0, ny = 0;
    std::vector<double> fx, fy;

    static ControlField zeros(const Grid& g) {
        ControlField f;
        f.nx = g.nx;
        f.ny = g.ny;
        f.fx.assign(g.ux_count(), 0.0);
        f.fy.assign(g.uy_count(), 0.0);
        return f;
    }
    bool matches(const Grid& g) const { return nx == g.nx && ny == g.ny; }
};

/// One ControlField per time step; entry k is the (piecewise-constant)
/// forcing on the interval (t_k, t_{k+1}].
using ControlTrajectory = std::vector<ControlField>;

/// Boundary data with zero normal component: a tangential velocity value per
/// boundary face. The tangential sign convention follows the face tangent
/// (normal rotated by +90 degrees).
struct BoundaryData {
    std::vector<double> face_values;

    static BoundaryData zero(const Grid& g) {
        BoundaryData b;
        b.face_values.assign(g.boundary_faces().size(), 0.0);
        return b;
    }
    static BoundaryData constant(const Grid& g, double value) {
        BoundaryData b;
        b.face_values.assign(g.boundary_faces().size(), value);
        return b;
    }
    double max_abs() const;
    bool matches(const Grid& g) const {
        return face_values.size() == g.boundary_faces().size();
    }
};

/// Tangential boundary values realized at the wall trace dofs (nodes), in
/// dof orientation: bottom/top hold the target ux values, left/right the
/// target uy values (face tangents are converted to component signs here).
/// Interior wall nodes average the two adjacent faces; wall end nodes copy
/// the single adjacent face (periodic grids wrap).
struct WallNodeValues {
    std::vector<double> bottom, top;  ///< ux trace values, index i = 0..nx
    std::vector<double> left, right;  ///< uy trace values, index j = 0..ny (empty when periodic)
};
WallNodeValues wall_node_values(const Grid& g, const BoundaryData& b);

// --- quadrature and norms -------------------------------------------------

/// Midpoint-rule L2(Omega) inner product of two velocity fields. Each
/// component is integrated over its own control volumes; wall trace dofs
/// carry zero measure.
double l2_inner(const Grid& g, const VelocityField& a, const VelocityField& c);
double l2_norm(const Grid& g, const VelocityField& a);

/// Midpoint-rule L2(Omega) inner product of cell fields.
double l2_inner(const Grid& g, const PressureField& a, const PressureField& c);
double l2_norm(const Grid& g, const PressureField& a);

double mean_pressure(const Grid& g, const PressureField& p);

/// MAC divergence per cell: (east-west)/hx + (north-south)/hy.
PressureField divergence(const Grid& g, const VelocityField& u);
double max_divergence(const Grid& g, const VelocityField& u);

/// || (u-b)_tau ||_{L2(boundary)} by the midpoint rule on boundary faces;
/// the face value of u is the mean of its two adjacent wall trace dofs.
/// Zero exactly when the tangential wall dofs of u realize b.
double boundary_trace_norm(const Grid& g, const VelocityField& u, const BoundaryData& b);

/// L2(0,T;L2) norm by the right-endpoint rule in time over a trajectory of
/// nt+1 levels t_0..t_nt: sqrt(sum_{n>=1} dt * ||field_n||^2). Level 0 is the
/// initial condition and does not enter.
double spacetime_l2(const Grid& g, const std::vector<VelocityField>& traj, double dt);

/// Same right-endpoint rule applied to a sequence of per-level norms
/// (levels 1..nt, i.e. all entries enter).
double spacetime_l2_of_norms(const std::vector<double>& level_norms, double dt);

// --- control-space inner product -------------------------------------------

/// L2(omega) inner product of two control fields under the mask quadrature.
double control_l2_inner(const Grid& g, const ControlMask& m, const ControlField& a,
                        const ControlField& c);

/// L2(0,T;L2(omega)) inner product / norm over control trajectories
/// (right-endpoint in time; entry k covers one step of length dt).
double control_spacetime_inner(const Grid& g, const ControlMask& m, double dt,
                               const ControlTrajectory& a, const ControlTrajectory& c);
double control_spacetime_norm(const Grid& g, const ControlMask& m, double dt,
                              const ControlTrajectory& a);

/// Zeroes a control field outside the mask support.
void restrict_to_mask(const ControlMask& m, ControlField& f);

// --- helpers ----------------------------------------------------------------

/// Discrete curl of a stream function given at grid nodes (i=0..nx, j=0..ny,
/// flattened i*(ny+1)+j): exactly divergence-free, zero normal trace.
/// Wall tangential trace dofs are left at zero.
VelocityField curl_of_stream(const Grid& g, const std::vector<double>& psi_nodes);

} // namespace nsopt
