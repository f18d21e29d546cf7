#pragma once

#include <vector>

namespace nsopt {

/// One boundary edge of the rectangle: a cell-sized segment of a wall with
/// its outward normal and the tangent obtained by rotating the normal by +90°.
struct BoundaryFace {
    int id = 0;          ///< index into Grid::boundary_faces()
    int wall = 0;        ///< 0 bottom (y=0), 1 top (y=Ly), 2 left (x=0), 3 right (x=Lx)
    int along = 0;       ///< cell index along the wall
    double nu_x = 0, nu_y = 0;   ///< outward unit normal
    double tau_x = 0, tau_y = 0; ///< unit tangent (normal rotated +90°)
    double mid_x = 0, mid_y = 0; ///< face midpoint
    double length = 0;           ///< edge length (hx or hy)
};

/// Staggered (MAC) grid on [0,Lx]x[0,Ly].
///
/// Layout: pressure at cell centers, x-velocity on vertical faces, y-velocity
/// on horizontal faces. In addition to the classic MAC unknowns, the
/// tangential velocity carries explicit wall rows/columns (x-velocity at
/// y=0 and y=Ly, y-velocity at x=0 and x=Lx). Those wall values are the
/// discrete tangential traces; they have zero volume measure and are where
/// slip friction acts and Dirichlet data is imposed.
///
///   ux: (nx+1) columns (x = i*hx) times (ny+2) rows
///       row 0 -> y=0 wall, rows 1..ny -> y=(j-1/2)*hy, row ny+1 -> y=Ly wall
///   uy: (nx+2) columns times (ny+1) rows (y = j*hy)
///       col 0 -> x=0 wall, cols 1..nx -> x=(i-1/2)*hx, col nx+1 -> x=Lx wall
///   p : nx*ny cell centers
///
/// A grid may be periodic in x (used by the channel presets). Periodic grids
/// have no left/right walls; ux column nx aliases column 0.
class Grid {
public:
    Grid() = default;
    Grid(double Lx, double Ly, int nx, int ny, bool periodic_x = false);

    double Lx = 1, Ly = 1;
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    bool periodic_x = false;

    const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }
    double perimeter() const;

    // array sizes / flat indexing
    int ux_count() const { return (nx + 1) * (ny + 2); }
    int uy_count() const { return (nx + 2) * (ny + 1); }
    int p_count() const { return nx * ny; }
    int ux_idx(int i, int j) const { return i * (ny + 2) + j; }
    int uy_idx(int i, int j) const { return i * (ny + 1) + j; }
    int p_idx(int i, int j) const { return i * ny + j; }

    // dof positions
    double ux_x(int i) const { return i * hx; }
    double ux_y(int j) const {
        if (j == 0) return 0.0;
        if (j == ny + 1) return Ly;
        return (j - 0.5) * hy;
    }
    double uy_x(int i) const {
        if (i == 0) return 0.0;
        if (i == nx + 1) return Lx;
        return (i - 0.5) * hx;
    }
    double uy_y(int j) const { return j * hy; }
    double cell_x(int i) const { return (i + 0.5) * hx; }
    double cell_y(int j) const { return (j + 0.5) * hy; }

    bool ux_is_wall_row(int j) const { return j == 0 || j == ny + 1; }
    bool uy_is_wall_col(int i) const { return i == 0 || i == nx + 1; }

    /// Quadrature weight (control-volume area) of a velocity dof in the
    /// domain L2 inner product. Wall tangential rows/columns carry zero
    /// measure; the normal dofs sitting on x-walls carry half cells.
    double ux_weight(int i, int j) const;
    double uy_weight(int i, int j) const;

private:
    std::vector<BoundaryFace> faces_;
};

/// Builds the grid. Rejects non-positive extents and resolutions below 4
/// (the interior stencils need width).
Grid build_grid(double Lx, double Ly, int nx, int ny, bool periodic_x = false);

/// Control region omega: an axis-aligned rectangle compactly contained in
/// the domain, realized as fractional overlap weights on the velocity
/// control volumes. Sum of weighted areas equals |omega| exactly.
struct ControlMask {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    std::vector<double> wx, wy; ///< fractional weights in [0,1], laid out like ux/uy
    std::vector<double> qx, qy; ///< absolute quadrature weights (overlap areas); sum == area
    double area = 0;            ///< |omega|

    bool in_support_x(int flat) const { return wx[flat] > 0.0; }
    bool in_support_y(int flat) const { return wy[flat] > 0.0; }
};

ControlMask build_control_mask(const Grid& g, double x0, double y0, double x1, double y1);

/// Uniform time grid on [0,T]; dt is derived so nt*dt == T holds exactly.
struct TimeGrid {
    double T = 1.0;
    int nt = 1;
    double dt() const { return T / nt; }
};

} // namespace nsopt
