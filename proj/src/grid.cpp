#include "nsopt/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsopt {

Grid::Grid(double Lx_, double Ly_, int nx_, int ny_, bool periodic)
    : Lx(Lx_), Ly(Ly_), nx(nx_), ny(ny_), periodic_x(periodic) {
    if (!(Lx > 0) || !(Ly > 0))
        throw std::invalid_argument("grid: extents must be positive, got Lx=" +
                                    std::to_string(Lx) + " Ly=" + std::to_string(Ly));
    if (nx < 4 || ny < 4)
        throw std::invalid_argument("grid: resolution must be >= 4 in each direction, got nx=" +
                                    std::to_string(nx) + " ny=" + std::to_string(ny));
    hx = Lx / nx;
    hy = Ly / ny;

    int id = 0;
    auto add = [&](int wall, int along, double nux, double nuy, double mx, double my, double len) {
        BoundaryFace f;
        f.id = id++;
        f.wall = wall;
        f.along = along;
        f.nu_x = nux;
        f.nu_y = nuy;
        // tangent = normal rotated by +90 degrees: (x,y) -> (-y,x)
        f.tau_x = -nuy;
        f.tau_y = nux;
        f.mid_x = mx;
        f.mid_y = my;
        f.length = len;
        faces_.push_back(f);
    };
    for (int i = 0; i < nx; ++i) add(0, i, 0.0, -1.0, (i + 0.5) * hx, 0.0, hx);
    for (int i = 0; i < nx; ++i) add(1, i, 0.0, 1.0, (i + 0.5) * hx, Ly, hx);
    if (!periodic_x) {
        for (int j = 0; j < ny; ++j) add(2, j, -1.0, 0.0, 0.0, (j + 0.5) * hy, hy);
        for (int j = 0; j < ny; ++j) add(3, j, 1.0, 0.0, Lx, (j + 0.5) * hy, hy);
    }
}

double Grid::perimeter() const {
    double s = 0;
    for (const auto& f : faces_) s += f.length;
    return s;
}

double Grid::ux_weight(int i, int j) const {
    if (ux_is_wall_row(j)) return 0.0;
    if (periodic_x) {
        if (i == nx) return 0.0; // alias of column 0
        return hx * hy;
    }
    const double fx = (i == 0 || i == nx) ? 0.5 : 1.0;
    return fx * hx * hy;
}

double Grid::uy_weight(int i, int j) const {
    if (uy_is_wall_col(i)) return 0.0;
    if (periodic_x && (i < 1 || i > nx)) return 0.0;
    const double fy = (j == 0 || j == ny) ? 0.5 : 1.0;
    return fy * hx * hy;
}

Grid build_grid(double Lx, double Ly, int nx, int ny, bool periodic_x) {
    return Grid(Lx, Ly, nx, ny, periodic_x);
}

ControlMask build_control_mask(const Grid& g, double x0, double y0, double x1, double y1) {
    if (!(x1 > x0) || !(y1 > y0))
        throw std::invalid_argument("control mask: empty region [" + std::to_string(x0) + "," +
                                    std::to_string(x1) + "]x[" + std::to_string(y0) + "," +
                                    std::to_string(y1) + "]");
    // omega must be compactly contained in the domain
    if (!(x0 > 0.0) || !(y0 > 0.0) || !(x1 < g.Lx) || !(y1 < g.Ly))
        throw std::invalid_argument("control mask: region must be strictly inside the domain "
                                    "(omega compactly contained)");

    ControlMask m;
    m.x0 = x0;
    m.y0 = y0;
    m.x1 = x1;
    m.y1 = y1;
    m.wx.assign(g.ux_count(), 0.0);
    m.wy.assign(g.uy_count(), 0.0);
    m.qx.assign(g.ux_count(), 0.0);
    m.qy.assign(g.uy_count(), 0.0);
    m.area = (x1 - x0) * (y1 - y0);

    auto overlap = [](double a0, double a1, double b0, double b1) {
        const double lo = a0 > b0 ? a0 : b0;
        const double hi = a1 < b1 ? a1 : b1;
        return hi > lo ? hi - lo : 0.0;
    };

    for (int i = 0; i <= g.nx; ++i) {
        if (g.periodic_x && i == g.nx) continue;
        double bx0 = g.ux_x(i) - 0.5 * g.hx;
        double bx1 = g.ux_x(i) + 0.5 * g.hx;
        if (!g.periodic_x) {
            if (i == 0) bx0 = 0.0;
            if (i == g.nx) bx1 = g.Lx;
        }
        for (int j = 1; j <= g.ny; ++j) {
            const double by0 = (j - 1) * g.hy;
            const double by1 = j * g.hy;
            const double a = overlap(bx0, bx1, x0, x1) * overlap(by0, by1, y0, y1);
            if (a > 0) {
                m.qx[g.ux_idx(i, j)] = a;
                m.wx[g.ux_idx(i, j)] = a / ((bx1 - bx0) * g.hy);
            }
        }
    }
    for (int i = 1; i <= g.nx; ++i) {
        const double bx0 = (i - 1) * g.hx;
        const double bx1 = i * g.hx;
        for (int j = 0; j <= g.ny; ++j) {
            double by0 = g.uy_y(j) - 0.5 * g.hy;
            double by1 = g.uy_y(j) + 0.5 * g.hy;
            if (j == 0) by0 = 0.0;
            if (j == g.ny) by1 = g.Ly;
            const double a = overlap(bx0, bx1, x0, x1) * overlap(by0, by1, y0, y1);
            if (a > 0) {
                m.qy[g.uy_idx(i, j)] = a;
                m.wy[g.uy_idx(i, j)] = a / (g.hx * (by1 - by0));
            }
        }
    }
    return m;
}

} // namespace nsopt
