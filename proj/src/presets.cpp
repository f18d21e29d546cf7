#include "nsopt/presets.hpp"

#include <cmath>

namespace nsopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

VelocityField vortex_from(const Grid& g, double amp, int kx, int ky) {
    std::vector<double> psi((g.nx + 1) * (g.ny + 1), 0.0);
    // boundary nodes stay exactly zero so the normal trace vanishes exactly
    for (int i = 1; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j) {
            const double x = i * g.hx, y = j * g.hy;
            psi[i * (g.ny + 1) + j] =
                amp * std::sin(kx * kPi * x / g.Lx) * std::sin(ky * kPi * y / g.Ly);
        }
    return curl_of_stream(g, psi);
}

} // namespace

VelocityField taylor_vortex(const Grid& g, double amp) { return vortex_from(g, amp, 1, 1); }

VelocityField double_vortex(const Grid& g, double amp) { return vortex_from(g, amp, 2, 1); }

VelocityField poiseuille_profile(const Grid& g, double G, double mu, double alpha,
                                 bool dirichlet) {
    VelocityField u = VelocityField::zeros(g);
    const double H = g.Ly;
    const double c = dirichlet ? 0.0 : G * H / (2.0 * alpha);
    auto U = [&](double y) { return G * y * (H - y) / (2.0 * mu) + c; };
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j)
            u.ux[g.ux_idx(i, j)] = U(g.ux_y(j));
    if (!g.periodic_x) {
        // normal trace on the x-walls cannot be carried by b.nu = 0 data;
        // the profile is only meaningful on periodic grids, but keep the
        // sampled values for error measurement either way.
    }
    return u;
}

VelocityField constant_force(const Grid& g, double gx, double gy) {
    VelocityField f = VelocityField::zeros(g);
    for (auto& v : f.ux) v = gx;
    for (auto& v : f.uy) v = gy;
    return f;
}

ControlTrajectory constant_control(const Grid& g, const ControlMask& m, int nt, double cx,
                                   double cy) {
    ControlField f = ControlField::zeros(g);
    for (size_t k = 0; k < m.wx.size(); ++k)
        if (m.wx[k] > 0) f.fx[k] = cx;
    for (size_t k = 0; k < m.wy.size(); ++k)
        if (m.wy[k] > 0) f.fy[k] = cy;
    return ControlTrajectory(nt, f);
}

ControlTrajectory bump_control(const Grid& g, const ControlMask& m, const TimeGrid& t,
                               double amp_x, double amp_y) {
    auto bump = [&](double x, double y) {
        if (x <= m.x0 || x >= m.x1 || y <= m.y0 || y >= m.y1) return 0.0;
        const double sx = std::sin(kPi * (x - m.x0) / (m.x1 - m.x0));
        const double sy = std::sin(kPi * (y - m.y0) / (m.y1 - m.y0));
        return sx * sx * sy * sy;
    };
    ControlTrajectory traj;
    traj.reserve(t.nt);
    for (int n = 1; n <= t.nt; ++n) {
        const double tm = (n - 0.5) * t.dt();
        const double tf = std::sin(kPi * tm / t.T);
        ControlField f = ControlField::zeros(g);
        for (int i = 0; i <= g.nx; ++i)
            for (int j = 0; j <= g.ny + 1; ++j) {
                const int k = g.ux_idx(i, j);
                if (m.wx[k] > 0) f.fx[k] = amp_x * tf * bump(g.ux_x(i), g.ux_y(j));
            }
        for (int i = 0; i <= g.nx + 1; ++i)
            for (int j = 0; j <= g.ny; ++j) {
                const int k = g.uy_idx(i, j);
                if (m.wy[k] > 0) f.fy[k] = amp_y * tf * bump(g.uy_x(i), g.uy_y(j));
            }
        traj.push_back(std::move(f));
    }
    return traj;
}

std::vector<VelocityField> record_target(const ProblemConfig& cfg, const ControlTrajectory& f) {
    const StateTrajectory st = solve_forward(cfg, f);
    return st.u;
}

} // namespace nsopt
