#include "nsopt/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace nsopt {

namespace {

void check_same_shape(const VelocityField& a, const VelocityField& b, const char* what) {
    if (a.nx != b.nx || a.ny != b.ny || a.ux.size() != b.ux.size() || a.uy.size() != b.uy.size())
        throw std::invalid_argument(std::string(what) + ": velocity field shapes do not match");
}

void check_matches(const Grid& g, const VelocityField& a, const char* what) {
    if (!a.matches(g) || a.ux.size() != static_cast<size_t>(g.ux_count()) ||
        a.uy.size() != static_cast<size_t>(g.uy_count()))
        throw std::invalid_argument(std::string(what) + ": field does not match grid layout");
}

} // namespace

VelocityField operator+(const VelocityField& a, const VelocityField& b) {
    check_same_shape(a, b, "operator+");
    VelocityField r = a;
    for (size_t k = 0; k < r.ux.size(); ++k) r.ux[k] += b.ux[k];
    for (size_t k = 0; k < r.uy.size(); ++k) r.uy[k] += b.uy[k];
    return r;
}

VelocityField operator-(const VelocityField& a, const VelocityField& b) {
    check_same_shape(a, b, "operator-");
    VelocityField r = a;
    for (size_t k = 0; k < r.ux.size(); ++k) r.ux[k] -= b.ux[k];
    for (size_t k = 0; k < r.uy.size(); ++k) r.uy[k] -= b.uy[k];
    return r;
}

VelocityField operator*(double s, const VelocityField& a) {
    VelocityField r = a;
    for (auto& v : r.ux) v *= s;
    for (auto& v : r.uy) v *= s;
    return r;
}

double BoundaryData::max_abs() const {
    double m = 0;
    for (double v : face_values) m = std::max(m, std::abs(v));
    return m;
}

WallNodeValues wall_node_values(const Grid& g, const BoundaryData& b) {
    if (!b.matches(g))
        throw std::invalid_argument("wall_node_values: boundary data does not match grid");
    WallNodeValues w;
    const auto& faces = g.boundary_faces();

    // face values per wall, in face order (along = 0..n-1)
    std::vector<double> fb(g.nx), ft(g.nx), fl, fr;
    if (!g.periodic_x) {
        fl.resize(g.ny);
        fr.resize(g.ny);
    }
    for (const auto& f : faces) {
        const double v = b.face_values[f.id];
        switch (f.wall) {
            case 0: fb[f.along] = v; break;
            case 1: ft[f.along] = v; break;
            case 2: fl[f.along] = v; break;
            case 3: fr[f.along] = v; break;
        }
    }

    // node value = mean of adjacent faces, converted to dof orientation.
    // Tangents: bottom tau=(1,0) -> ux sign +1; top tau=(-1,0) -> sign -1;
    // left tau=(0,-1) -> uy sign -1; right tau=(0,1) -> sign +1.
    auto nodes_from_faces = [&](const std::vector<double>& fv, double sign, bool wrap) {
        const int n = static_cast<int>(fv.size());
        std::vector<double> out(n + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            double v;
            if (wrap) {
                const int kl = (k - 1 + n) % n;
                const int kr = k % n;
                v = 0.5 * (fv[kl] + fv[kr]);
            } else if (k == 0) {
                v = fv[0];
            } else if (k == n) {
                v = fv[n - 1];
            } else {
                v = 0.5 * (fv[k - 1] + fv[k]);
            }
            out[k] = sign * v;
        }
        return out;
    };

    w.bottom = nodes_from_faces(fb, +1.0, g.periodic_x);
    w.top = nodes_from_faces(ft, -1.0, g.periodic_x);
    if (!g.periodic_x) {
        w.left = nodes_from_faces(fl, -1.0, false);
        w.right = nodes_from_faces(fr, +1.0, false);
    }
    return w;
}

double l2_inner(const Grid& g, const VelocityField& a, const VelocityField& c) {
    check_matches(g, a, "l2_inner");
    check_same_shape(a, c, "l2_inner");
    double s = 0;
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const double w = g.ux_weight(i, j);
            if (w > 0) s += w * a.ux[g.ux_idx(i, j)] * c.ux[g.ux_idx(i, j)];
        }
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) {
            const double w = g.uy_weight(i, j);
            if (w > 0) s += w * a.uy[g.uy_idx(i, j)] * c.uy[g.uy_idx(i, j)];
        }
    return s;
}

double l2_norm(const Grid& g, const VelocityField& a) { return std::sqrt(l2_inner(g, a, a)); }

double l2_inner(const Grid& g, const PressureField& a, const PressureField& c) {
    if (!a.matches(g) || !c.matches(g))
        throw std::invalid_argument("l2_inner: cell field does not match grid");
    double s = 0;
    const double w = g.hx * g.hy;
    for (int k = 0; k < g.p_count(); ++k) s += w * a.p[k] * c.p[k];
    return s;
}

double l2_norm(const Grid& g, const PressureField& a) { return std::sqrt(l2_inner(g, a, a)); }

double mean_pressure(const Grid& g, const PressureField& p) {
    if (!p.matches(g)) throw std::invalid_argument("mean_pressure: field does not match grid");
    double s = 0;
    for (int k = 0; k < g.p_count(); ++k) s += p.p[k];
    return s / g.p_count();
}

PressureField divergence(const Grid& g, const VelocityField& u) {
    check_matches(g, u, "divergence");
    PressureField d = PressureField::zeros(g);
    auto ux_at = [&](int i, int j) {
        if (g.periodic_x) i = (i % g.nx + g.nx) % g.nx;
        return u.ux[g.ux_idx(i, j)];
    };
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dudx = (ux_at(i + 1, j + 1) - ux_at(i, j + 1)) / g.hx;
            const double dvdy = (u.uy[g.uy_idx(i + 1, j + 1)] - u.uy[g.uy_idx(i + 1, j)]) / g.hy;
            d.p[g.p_idx(i, j)] = dudx + dvdy;
        }
    return d;
}

double max_divergence(const Grid& g, const VelocityField& u) {
    const PressureField d = divergence(g, u);
    double m = 0;
    for (double v : d.p) m = std::max(m, std::abs(v));
    return m;
}

double boundary_trace_norm(const Grid& g, const VelocityField& u, const BoundaryData& b) {
    check_matches(g, u, "boundary_trace_norm");
    const WallNodeValues bw = wall_node_values(g, b);
    double acc = 0;
    auto xcol = [&](int i) { return g.periodic_x ? (i % g.nx + g.nx) % g.nx : i; };
    for (const auto& f : g.boundary_faces()) {
        double d = 0;
        switch (f.wall) {
            case 0: {
                const int i0 = xcol(f.along), i1 = xcol(f.along + 1);
                const double uf = 0.5 * (u.ux[g.ux_idx(i0, 0)] + u.ux[g.ux_idx(i1, 0)]);
                const double bf = 0.5 * (bw.bottom[f.along] + bw.bottom[f.along + 1]);
                d = uf - bf;
                break;
            }
            case 1: {
                const int i0 = xcol(f.along), i1 = xcol(f.along + 1);
                const double uf =
                    0.5 * (u.ux[g.ux_idx(i0, g.ny + 1)] + u.ux[g.ux_idx(i1, g.ny + 1)]);
                const double bf = 0.5 * (bw.top[f.along] + bw.top[f.along + 1]);
                d = uf - bf;
                break;
            }
            case 2: {
                const double uf = 0.5 * (u.uy[g.uy_idx(0, f.along)] + u.uy[g.uy_idx(0, f.along + 1)]);
                const double bf = 0.5 * (bw.left[f.along] + bw.left[f.along + 1]);
                d = uf - bf;
                break;
            }
            case 3: {
                const double uf = 0.5 * (u.uy[g.uy_idx(g.nx + 1, f.along)] +
                                         u.uy[g.uy_idx(g.nx + 1, f.along + 1)]);
                const double bf = 0.5 * (bw.right[f.along] + bw.right[f.along + 1]);
                d = uf - bf;
                break;
            }
        }
        acc += d * d * f.length;
    }
    return std::sqrt(acc);
}

double spacetime_l2(const Grid& g, const std::vector<VelocityField>& traj, double dt) {
    if (traj.empty()) throw std::invalid_argument("spacetime_l2: empty trajectory");
    double acc = 0;
    for (size_t n = 1; n < traj.size(); ++n) {
        const double nn = l2_norm(g, traj[n]);
        acc += dt * nn * nn;
    }
    return std::sqrt(acc);
}

double spacetime_l2_of_norms(const std::vector<double>& level_norms, double dt) {
    if (level_norms.empty()) throw std::invalid_argument("spacetime_l2_of_norms: empty sequence");
    double acc = 0;
    for (double v : level_norms) acc += dt * v * v;
    return std::sqrt(acc);
}

double control_l2_inner(const Grid& g, const ControlMask& m, const ControlField& a,
                        const ControlField& c) {
    if (!a.matches(g) || !c.matches(g))
        throw std::invalid_argument("control_l2_inner: field does not match grid");
    double s = 0;
    for (size_t k = 0; k < m.qx.size(); ++k)
        if (m.qx[k] > 0) s += m.qx[k] * a.fx[k] * c.fx[k];
    for (size_t k = 0; k < m.qy.size(); ++k)
        if (m.qy[k] > 0) s += m.qy[k] * a.fy[k] * c.fy[k];
    return s;
}

double control_spacetime_inner(const Grid& g, const ControlMask& m, double dt,
                               const ControlTrajectory& a, const ControlTrajectory& c) {
    if (a.size() != c.size())
        throw std::invalid_argument("control_spacetime_inner: trajectory lengths differ");
    double s = 0;
    for (size_t n = 0; n < a.size(); ++n) s += dt * control_l2_inner(g, m, a[n], c[n]);
    return s;
}

double control_spacetime_norm(const Grid& g, const ControlMask& m, double dt,
                              const ControlTrajectory& a) {
    return std::sqrt(control_spacetime_inner(g, m, dt, a, a));
}

void restrict_to_mask(const ControlMask& m, ControlField& f) {
    for (size_t k = 0; k < m.wx.size(); ++k)
        if (!(m.wx[k] > 0)) f.fx[k] = 0;
    for (size_t k = 0; k < m.wy.size(); ++k)
        if (!(m.wy[k] > 0)) f.fy[k] = 0;
}

VelocityField curl_of_stream(const Grid& g, const std::vector<double>& psi_nodes) {
    if (psi_nodes.size() != static_cast<size_t>((g.nx + 1) * (g.ny + 1)))
        throw std::invalid_argument("curl_of_stream: psi must be given at the (nx+1)x(ny+1) nodes");
    auto psi = [&](int i, int j) { return psi_nodes[i * (g.ny + 1) + j]; };
    VelocityField u = VelocityField::zeros(g);
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 1; j <= g.ny; ++j)
            u.ux[g.ux_idx(i, j)] = (psi(i, j) - psi(i, j - 1)) / g.hy;
    for (int i = 1; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny; ++j)
            u.uy[g.uy_idx(i, j)] = -(psi(i, j) - psi(i - 1, j)) / g.hx;
    return u;
}

} // namespace nsopt
