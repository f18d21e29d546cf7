#include "nsopt/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nsopt {

void BcSpec::validate(const Grid& g) const {
    if (!b.matches(g))
        throw std::invalid_argument("bc: boundary data does not match the grid face list");
    if (kind == BcKind::NavierSlip) {
        const double bound = b.max_abs() + 1.0;
        if (!(alpha > bound))
            throw std::invalid_argument(
                "bc.alpha: Navier slip requires alpha > max|b| + 1 (= " + std::to_string(bound) +
                "), got alpha = " + std::to_string(alpha));
    }
}

int DofMap::ux_dof_at(int i, int j) const {
    if (grid->periodic_x && i == grid->nx) i = 0;
    return ux_dof[grid->ux_idx(i, j)];
}

double DofMap::ux_fix_at(int i, int j) const {
    if (grid->periodic_x && i == grid->nx) i = 0;
    return ux_fix[grid->ux_idx(i, j)];
}

Eigen::VectorXd DofMap::gather(const VelocityField& u) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_u);
    const Grid& g = *grid;
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const int d = ux_dof[g.ux_idx(i, j)];
            if (d >= 0) x[d] = u.ux[g.ux_idx(i, j)];
        }
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) {
            const int d = uy_dof[g.uy_idx(i, j)];
            if (d >= 0) x[d] = u.uy[g.uy_idx(i, j)];
        }
    return x;
}

void DofMap::scatter(const Eigen::VectorXd& x, VelocityField& u) const {
    const Grid& g = *grid;
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const int k = g.ux_idx(i, j);
            u.ux[k] = ux_dof[k] >= 0 ? x[ux_dof[k]] : ux_fix[k];
        }
    if (g.periodic_x)
        for (int j = 0; j <= g.ny + 1; ++j)
            u.ux[g.ux_idx(g.nx, j)] = u.ux[g.ux_idx(0, j)];
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) {
            const int k = g.uy_idx(i, j);
            u.uy[k] = uy_dof[k] >= 0 ? x[uy_dof[k]] : uy_fix[k];
        }
}

PressureField DofMap::scatter_pressure(const Eigen::VectorXd& x, const Grid& g) const {
    PressureField p = PressureField::zeros(g);
    for (int k = 0; k < n_p; ++k) p.p[k] = x[n_u + k];
    return p;
}

DofMap build_dof_map(const Grid& g, const BcSpec& bc) {
    bc.validate(g);
    DofMap m;
    m.grid = &g;
    m.kind = bc.kind;
    m.ux_dof.assign(g.ux_count(), -1);
    m.uy_dof.assign(g.uy_count(), -1);
    m.ux_fix.assign(g.ux_count(), 0.0);
    m.uy_fix.assign(g.uy_count(), 0.0);

    const WallNodeValues bw = wall_node_values(g, bc.b);
    const bool slip = bc.kind == BcKind::NavierSlip;
    int next = 0;

    // x-velocity
    for (int i = 0; i <= g.nx; ++i) {
        if (g.periodic_x && i == g.nx) continue; // alias of column 0, fixed below
        for (int j = 0; j <= g.ny + 1; ++j) {
            const int k = g.ux_idx(i, j);
            const bool wall_row = g.ux_is_wall_row(j);
            const bool on_x_wall = !g.periodic_x && (i == 0 || i == g.nx);
            if (on_x_wall) {
                // normal dof on a vertical wall (corners included): u.nu = b.nu = 0
                m.ux_fix[k] = 0.0;
                continue;
            }
            if (wall_row) {
                // tangential trace dof on a horizontal wall
                if (slip) {
                    m.ux_dof[k] = next++;
                } else {
                    m.ux_fix[k] = (j == 0) ? bw.bottom[i] : bw.top[i];
                }
            } else {
                m.ux_dof[k] = next++;
            }
        }
    }
    if (g.periodic_x) {
        for (int j = 0; j <= g.ny + 1; ++j) {
            m.ux_dof[g.ux_idx(g.nx, j)] = m.ux_dof[g.ux_idx(0, j)];
            m.ux_fix[g.ux_idx(g.nx, j)] = m.ux_fix[g.ux_idx(0, j)];
        }
    }

    // y-velocity
    for (int i = 0; i <= g.nx + 1; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            const int k = g.uy_idx(i, j);
            const bool wall_col = g.uy_is_wall_col(i);
            if (wall_col) {
                if (g.periodic_x) continue; // no vertical walls
                if (j == 0 || j == g.ny) continue; // corner: normal condition of the y-wall wins
                if (slip) {
                    m.uy_dof[k] = next++;
                } else {
                    m.uy_fix[k] = (i == 0) ? bw.left[j] : bw.right[j];
                }
            } else if (j == 0 || j == g.ny) {
                // normal dof on a horizontal wall
                m.uy_fix[k] = 0.0;
            } else {
                m.uy_dof[k] = next++;
            }
        }
    }

    m.n_u = next;
    m.n_p = g.p_count();
    m.mass.assign(m.n_u, 0.0);
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const int d = m.ux_dof[g.ux_idx(i, j)];
            if (d >= 0 && !(g.periodic_x && i == g.nx)) m.mass[d] = g.ux_weight(i, j);
        }
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) {
            const int d = m.uy_dof[g.uy_idx(i, j)];
            if (d >= 0) m.mass[d] = g.uy_weight(i, j);
        }
    return m;
}

namespace {

enum Comp : int { UX = 0, UY = 1 };

struct Slot {
    int comp, i, j;
};

// resolve a slot to (dof, fixed value), with periodic wrap in x
inline void resolve(const DofMap& m, Slot s, int& dof, double& fix) {
    const Grid& g = *m.grid;
    if (s.comp == UX) {
        int i = s.i;
        if (g.periodic_x) i = (i % g.nx + g.nx) % g.nx;
        const int k = g.ux_idx(i, s.j);
        dof = m.ux_dof[k];
        fix = m.ux_fix[k];
    } else {
        int i = s.i;
        if (g.periodic_x) {
            if (i == 0) i = g.nx;
            else if (i == g.nx + 1) i = 1;
        }
        const int k = g.uy_idx(i, s.j);
        dof = m.uy_dof[k];
        fix = m.uy_fix[k];
    }
}

inline double field_at(const Grid& g, const VelocityField& u, Slot s) {
    if (s.comp == UX) {
        int i = s.i;
        if (g.periodic_x) i = (i % g.nx + g.nx) % g.nx;
        return u.ux[g.ux_idx(i, s.j)];
    }
    int i = s.i;
    if (g.periodic_x) {
        if (i == 0) i = g.nx;
        else if (i == g.nx + 1) i = 1;
    }
    return u.uy[g.uy_idx(i, s.j)];
}

struct Term {
    Slot slot;
    double coef;
};

// Gram contribution of one quadrature point: weight * (sum c_k v_k)^2 / 2's
// derivative, i.e. A += w c c^T with eliminated slots moved to the rhs.
void scatter_gram(const DofMap& m, const std::vector<Term>& terms, double w, Triplets& A,
                  Eigen::VectorXd& rhs) {
    for (const auto& ta : terms) {
        int da;
        double fa;
        resolve(m, ta.slot, da, fa);
        if (da < 0) continue;
        for (const auto& tb : terms) {
            int db;
            double fb;
            resolve(m, tb.slot, db, fb);
            const double v = w * ta.coef * tb.coef;
            if (db >= 0)
                A.emplace_back(da, db, v);
            else if (fb != 0.0)
                rhs[da] -= v * fb;
        }
    }
}

// Divergence-form convective fluxes as (row, advected, advecting, coef)
// quadruples; callback is invoked once per quadruple.
template <class F>
void for_each_convective_flux(const Grid& g, F&& emit) {
    const double hx = g.hx, hy = g.hy;
    const int ilo = g.periodic_x ? 0 : 1;
    const int ihi = g.periodic_x ? g.nx - 1 : g.nx - 1;

    // x-momentum rows
    for (int i = ilo; i <= ihi; ++i) {
        for (int j = 1; j <= g.ny; ++j) {
            const Slot row{UX, i, j};
            // east/west faces at cell centres
            for (int s = 0; s < 2; ++s) {
                const int off = s == 0 ? 1 : -1;      // east : west
                const double sign = s == 0 ? 1 : -1;
                const int ia = s == 0 ? i : i - 1;    // pair (ia, ia+1)
                const Slot a0{UX, ia, j}, a1{UX, ia + 1, j};
                const Slot w0{UX, ia, j}, w1{UX, ia + 1, j};
                const double c = sign * hy / 4.0;
                emit(row, w0, a0, c);
                emit(row, w0, a1, c);
                emit(row, w1, a0, c);
                emit(row, w1, a1, c);
                (void)off;
            }
            // north/south faces at nodes; advecting uy averaged to the node
            const int cl = (g.periodic_x && i == 0) ? g.nx : i; // uy column left of x=i*hx
            const int cr = i + 1;
            for (int s = 0; s < 2; ++s) {
                const int jn = s == 0 ? j : j - 1; // node row (north : south)
                const double sign = s == 0 ? 1 : -1;
                const Slot a0{UY, cl, jn}, a1{UY, cr, jn};
                const Slot w0{UX, i, jn}, w1{UX, i, jn + 1};
                const double c = sign * hx / 4.0;
                emit(row, w0, a0, c);
                emit(row, w0, a1, c);
                emit(row, w1, a0, c);
                emit(row, w1, a1, c);
            }
        }
    }

    // y-momentum rows
    for (int i = 1; i <= g.nx; ++i) {
        for (int j = 1; j <= g.ny - 1; ++j) {
            const Slot row{UY, i, j};
            for (int s = 0; s < 2; ++s) {
                const int ja = s == 0 ? j : j - 1;
                const double sign = s == 0 ? 1 : -1;
                const Slot a0{UY, i, ja}, a1{UY, i, ja + 1};
                const Slot w0{UY, i, ja}, w1{UY, i, ja + 1};
                const double c = sign * hx / 4.0;
                emit(row, w0, a0, c);
                emit(row, w0, a1, c);
                emit(row, w1, a0, c);
                emit(row, w1, a1, c);
            }
            for (int s = 0; s < 2; ++s) {
                const int in = s == 0 ? i : i - 1; // node column (east : west)
                const double sign = s == 0 ? 1 : -1;
                const Slot a0{UX, in, j}, a1{UX, in, j + 1};
                const Slot w0{UY, in, j}, w1{UY, in + 1, j};
                const double c = sign * hy / 4.0;
                emit(row, w0, a0, c);
                emit(row, w0, a1, c);
                emit(row, w1, a0, c);
                emit(row, w1, a1, c);
            }
        }
    }
}

} // namespace

OperatorBlocks build_operator_blocks(const Grid& g, const BcSpec& bc, double mu) {
    if (!(mu > 0)) throw std::invalid_argument("fluid.mu: viscosity must be positive");
    OperatorBlocks ob;
    ob.dofs = std::make_shared<DofMap>(build_dof_map(g, bc));
    const DofMap& m = *ob.dofs;
    ob.mu = mu;
    ob.rhs_visc = Eigen::VectorXd::Zero(m.n_u);
    ob.rhs_div = Eigen::VectorXd::Zero(m.n_p);

    const double hx = g.hx, hy = g.hy;

    // strain energy at cell centres: 2 mu (Dxx^2 + Dyy^2)
    for (int ci = 0; ci < g.nx; ++ci)
        for (int cj = 0; cj < g.ny; ++cj) {
            const double w = 2.0 * mu * hx * hy;
            const std::vector<Term> dxx = {{{UX, ci + 1, cj + 1}, 1.0 / hx},
                                           {{UX, ci, cj + 1}, -1.0 / hx}};
            const std::vector<Term> dyy = {{{UY, ci + 1, cj + 1}, 1.0 / hy},
                                           {{UY, ci + 1, cj}, -1.0 / hy}};
            scatter_gram(m, dxx, w, ob.Avisc, ob.rhs_visc);
            scatter_gram(m, dyy, w, ob.Avisc, ob.rhs_visc);
        }

    // strain energy at nodes: 2 mu * 2 * Dxy^2, half-spacing gradients
    // against the wall trace dofs on boundary nodes
    const int node_ihi = g.periodic_x ? g.nx - 1 : g.nx;
    for (int ni = 0; ni <= node_ihi; ++ni)
        for (int nj = 0; nj <= g.ny; ++nj) {
            std::vector<Term> dxy;
            // 1/2 d(ux)/dy
            if (nj == 0) {
                dxy.push_back({{UX, ni, 1}, 1.0 / hy});
                dxy.push_back({{UX, ni, 0}, -1.0 / hy});
            } else if (nj == g.ny) {
                dxy.push_back({{UX, ni, g.ny + 1}, 1.0 / hy});
                dxy.push_back({{UX, ni, g.ny}, -1.0 / hy});
            } else {
                dxy.push_back({{UX, ni, nj + 1}, 0.5 / hy});
                dxy.push_back({{UX, ni, nj}, -0.5 / hy});
            }
            // 1/2 d(uy)/dx
            if (!g.periodic_x && ni == 0) {
                dxy.push_back({{UY, 1, nj}, 1.0 / hx});
                dxy.push_back({{UY, 0, nj}, -1.0 / hx});
            } else if (!g.periodic_x && ni == g.nx) {
                dxy.push_back({{UY, g.nx + 1, nj}, 1.0 / hx});
                dxy.push_back({{UY, g.nx, nj}, -1.0 / hx});
            } else {
                dxy.push_back({{UY, ni + 1, nj}, 0.5 / hx});
                dxy.push_back({{UY, ni, nj}, -0.5 / hx});
            }
            double w = 4.0 * mu * hx * hy;
            if (nj == 0 || nj == g.ny) w *= 0.5;
            if (!g.periodic_x && (ni == 0 || ni == g.nx)) w *= 0.5;
            scatter_gram(m, dxy, w, ob.Avisc, ob.rhs_visc);
        }

    // slip friction: (alpha + (b.nu)/2) mass on the wall trace dofs
    if (bc.kind == BcKind::NavierSlip) {
        const WallNodeValues bw = wall_node_values(g, bc.b);
        const double b_nu = 0.0; // normal boundary flux; identically zero here
        auto fric = [&](Slot s, double wlen, double target) {
            int d;
            double fx;
            resolve(m, s, d, fx);
            if (d < 0) return;
            const double coef = (bc.alpha + 0.5 * b_nu) * wlen;
            ob.Avisc.emplace_back(d, d, coef);
            ob.rhs_visc[d] += coef * target;
        };
        for (int i = 0; i <= node_ihi; ++i) {
            const double wlen = (!g.periodic_x && (i == 0 || i == g.nx)) ? 0.5 * hx : hx;
            fric({UX, i, 0}, wlen, bw.bottom[i]);
            fric({UX, i, g.ny + 1}, wlen, bw.top[i]);
        }
        if (!g.periodic_x)
            for (int j = 0; j <= g.ny; ++j) {
                const double wlen = (j == 0 || j == g.ny) ? 0.5 * hy : hy;
                fric({UY, 0, j}, wlen, bw.left[j]);
                fric({UY, g.nx + 1, j}, wlen, bw.right[j]);
            }
    }

    // integrated divergence per cell, gradient as its negative transpose
    for (int ci = 0; ci < g.nx; ++ci)
        for (int cj = 0; cj < g.ny; ++cj) {
            const int pr = m.p_dof(g.p_idx(ci, cj));
            const Term slots[4] = {{{UX, ci + 1, cj + 1}, hy},
                                   {{UX, ci, cj + 1}, -hy},
                                   {{UY, ci + 1, cj + 1}, hx},
                                   {{UY, ci + 1, cj}, -hx}};
            for (const auto& t : slots) {
                int d;
                double fx;
                resolve(m, t.slot, d, fx);
                if (d >= 0) {
                    ob.B.emplace_back(pr, d, t.coef);
                    ob.G.emplace_back(d, pr, -t.coef);
                } else if (fx != 0.0) {
                    ob.rhs_div[g.p_idx(ci, cj)] -= t.coef * fx;
                }
            }
        }
    return ob;
}

ConvectionOp build_convection(const Grid& g, const DofMap& m, const VelocityField& a) {
    if (!a.matches(g)) throw std::invalid_argument("convection: advecting field does not match grid");
    ConvectionOp op;
    op.rhs = Eigen::VectorXd::Zero(m.n_u);
    for_each_convective_flux(g, [&](Slot row, Slot wslot, Slot aslot, double coef) {
        int rd;
        double rf;
        resolve(m, row, rd, rf);
        if (rd < 0) return;
        const double aval = field_at(g, a, aslot);
        if (aval == 0.0) return;
        int wd;
        double wf;
        resolve(m, wslot, wd, wf);
        const double v = 0.5 * coef * aval;
        if (wd >= 0) {
            op.C.emplace_back(rd, wd, v);   //  (1/2) N(a)
            op.C.emplace_back(wd, rd, -v);  // -(1/2) N(a)^T
        } else if (wf != 0.0) {
            op.rhs[rd] -= v * wf;
        }
    });
    return op;
}

Eigen::SparseMatrix<double> build_convection_jacobian(const Grid& g, const DofMap& m,
                                                      const VelocityField& u_new) {
    if (!u_new.matches(g))
        throw std::invalid_argument("convection jacobian: field does not match grid");
    Triplets K;
    for_each_convective_flux(g, [&](Slot row, Slot wslot, Slot aslot, double coef) {
        int ad;
        double af;
        resolve(m, aslot, ad, af);
        if (ad < 0) return; // eliminated advecting value is data, not a variable
        int rd;
        double rf;
        resolve(m, row, rd, rf);
        if (rd < 0) return;
        // d/da [ (1/2)(N(a) u - N(a)^T u) ]
        K.emplace_back(rd, ad, 0.5 * coef * field_at(g, u_new, wslot));
        int wd;
        double wf;
        resolve(m, wslot, wd, wf);
        if (wd >= 0) K.emplace_back(wd, ad, -0.5 * coef * field_at(g, u_new, row));
    });
    Eigen::SparseMatrix<double> Km(m.n_u, m.n_u);
    Km.setFromTriplets(K.begin(), K.end());
    return Km;
}

namespace {

SaddleSystem assemble_impl(const Grid& g, const BcSpec& bc, const VelocityField* advecting,
                           double dt, double mu, double theta, bool with_mass) {
    OperatorBlocks ob = build_operator_blocks(g, bc, mu);
    const DofMap& m = *ob.dofs;
    const int N = m.n_total();

    Triplets S;
    S.reserve(ob.Avisc.size() + ob.G.size() + ob.B.size() + m.n_u + 3 * m.n_p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);

    if (with_mass)
        for (int d = 0; d < m.n_u; ++d)
            if (m.mass[d] > 0) S.emplace_back(d, d, m.mass[d] / dt);

    for (const auto& t : ob.Avisc) S.emplace_back(t.row(), t.col(), theta * t.value());
    rhs.head(m.n_u) += ob.rhs_visc;

    if (advecting) {
        ConvectionOp conv = build_convection(g, m, *advecting);
        for (const auto& t : conv.C) S.emplace_back(t.row(), t.col(), theta * t.value());
        rhs.head(m.n_u) += theta * conv.rhs;
    }

    for (const auto& t : ob.G) S.emplace_back(t.row(), t.col(), t.value());
    for (const auto& t : ob.B) S.emplace_back(t.row(), t.col(), t.value());
    rhs.segment(m.n_u, m.n_p) = ob.rhs_div;

    // pressure gauge: continuity rows get +area*lambda, border row sums p
    const double area = g.hx * g.hy;
    const int lam = m.lambda_dof();
    for (int k = 0; k < m.n_p; ++k) {
        S.emplace_back(m.n_u + k, lam, area);
        S.emplace_back(lam, m.n_u + k, area);
    }

    SaddleSystem sys;
    sys.dofs = ob.dofs;
    sys.S.resize(N, N);
    sys.S.setFromTriplets(S.begin(), S.end());
    sys.rhs = rhs;
    sys.dt = dt;
    sys.mu = mu;
    sys.theta = theta;
    return sys;
}

} // namespace

SaddleSystem assemble_saddle(const Grid& g, const BcSpec& bc, const VelocityField* advecting,
                             double dt, double mu, double theta) {
    if (!(dt > 0)) throw std::invalid_argument("time.dt: step size must be positive");
    return assemble_impl(g, bc, advecting, dt, mu, theta, true);
}

SaddleSystem assemble_steady(const Grid& g, const BcSpec& bc, double mu) {
    return assemble_impl(g, bc, nullptr, 1.0, mu, 1.0, false);
}

SolverKind pick_solver(const Grid& g, SolverKind requested) {
    if (requested != SolverKind::Auto) return requested;
    return std::max(g.nx, g.ny) <= 128 ? SolverKind::Direct : SolverKind::BiCgStab;
}

SaddleSolver::SaddleSolver(const SaddleSystem& sys, double tol, SolverKind kind)
    : S_(&sys.S), tol_(tol) {
    if (!(tol > 0)) throw std::invalid_argument("solver.tol: tolerance must be positive");
    direct_ = pick_solver(*sys.dofs->grid, kind) == SolverKind::Direct;
    if (direct_) {
        lu_.compute(*S_);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("saddle solver: sparse LU factorization failed");
    } else {
        St_ = S_->transpose();
    }
}

void SaddleSolver::check(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& rhs) const {
    const double scale = rhs.norm();
    const double res = (M * x - rhs).norm();
    if (!(res <= tol_ * (scale > 0 ? scale : 1.0)))
        throw std::runtime_error("saddle solver: residual " + std::to_string(res) +
                                 " exceeds tolerance (rhs norm " + std::to_string(scale) + ")");
}

Eigen::VectorXd SaddleSolver::solve(const Eigen::VectorXd& rhs) const {
    if (direct_) {
        Eigen::VectorXd x = lu_.solve(rhs);
        const double scale = rhs.norm() > 0 ? rhs.norm() : 1.0;
        if ((*S_ * x - rhs).norm() > tol_ * scale) x += lu_.solve(rhs - *S_ * x);
        check(*S_, x, rhs);
        return x;
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(tol_ * 1e-2);
    it.setMaxIterations(4000);
    it.compute(*S_);
    Eigen::VectorXd x = it.solve(rhs);
    check(*S_, x, rhs);
    return x;
}

Eigen::VectorXd SaddleSolver::solve_transposed(const Eigen::VectorXd& rhs) const {
    if (direct_) {
        Eigen::VectorXd x = lu_.transpose().solve(rhs);
        Eigen::SparseMatrix<double> St = S_->transpose();
        const double scale = rhs.norm() > 0 ? rhs.norm() : 1.0;
        if ((St * x - rhs).norm() > tol_ * scale) x += lu_.transpose().solve(rhs - St * x);
        check(St, x, rhs);
        return x;
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(tol_ * 1e-2);
    it.setMaxIterations(4000);
    it.compute(St_);
    Eigen::VectorXd x = it.solve(rhs);
    check(St_, x, rhs);
    return x;
}

std::pair<VelocityField, PressureField> solve_saddle(const Grid& g, const SaddleSystem& sys,
                                                     double tol, SolverKind kind) {
    SaddleSolver solver(sys, tol, kind);
    const Eigen::VectorXd x = solver.solve(sys.rhs);
    VelocityField u = VelocityField::zeros(g);
    sys.dofs->scatter(x.head(sys.dofs->n_u), u);
    PressureField p = sys.dofs->scatter_pressure(x, g);
    return {u, p};
}

} // namespace nsopt
