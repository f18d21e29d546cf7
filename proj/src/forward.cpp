#include "nsopt/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nsopt/stepper.hpp"

namespace nsopt {

void ProblemConfig::validate() const {
    bc.validate(grid);
    if (!(fluid.mu > 0)) throw std::invalid_argument("fluid.mu: viscosity must be positive");
    if (!(cost_weight > 0)) throw std::invalid_argument("cost.M: weight must be positive");
    if (time.nt < 1) throw std::invalid_argument("time.nt: need at least one step");
    if (!(time.T > 0)) throw std::invalid_argument("time.T: horizon must be positive");
    if (!initial.matches(grid))
        throw std::invalid_argument("initial.a: field does not match the grid");
    if (!body_force.matches(grid))
        throw std::invalid_argument("force.body: field does not match the grid");
    if (!target.empty() && target.size() != static_cast<size_t>(time.nt) + 1)
        throw std::invalid_argument("target.zd: expected nt+1 levels, got " +
                                    std::to_string(target.size()));
    if (!(theta >= 0.5 && theta <= 1.0))
        throw std::invalid_argument("time.theta: must lie in [0.5, 1]");
    // a.nu = b(0).nu = 0 on the walls
    for (int j = 1; j <= grid.ny; ++j) {
        if (grid.periodic_x) break;
        if (initial.ux[grid.ux_idx(0, j)] != 0.0 || initial.ux[grid.ux_idx(grid.nx, j)] != 0.0)
            throw std::invalid_argument("initial.a: normal trace on x-walls must vanish");
    }
    for (int i = 1; i <= grid.nx; ++i)
        if (initial.uy[grid.uy_idx(i, 0)] != 0.0 || initial.uy[grid.uy_idx(i, grid.ny)] != 0.0)
            throw std::invalid_argument("initial.a: normal trace on y-walls must vanish");
    const double div0 = max_divergence(grid, initial);
    const double uscale = 1.0 / std::min(grid.hx, grid.hy);
    if (div0 > 100 * solver_tol * std::max(1.0, uscale))
        throw std::invalid_argument("initial.a: not discretely divergence-free (max div = " +
                                    std::to_string(div0) + "); project it first");
}

namespace {

struct StepOutput {
    VelocityField u;
    PressureField p;
    double residual;
};

StepOutput run_one_step(const StepOperator& op, const ProblemConfig& cfg,
                        const VelocityField& u_prev, const ControlField* f_n, int step_index) {
    const DofMap& m = op.dofs();
    const Grid& g = op.grid();
    const double theta = op.theta();

    StepOperator::Step st = op.make_step(u_prev);
    Eigen::VectorXd rhs = st.rhs_affine;
    const Eigen::VectorXd x_old = m.gather(u_prev);

    rhs.head(m.n_u) += op.mass().cwiseProduct(x_old) / op.dt();
    if (theta < 1.0)
        rhs.head(m.n_u) -= (1.0 - theta) * (op.Avisc() * x_old + st.Cmat * x_old);

    // volumetric forcing: control over omega plus the steady body force
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const int k = g.ux_idx(i, j);
            const int d = m.ux_dof[k];
            if (d < 0 || (g.periodic_x && i == g.nx)) continue;
            double v = 0;
            if (f_n && cfg.mask.qx[k] > 0) v += cfg.mask.qx[k] * f_n->fx[k];
            v += m.mass[d] * cfg.body_force.ux[k];
            rhs[d] += v;
        }
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) {
            const int k = g.uy_idx(i, j);
            const int d = m.uy_dof[k];
            if (d < 0) continue;
            double v = 0;
            if (f_n && cfg.mask.qy[k] > 0) v += cfg.mask.qy[k] * f_n->fy[k];
            v += m.mass[d] * cfg.body_force.uy[k];
            rhs[d] += v;
        }

    SaddleSystem sys;
    sys.dofs = op.dofs_ptr();
    sys.S = std::move(st.S);
    sys.rhs = rhs;
    sys.dt = op.dt();
    SaddleSolver solver(sys, cfg.solver_tol, cfg.solver);
    const Eigen::VectorXd x = solver.solve(rhs);
    if (!x.allFinite())
        throw std::runtime_error("forward step " + std::to_string(step_index) +
                                 ": solution contains NaN/Inf");

    StepOutput out;
    out.u = VelocityField::zeros(g);
    m.scatter(x.head(m.n_u), out.u);
    out.p = m.scatter_pressure(x, g);
    const double scale = rhs.norm() > 0 ? rhs.norm() : 1.0;
    out.residual = (sys.S * x - rhs).norm() / scale;
    return out;
}

} // namespace

std::pair<VelocityField, PressureField> advance_step(const VelocityField& prev,
                                                     const PressureField& /*prev_p*/,
                                                     const ProblemConfig& cfg,
                                                     const ControlField& f_n) {
    cfg.validate();
    StepOperator op(cfg.grid, cfg.bc, cfg.fluid.mu, cfg.time.dt(), cfg.theta);
    StepOutput out = run_one_step(op, cfg, prev, &f_n, 0);
    return {std::move(out.u), std::move(out.p)};
}

StateTrajectory solve_forward(const ProblemConfig& cfg, const ControlTrajectory& f) {
    cfg.validate();
    if (!f.empty() && f.size() != static_cast<size_t>(cfg.time.nt))
        throw std::invalid_argument("control: expected one field per step (nt = " +
                                    std::to_string(cfg.time.nt) + "), got " +
                                    std::to_string(f.size()));

    StepOperator op(cfg.grid, cfg.bc, cfg.fluid.mu, cfg.time.dt(), cfg.theta);
    StateTrajectory traj;
    traj.u.reserve(cfg.time.nt + 1);
    traj.p.reserve(cfg.time.nt + 1);
    traj.u.push_back(cfg.initial);
    traj.p.push_back(PressureField::zeros(cfg.grid));

    for (int n = 1; n <= cfg.time.nt; ++n) {
        const ControlField* fn = f.empty() ? nullptr : &f[n - 1];
        StepOutput out = run_one_step(op, cfg, traj.u.back(), fn, n);
        traj.step_residuals.push_back(out.residual);
        traj.step_divergence.push_back(max_divergence(cfg.grid, out.u));
        traj.u.push_back(std::move(out.u));
        traj.p.push_back(std::move(out.p));
    }
    return traj;
}

std::pair<VelocityField, PressureField> solve_steady_stokes(const Grid& g, const BcSpec& bc,
                                                            double mu,
                                                            const VelocityField& body_force,
                                                            double tol, SolverKind kind) {
    SaddleSystem sys = assemble_steady(g, bc, mu);
    const DofMap& m = *sys.dofs;
    const Eigen::VectorXd bf = m.gather(body_force);
    for (int d = 0; d < m.n_u; ++d) sys.rhs[d] += m.mass[d] * bf[d];
    return solve_saddle(g, sys, tol, kind);
}

VelocityField leray_project(const Grid& g, const BcSpec& bc, const VelocityField& v, double tol,
                            SolverKind kind) {
    OperatorBlocks ob = build_operator_blocks(g, bc, 1.0);
    const DofMap& m = *ob.dofs;
    const int N = m.n_total();

    Triplets S;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    const Eigen::VectorXd xin = m.gather(v);
    for (int d = 0; d < m.n_u; ++d) {
        const double w = m.mass[d] > 0 ? m.mass[d] : 1.0; // wall trace dofs pass through
        S.emplace_back(d, d, w);
        rhs[d] = w * xin[d];
    }
    for (const auto& t : ob.G) S.emplace_back(t.row(), t.col(), t.value());
    for (const auto& t : ob.B) S.emplace_back(t.row(), t.col(), t.value());
    rhs.segment(m.n_u, m.n_p) = ob.rhs_div;
    const double area = g.hx * g.hy;
    for (int k = 0; k < m.n_p; ++k) {
        S.emplace_back(m.n_u + k, m.lambda_dof(), area);
        S.emplace_back(m.lambda_dof(), m.n_u + k, area);
    }

    SaddleSystem sys;
    sys.dofs = ob.dofs;
    sys.S.resize(N, N);
    sys.S.setFromTriplets(S.begin(), S.end());
    sys.rhs = rhs;
    SaddleSolver solver(sys, tol, kind);
    const Eigen::VectorXd x = solver.solve(rhs);
    VelocityField out = VelocityField::zeros(g);
    m.scatter(x.head(m.n_u), out);
    return out;
}

double strain_square(const Grid& g, const VelocityField& u) {
    if (!u.matches(g)) throw std::invalid_argument("strain_square: field does not match grid");
    const double hx = g.hx, hy = g.hy;
    auto ux = [&](int i, int j) {
        if (g.periodic_x && i == g.nx) i = 0;
        return u.ux[g.ux_idx(i, j)];
    };
    auto uy = [&](int i, int j) {
        if (g.periodic_x) {
            if (i == 0) i = g.nx;
            else if (i == g.nx + 1) i = 1;
        }
        return u.uy[g.uy_idx(i, j)];
    };
    double acc = 0;
    for (int ci = 0; ci < g.nx; ++ci)
        for (int cj = 0; cj < g.ny; ++cj) {
            const double dxx = (ux(ci + 1, cj + 1) - ux(ci, cj + 1)) / hx;
            const double dyy = (uy(ci + 1, cj + 1) - uy(ci + 1, cj)) / hy;
            acc += (dxx * dxx + dyy * dyy) * hx * hy;
        }
    const int node_ihi = g.periodic_x ? g.nx - 1 : g.nx;
    for (int ni = 0; ni <= node_ihi; ++ni)
        for (int nj = 0; nj <= g.ny; ++nj) {
            double dudy;
            if (nj == 0)
                dudy = (ux(ni, 1) - ux(ni, 0)) * 2.0 / hy;
            else if (nj == g.ny)
                dudy = (ux(ni, g.ny + 1) - ux(ni, g.ny)) * 2.0 / hy;
            else
                dudy = (ux(ni, nj + 1) - ux(ni, nj)) / hy;
            double dvdx;
            if (!g.periodic_x && ni == 0)
                dvdx = (uy(1, nj) - uy(0, nj)) * 2.0 / hx;
            else if (!g.periodic_x && ni == g.nx)
                dvdx = (uy(g.nx + 1, nj) - uy(g.nx, nj)) * 2.0 / hx;
            else
                dvdx = (uy(ni + 1, nj) - uy(ni, nj)) / hx;
            const double dxy = 0.5 * (dudy + dvdx);
            double w = hx * hy;
            if (nj == 0 || nj == g.ny) w *= 0.5;
            if (!g.periodic_x && (ni == 0 || ni == g.nx)) w *= 0.5;
            acc += 2.0 * dxy * dxy * w;
        }
    return acc;
}

EnergyBreakdown energy_breakdown(const Grid& g, const BcSpec& bc, const VelocityField& u) {
    EnergyBreakdown e;
    e.kinetic = 0.5 * l2_inner(g, u, u);
    e.strain_sq = strain_square(g, u);
    const double tr = boundary_trace_norm(g, u, bc.b);
    e.trace_sq = tr * tr;
    return e;
}

} // namespace nsopt
