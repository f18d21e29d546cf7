#include "nsopt/adjoint.hpp"

#include <stdexcept>
#include <string>

#include "nsopt/stepper.hpp"

namespace nsopt {

namespace {

void check_inputs(const StateTrajectory& state, const ProblemConfig& cfg, const char* what) {
    if (cfg.theta != 1.0)
        throw std::invalid_argument(std::string(what) +
                                    ": gradient machinery requires the implicit Euler scheme "
                                    "(time.theta = 1)");
    if (state.u.size() != static_cast<size_t>(cfg.time.nt) + 1)
        throw std::invalid_argument(std::string(what) + ": state trajectory has " +
                                    std::to_string(state.u.size()) + " levels, config wants " +
                                    std::to_string(cfg.time.nt + 1));
    for (const auto& u : state.u)
        if (!u.matches(cfg.grid))
            throw std::invalid_argument(std::string(what) + ": state level does not match grid");
}

BcSpec homogeneous_bc(const ProblemConfig& cfg) {
    return BcSpec{cfg.bc.kind, cfg.bc.alpha, BoundaryData::zero(cfg.grid)};
}

} // namespace

LinearizedTrajectory solve_linearized(const StateTrajectory& state, const ProblemConfig& cfg,
                                      const ControlTrajectory& g) {
    check_inputs(state, cfg, "solve_linearized");
    if (!g.empty() && g.size() != static_cast<size_t>(cfg.time.nt))
        throw std::invalid_argument("solve_linearized: control direction has " +
                                    std::to_string(g.size()) + " steps, config wants " +
                                    std::to_string(cfg.time.nt));

    const Grid& grid = cfg.grid;
    StepOperator op(grid, homogeneous_bc(cfg), cfg.fluid.mu, cfg.time.dt(), 1.0);
    const DofMap& m = op.dofs();
    const double dt = cfg.time.dt();

    LinearizedTrajectory lin;
    lin.v.push_back(VelocityField::zeros(grid));
    lin.q.push_back(PressureField::zeros(grid));

    Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(m.n_u);
    for (int n = 1; n <= cfg.time.nt; ++n) {
        StepOperator::Step st = op.make_step(state.u[n - 1]);
        const Eigen::SparseMatrix<double> K =
            build_convection_jacobian(grid, m, state.u[n]);

        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.n_total());
        rhs.head(m.n_u) = op.mass().cwiseProduct(v_prev) / dt - K * v_prev;
        if (!g.empty()) {
            const ControlField& gn = g[n - 1];
            for (size_t k = 0; k < cfg.mask.qx.size(); ++k)
                if (cfg.mask.qx[k] > 0) {
                    const int d = m.ux_dof[k];
                    if (d >= 0) rhs[d] += cfg.mask.qx[k] * gn.fx[k];
                }
            for (size_t k = 0; k < cfg.mask.qy.size(); ++k)
                if (cfg.mask.qy[k] > 0) {
                    const int d = m.uy_dof[k];
                    if (d >= 0) rhs[d] += cfg.mask.qy[k] * gn.fy[k];
                }
        }

        SaddleSystem sys;
        sys.dofs = op.dofs_ptr();
        sys.S = std::move(st.S);
        sys.rhs = rhs;
        sys.dt = dt;
        SaddleSolver solver(sys, cfg.solver_tol, cfg.solver);
        const Eigen::VectorXd x = solver.solve(rhs);
        if (!x.allFinite())
            throw std::runtime_error("linearized step " + std::to_string(n) +
                                     ": solution contains NaN/Inf");

        VelocityField v = VelocityField::zeros(grid);
        m.scatter(x.head(m.n_u), v);
        lin.v.push_back(std::move(v));
        lin.q.push_back(m.scatter_pressure(x, grid));
        v_prev = x.head(m.n_u);
    }
    return lin;
}

AdjointTrajectory solve_adjoint(const StateTrajectory& state, const ProblemConfig& cfg) {
    check_inputs(state, cfg, "solve_adjoint");
    if (!cfg.target.empty() && cfg.target.size() != state.u.size())
        throw std::invalid_argument("solve_adjoint: target has " +
                                    std::to_string(cfg.target.size()) + " levels, state has " +
                                    std::to_string(state.u.size()));

    const Grid& grid = cfg.grid;
    const int nt = cfg.time.nt;
    const double dt = cfg.time.dt();
    StepOperator op(grid, homogeneous_bc(cfg), cfg.fluid.mu, dt, 1.0);
    const DofMap& m = op.dofs();

    AdjointTrajectory adj;
    adj.phi.assign(nt + 1, VelocityField::zeros(grid));
    adj.pi.assign(nt + 1, PressureField::zeros(grid));

    Eigen::VectorXd w_next = Eigen::VectorXd::Zero(m.n_u); // multiplier of step n+1
    for (int n = nt; n >= 1; --n) {
        // source: derivative of the tracking term at level n
        Eigen::VectorXd src = m.gather(state.u[n]);
        if (!cfg.target.empty()) src -= m.gather(cfg.target[n]);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.n_total());
        rhs.head(m.n_u) = dt * op.mass().cwiseProduct(src);

        if (n < nt) {
            const Eigen::SparseMatrix<double> K_next =
                build_convection_jacobian(grid, m, state.u[n + 1]);
            rhs.head(m.n_u) += op.mass().cwiseProduct(w_next) / dt;
            rhs.head(m.n_u) -= K_next.transpose() * w_next;
        }

        StepOperator::Step st = op.make_step(state.u[n - 1]);
        SaddleSystem sys;
        sys.dofs = op.dofs_ptr();
        sys.S = std::move(st.S);
        sys.rhs = rhs;
        sys.dt = dt;
        SaddleSolver solver(sys, cfg.solver_tol, cfg.solver);
        const Eigen::VectorXd w = solver.solve_transposed(rhs);
        if (!w.allFinite())
            throw std::runtime_error("adjoint step " + std::to_string(n) +
                                     ": solution contains NaN/Inf");

        VelocityField phi = VelocityField::zeros(grid);
        m.scatter(Eigen::VectorXd(w.head(m.n_u) / dt), phi);
        adj.phi[n - 1] = std::move(phi);
        adj.pi[n - 1] = m.scatter_pressure(Eigen::VectorXd(w / dt), grid);
        w_next = w.head(m.n_u);
    }
    return adj;
}

ControlTrajectory cost_gradient(const AdjointTrajectory& adj, const ControlTrajectory& f,
                                double M, const ControlMask& mask) {
    if (adj.phi.empty()) throw std::invalid_argument("cost_gradient: empty adjoint trajectory");
    const int nt = static_cast<int>(adj.phi.size()) - 1;
    if (!f.empty() && static_cast<int>(f.size()) != nt)
        throw std::invalid_argument("cost_gradient: control and adjoint time grids differ");

    ControlTrajectory grad;
    grad.reserve(nt);
    for (int n = 1; n <= nt; ++n) {
        ControlField gth;
        gth.nx = adj.phi[n - 1].nx;
        gth.ny = adj.phi[n - 1].ny;
        gth.fx.assign(mask.qx.size(), 0.0);
        gth.fy.assign(mask.qy.size(), 0.0);
        for (size_t k = 0; k < mask.qx.size(); ++k)
            if (mask.wx[k] > 0)
                gth.fx[k] = adj.phi[n - 1].ux[k] + (f.empty() ? 0.0 : M * f[n - 1].fx[k]);
        for (size_t k = 0; k < mask.qy.size(); ++k)
            if (mask.wy[k] > 0)
                gth.fy[k] = adj.phi[n - 1].uy[k] + (f.empty() ? 0.0 : M * f[n - 1].fy[k]);
        grad.push_back(std::move(gth));
    }
    return grad;
}

} // namespace nsopt
