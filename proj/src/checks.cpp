#include "nsopt/checks.hpp"

#include <algorithm>
#include <cmath>

#include "nsopt/adjoint.hpp"

namespace nsopt {

VelocityField random_divfree_field(const Grid& g, std::mt19937_64& rng, double amp) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> psi((g.nx + 1) * (g.ny + 1), 0.0);
    for (int i = 1; i < g.nx; ++i)
        for (int j = 1; j < g.ny; ++j) psi[i * (g.ny + 1) + j] = amp * gauss(rng);
    if (g.periodic_x)
        for (int j = 0; j <= g.ny; ++j) psi[g.nx * (g.ny + 1) + j] = psi[j]; // seam continuity
    return curl_of_stream(g, psi);
}

ControlTrajectory random_control_direction(const Grid& g, const ControlMask& mask, double dt,
                                           int nt, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ControlTrajectory dir(nt, ControlField::zeros(g));
    for (auto& fn : dir) {
        for (size_t k = 0; k < mask.wx.size(); ++k)
            if (mask.wx[k] > 0) fn.fx[k] = gauss(rng);
        for (size_t k = 0; k < mask.wy.size(); ++k)
            if (mask.wy[k] > 0) fn.fy[k] = gauss(rng);
    }
    const double nrm = control_spacetime_norm(g, mask, dt, dir);
    if (nrm > 0)
        for (auto& fn : dir) {
            for (auto& v : fn.fx) v /= nrm;
            for (auto& v : fn.fy) v /= nrm;
        }
    return dir;
}

GradCheckResult gradient_check(const ProblemConfig& cfg, int n_directions,
                               const std::vector<double>& eps_list, std::uint64_t seed) {
    cfg.validate();
    const Grid& g = cfg.grid;
    const double dt = cfg.time.dt();
    const int nt = cfg.time.nt;
    const CostConfig cost{cfg.cost_weight, cfg.target};
    std::mt19937_64 rng(seed);

    // base control: a small random masked field (keeps the gradient generic)
    ControlTrajectory f0 = random_control_direction(g, cfg.mask, dt, nt, rng);
    for (auto& fn : f0) {
        for (auto& v : fn.fx) v *= 0.3;
        for (auto& v : fn.fy) v *= 0.3;
    }

    const StateTrajectory state = solve_forward(cfg, f0);
    const AdjointTrajectory adj = solve_adjoint(state, cfg);
    const ControlTrajectory grad = cost_gradient(adj, f0, cfg.cost_weight, cfg.mask);
    const ControlTrajectory phi_only = cost_gradient(adj, {}, cfg.cost_weight, cfg.mask);

    double eps_min = eps_list.empty() ? 1e-4 : *std::min_element(eps_list.begin(), eps_list.end());

    GradCheckResult out;
    for (int d = 1; d <= n_directions; ++d) {
        const ControlTrajectory dir = random_control_direction(g, cfg.mask, dt, nt, rng);
        const double adj_dirder = control_spacetime_inner(g, cfg.mask, dt, grad, dir);

        // duality: <u - z_d, v(dir)>_spacetime agrees with <phi|_omega, dir>
        const LinearizedTrajectory lin = solve_linearized(state, cfg, dir);
        double lhs = 0;
        for (int n = 1; n <= nt; ++n) {
            const VelocityField diff =
                cost.target.empty() ? state.u[n] : state.u[n] - cost.target[n];
            lhs += dt * l2_inner(g, diff, lin.v[n]);
        }
        const double rhs = control_spacetime_inner(g, cfg.mask, dt, phi_only, dir);
        const double dual_err = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
        out.worst_duality_error = std::max(out.worst_duality_error, dual_err);

        for (double eps : (eps_list.empty() ? std::vector<double>{1e-4} : eps_list)) {
            const ControlTrajectory fp = [&] {
                ControlTrajectory t = f0;
                for (size_t n = 0; n < t.size(); ++n) {
                    for (size_t k = 0; k < t[n].fx.size(); ++k) t[n].fx[k] += eps * dir[n].fx[k];
                    for (size_t k = 0; k < t[n].fy.size(); ++k) t[n].fy[k] += eps * dir[n].fy[k];
                }
                return t;
            }();
            const ControlTrajectory fm = [&] {
                ControlTrajectory t = f0;
                for (size_t n = 0; n < t.size(); ++n) {
                    for (size_t k = 0; k < t[n].fx.size(); ++k) t[n].fx[k] -= eps * dir[n].fx[k];
                    for (size_t k = 0; k < t[n].fy.size(); ++k) t[n].fy[k] -= eps * dir[n].fy[k];
                }
                return t;
            }();
            const double Jp = evaluate_cost(g, cfg.mask, dt, solve_forward(cfg, fp), fp, cost);
            const double Jm = evaluate_cost(g, cfg.mask, dt, solve_forward(cfg, fm), fm, cost);
            const double fd = (Jp - Jm) / (2 * eps);
            const double rel = std::abs(fd - adj_dirder) / std::max(std::abs(adj_dirder), 1e-300);
            GradCheckRow row;
            row.direction = d;
            row.eps = eps;
            row.fd_value = fd;
            row.adjoint_value = adj_dirder;
            row.rel_error = rel;
            row.duality_error = dual_err;
            out.rows.push_back(row);
            if (eps == eps_min)
                out.worst_rel_error_at_min_eps = std::max(out.worst_rel_error_at_min_eps, rel);
        }
    }
    return out;
}

EnergyCheckResult energy_check(const ProblemConfig& cfg, int n_runs, std::uint64_t seed) {
    const Grid& g = cfg.grid;
    const double dt = cfg.time.dt();
    const double mu = cfg.fluid.mu;
    std::mt19937_64 rng(seed);

    // homogeneous data: b = 0, f = 0
    BcSpec bc0{cfg.bc.kind, cfg.bc.alpha, BoundaryData::zero(g)};
    const double alpha = bc0.kind == BcKind::NavierSlip ? bc0.alpha : 0.0;

    EnergyCheckResult out;
    for (int r = 0; r < n_runs; ++r) {
        ProblemConfig c = cfg;
        c.bc = bc0;
        c.target.clear();
        c.body_force = VelocityField::zeros(g);
        c.initial = random_divfree_field(g, rng, 1.0);

        const StateTrajectory traj = solve_forward(c, {});
        EnergyCheckResult::Run run;
        run.run = r;
        const double E0 = 0.5 * l2_inner(g, traj.u[0], traj.u[0]);
        run.initial_energy = E0;
        const double scale = std::max(E0, 1e-300);
        for (size_t n = 0; n + 1 < traj.u.size(); ++n) {
            const EnergyBreakdown e_new = energy_breakdown(g, bc0, traj.u[n + 1]);
            const double e_old = 0.5 * l2_inner(g, traj.u[n], traj.u[n]);
            const double lhs = e_new.kinetic - e_old +
                               dt * (2.0 * mu * e_new.strain_sq + alpha * e_new.trace_sq);
            run.worst_slack = std::max(run.worst_slack, lhs / scale);
        }
        out.worst_slack = std::max(out.worst_slack, run.worst_slack);
        out.runs.push_back(run);
    }
    return out;
}

} // namespace nsopt
