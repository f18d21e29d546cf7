#include "nsopt/sweep.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace nsopt {

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_slope: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0) || !(y[k] > 0) || !std::isfinite(y[k])) continue;
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    return denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
}

std::pair<OptimizationResult, AdjointTrajectory> dirichlet_reference(
    const ProblemConfig& cfg, const AdmissibleSet& set, const OptimizerOptions& opts) {
    if (cfg.bc.kind != BcKind::Dirichlet)
        throw std::invalid_argument("dirichlet_reference: config must carry a Dirichlet bc");
    OptimizationResult res = optimize(cfg, set, opts);
    AdjointTrajectory adj = res.adjoint;
    return {std::move(res), std::move(adj)};
}

namespace {

SweepRow make_row(const Grid& g, const ControlMask& mask, double dt, double alpha,
                  const BcSpec& slip_bc, const OptimizationResult& ref,
                  const OptimizationResult& opt) {
    SweepRow row;
    row.alpha = alpha;
    row.converged = opt.converged;
    row.iters = static_cast<int>(opt.history.size()) - 1;
    row.residual = opt.stationarity;
    row.J_alpha = opt.J;

    // control distance
    {
        ControlTrajectory d = opt.f;
        for (size_t n = 0; n < d.size(); ++n) {
            for (size_t k = 0; k < d[n].fx.size(); ++k) d[n].fx[k] -= ref.f[n].fx[k];
            for (size_t k = 0; k < d[n].fy.size(); ++k) d[n].fy[k] -= ref.f[n].fy[k];
        }
        row.f_err = control_spacetime_norm(g, mask, dt, d);
    }
    // state distance and sqrt(alpha)-weighted boundary trace
    {
        std::vector<double> diff_norms, trace_norms;
        const BoundaryData& b = slip_bc.b;
        for (size_t n = 1; n < opt.state.u.size(); ++n) {
            diff_norms.push_back(l2_norm(g, opt.state.u[n] - ref.state.u[n]));
            trace_norms.push_back(boundary_trace_norm(g, opt.state.u[n], b));
        }
        row.u_err = spacetime_l2_of_norms(diff_norms, dt);
        row.trace_u = std::sqrt(alpha) * spacetime_l2_of_norms(trace_norms, dt);
    }
    // adjoint distance and trace (phi.nu = 0, so the tangential trace is the
    // full trace)
    {
        const BoundaryData zero = BoundaryData::zero(g);
        std::vector<double> diff_norms, trace_norms;
        for (size_t k = 0; k + 1 < opt.adjoint.phi.size(); ++k) {
            diff_norms.push_back(l2_norm(g, opt.adjoint.phi[k] - ref.adjoint.phi[k]));
            trace_norms.push_back(boundary_trace_norm(g, opt.adjoint.phi[k], zero));
        }
        row.phi_err = spacetime_l2_of_norms(diff_norms, dt);
        row.trace_phi = std::sqrt(alpha) * spacetime_l2_of_norms(trace_norms, dt);
    }
    return row;
}

} // namespace

SweepReport run_alpha_sweep(const ProblemConfig& base, const AdmissibleSet& set,
                            const std::vector<double>& alphas, const OptimizerOptions& opts,
                            const SweepOptions& sopts) {
    if (alphas.empty()) throw std::invalid_argument("sweep.alphas: empty ladder");
    for (size_t k = 1; k < alphas.size(); ++k)
        if (!(alphas[k] > alphas[k - 1]))
            throw std::invalid_argument("sweep.alphas: ladder must be strictly increasing");
    const double bmax = base.bc.b.max_abs();
    for (double a : alphas)
        if (!(a > bmax + 1.0))
            throw std::invalid_argument("sweep.alphas: every alpha must exceed max|b| + 1");

    const Grid& g = base.grid;
    const double dt = base.time.dt();

    ProblemConfig dir_cfg = base.with_bc(BcSpec::dirichlet(base.bc.b));
    auto [ref, ref_adj] = dirichlet_reference(dir_cfg, set, opts);
    (void)ref_adj;

    SweepReport rep;
    rep.J_ref = ref.J;

    auto solve_one = [&](double alpha, const ControlTrajectory* warm) {
        ProblemConfig cfg = base.with_bc(BcSpec::navier_slip(alpha, base.bc.b));
        OptimizerOptions o = opts;
        if (warm && !warm->empty()) o.start = *warm;
        try {
            OptimizationResult opt = optimize(cfg, set, o);
            SweepRow row = make_row(g, base.mask, dt, alpha, cfg.bc, ref, opt);
            if (!opt.converged) row.note = "optimizer: " + opt.message;
            return std::make_pair(row, opt.f);
        } catch (const std::exception& e) {
            SweepRow row;
            row.alpha = alpha;
            row.converged = false;
            row.note = e.what();
            row.f_err = row.u_err = row.trace_u = row.phi_err = row.trace_phi =
                std::numeric_limits<double>::quiet_NaN();
            return std::make_pair(row, ControlTrajectory{});
        }
    };

    if (!sopts.warm_start && sopts.parallel > 1) {
        std::vector<std::future<std::pair<SweepRow, ControlTrajectory>>> futs;
        futs.reserve(alphas.size());
        for (double a : alphas)
            futs.push_back(std::async(std::launch::async, solve_one, a, nullptr));
        for (auto& fu : futs) rep.rows.push_back(fu.get().first);
    } else {
        ControlTrajectory warm;
        for (double a : alphas) {
            auto [row, fbar] = solve_one(a, sopts.warm_start ? &warm : nullptr);
            rep.rows.push_back(row);
            if (sopts.warm_start && !fbar.empty()) warm = std::move(fbar);
        }
    }

    std::vector<double> xs, f_col, u_col, tu_col, p_col, tp_col, dj_col;
    for (const auto& r : rep.rows) {
        xs.push_back(r.alpha);
        f_col.push_back(r.f_err);
        u_col.push_back(r.u_err);
        tu_col.push_back(r.trace_u);
        p_col.push_back(r.phi_err);
        tp_col.push_back(r.trace_phi);
        dj_col.push_back(std::abs(r.J_alpha - rep.J_ref));
    }
    rep.slope_f = fit_loglog_slope(xs, f_col);
    rep.slope_u = fit_loglog_slope(xs, u_col);
    rep.slope_trace_u = fit_loglog_slope(xs, tu_col);
    rep.slope_phi = fit_loglog_slope(xs, p_col);
    rep.slope_trace_phi = fit_loglog_slope(xs, tp_col);
    rep.slope_dJ = fit_loglog_slope(xs, dj_col);
    return rep;
}

} // namespace nsopt
