// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria run full scale; expect a few minutes total.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "nsopt/checks.hpp"
#include "nsopt/config.hpp"
#include "nsopt/presets.hpp"
#include "nsopt/sweep.hpp"

using namespace nsopt;

namespace {

int g_pass = 0, g_fail = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs) {
    std::printf("[%s] criterion %d: %s  --  %s  (%.1fs)\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    (ok ? g_pass : g_fail)++;
}

double channel_rel_error(const Grid& g, const VelocityField& u, double G, double mu,
                         double ainv) {
    VelocityField exact = VelocityField::zeros(g);
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) {
            const double y = g.ux_y(j);
            exact.ux[g.ux_idx(i, j)] = G * y * (g.Ly - y) / (2 * mu) + 0.5 * G * g.Ly * ainv;
        }
    return l2_norm(g, u - exact) / l2_norm(g, exact);
}

// ---- criterion 1: slip channel oracle --------------------------------------
void criterion1() {
    Timer t;
    bool ok = true;
    std::string detail;
    const double G = 1.0, mu = 1.0;
    for (const double alpha : {10.0, 100.0}) {
        std::vector<double> errs;
        for (const int n : {16, 32, 64}) {
            const Grid g = build_grid(1.0, 1.0, n, n, true);
            auto [u, p] = solve_steady_stokes(g, BcSpec::navier_slip(alpha, BoundaryData::zero(g)),
                                              mu, constant_force(g, G, 0.0), 1e-12);
            errs.push_back(channel_rel_error(g, u, G, mu, 1.0 / alpha));
        }
        const double order = std::log2(errs[0] / errs[2]) / 2.0;
        ok = ok && errs[2] <= 1e-3 && order >= 1.9;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "alpha=%g: rel err %.2e (<=1e-3), order %.3f (>=1.9); ",
                      alpha, errs[2], order);
        detail += buf;
    }
    report(1, "slip channel matches the closed form at second order", ok, detail, t.secs());
}

// ---- criterion 2: Dirichlet limit at alpha = 1e8 ----------------------------
void criterion2() {
    Timer t;
    const Grid g = build_grid(1.0, 1.0, 64, 64);
    ProblemConfig cfg;
    cfg.grid = g;
    cfg.time = TimeGrid{0.5, 50}; // dt = 1e-2
    cfg.bc = BcSpec::dirichlet(BoundaryData::zero(g));
    cfg.fluid.mu = 0.05;
    cfg.initial = taylor_vortex(g, 1.0);
    cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
    cfg.cost_weight = 1.0;
    cfg.body_force = VelocityField::zeros(g);
    cfg.solver_tol = 1e-11;

    const StateTrajectory trajD = solve_forward(cfg, {});
    const StateTrajectory trajS =
        solve_forward(cfg.with_bc(BcSpec::navier_slip(1e8, BoundaryData::zero(g))), {});
    std::vector<double> diffs, refs;
    for (size_t n = 1; n < trajD.u.size(); ++n) {
        diffs.push_back(l2_norm(g, trajD.u[n] - trajS.u[n]));
        refs.push_back(l2_norm(g, trajD.u[n]));
    }
    const double rel = spacetime_l2_of_norms(diffs, cfg.time.dt()) /
                       spacetime_l2_of_norms(refs, cfg.time.dt());
    char buf[120];
    std::snprintf(buf, sizeof(buf), "relative space-time gap %.2e (<= 1e-5)", rel);
    report(2, "slip at alpha=1e8 reproduces the Dirichlet solve", rel <= 1e-5, buf, t.secs());
}

// ---- criterion 3: energy inequality suite ----------------------------------
void criterion3() {
    Timer t;
    const Grid g = build_grid(1.0, 1.0, 24, 24);
    double worst = 0;
    int runs = 0;
    for (const double alpha : {10.0, 100.0, 1000.0, 10000.0}) {
        ProblemConfig cfg;
        cfg.grid = g;
        cfg.time = TimeGrid{0.24, 12};
        cfg.bc = BcSpec::navier_slip(alpha, BoundaryData::zero(g));
        cfg.fluid.mu = 0.02;
        cfg.initial = VelocityField::zeros(g);
        cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
        cfg.cost_weight = 1.0;
        cfg.body_force = VelocityField::zeros(g);
        cfg.solver_tol = 1e-13;
        const EnergyCheckResult res = energy_check(cfg, 5, 1000 + static_cast<int>(alpha));
        worst = std::max(worst, res.worst_slack);
        runs += static_cast<int>(res.runs.size());
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d runs, worst relative slack %.2e (<= 1e-12)", runs, worst);
    report(3, "discrete energy inequality with friction bookkeeping", worst <= 1e-12, buf,
           t.secs());
}

// ---- criterion 4: gradient correctness -------------------------------------
void criterion4() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (const auto kind : {BcKind::Dirichlet, BcKind::NavierSlip}) {
        const Grid g = build_grid(1.0, 1.0, 20, 20);
        ProblemConfig cfg;
        cfg.grid = g;
        cfg.time = TimeGrid{0.2, 10};
        cfg.bc = kind == BcKind::Dirichlet ? BcSpec::dirichlet(BoundaryData::zero(g))
                                           : BcSpec::navier_slip(50.0, BoundaryData::zero(g));
        cfg.fluid.mu = 0.05;
        cfg.initial = taylor_vortex(g, 0.8);
        cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
        cfg.cost_weight = 0.5;
        cfg.body_force = VelocityField::zeros(g);
        cfg.solver_tol = 1e-10;
        cfg.target.assign(cfg.time.nt + 1, double_vortex(g, 0.4));

        const GradCheckResult res = gradient_check(cfg, 5, {1e-4}, 2026u);
        ok = ok && res.worst_rel_error_at_min_eps <= 1e-5 && res.worst_duality_error <= 1e-10;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s: FD rel err %.2e (<=1e-5), duality %.2e (<=1e-10); ",
                      kind == BcKind::Dirichlet ? "dirichlet" : "slip",
                      res.worst_rel_error_at_min_eps, res.worst_duality_error);
        detail += buf;
    }
    report(4, "adjoint gradient vs central differences and duality", ok, detail, t.secs());
}

// ---- criterion 5: optimality variational inequality -------------------------
void criterion5() {
    Timer t;
    bool ok = true;
    std::string detail;
    for (const bool active : {true, false}) {
        const Grid g = build_grid(1.0, 1.0, 16, 16);
        ProblemConfig cfg;
        cfg.grid = g;
        cfg.time = TimeGrid{0.2, 8};
        cfg.bc = active ? BcSpec::navier_slip(30.0, BoundaryData::zero(g))
                        : BcSpec::dirichlet(BoundaryData::zero(g));
        cfg.fluid.mu = 0.08;
        cfg.initial = taylor_vortex(g, 0.5);
        cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
        cfg.cost_weight = 0.05;
        cfg.body_force = VelocityField::zeros(g);
        cfg.solver_tol = 1e-12;
        cfg.target = record_target(cfg, constant_control(g, cfg.mask, cfg.time.nt, 0.7, 0.2));

        const AdmissibleSet set =
            active ? AdmissibleSet::ball({}, 0.02) : AdmissibleSet::ball({}, 10.0);
        OptimizerOptions opts;
        opts.tol = 1e-9;
        opts.max_iter = 300;
        const OptimizationResult res = optimize(cfg, set, opts);

        const ControlTrajectory grad = cost_gradient(res.adjoint, res.f, cfg.cost_weight, cfg.mask);
        const double gnorm = control_spacetime_norm(g, cfg.mask, cfg.time.dt(), grad);
        std::mt19937_64 rng(909);
        double worst = 0;
        for (int s = 0; s < 100; ++s) {
            const ControlTrajectory gt =
                sample_admissible(g, cfg.mask, cfg.time.dt(), cfg.time.nt, set, rng);
            worst = std::min(worst, vi_lhs(g, cfg.mask, cfg.time.dt(), res.f, grad, gt));
        }
        const double scale = std::max(1.0, gnorm);
        const bool this_ok = res.converged && worst >= -1e-6 * scale &&
                             res.fixed_point_residual <= 10 * opts.tol;
        ok = ok && this_ok;
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "%s ball: VI min %.2e (>= %.1e), fp residual %.2e (<= %.0e); ",
                      active ? "active" : "interior", worst, -1e-6 * scale,
                      res.fixed_point_residual, 10 * opts.tol);
        detail += buf;
    }
    report(5, "sampled variational inequality and projection fixed point", ok, detail, t.secs());
}

// ---- criterion 6: the asymptotic sweep -------------------------------------
void criterion6() {
    Timer t;
    const Grid g = build_grid(1.0, 1.0, 32, 32);
    ProblemConfig cfg;
    cfg.grid = g;
    cfg.time = TimeGrid{0.5, 25};
    cfg.bc = BcSpec::dirichlet(BoundaryData::zero(g));
    cfg.fluid.mu = 0.05;
    cfg.initial = taylor_vortex(g, 1.0);
    cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
    cfg.cost_weight = 0.05;
    cfg.body_force = VelocityField::zeros(g);
    cfg.solver_tol = 1e-11;
    cfg.target = record_target(cfg, bump_control(g, cfg.mask, cfg.time, 3.0, 1.5));

    const AdmissibleSet set = AdmissibleSet::ball({}, 10.0);
    OptimizerOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = 400;
    const std::vector<double> alphas = {10, 31.6, 100, 316, 1000, 3160, 10000};
    const SweepReport rep = run_alpha_sweep(cfg, set, alphas, opts, {});

    bool ok = true;
    std::string detail;
    auto column = [&](const char* name, auto getter) {
        std::vector<double> col;
        for (const auto& r : rep.rows) col.push_back(getter(r));
        bool mono = true;
        for (size_t k = 1; k < col.size(); ++k) mono = mono && col[k] <= 1.05 * col[k - 1];
        const bool halved = col.back() < 0.5 * col.front();
        ok = ok && mono && halved;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s %.2e->%.2e %s%s; ", name, col.front(), col.back(),
                      mono ? "mono" : "NOT-mono", halved ? "" : " NOT-halved");
        detail += buf;
    };
    for (const auto& r : rep.rows) ok = ok && r.converged;
    column("f", [](const SweepRow& r) { return r.f_err; });
    column("u", [](const SweepRow& r) { return r.u_err; });
    column("tr_u", [](const SweepRow& r) { return r.trace_u; });
    column("phi", [](const SweepRow& r) { return r.phi_err; });
    column("tr_phi", [](const SweepRow& r) { return r.trace_phi; });
    column("dJ", [&](const SweepRow& r) { return std::abs(r.J_alpha - rep.J_ref); });
    report(6, "all sweep metrics decrease toward the Dirichlet optimum", ok, detail, t.secs());
}

// ---- criterion 7: rate fit on the uncontrolled channel sweep ----------------
void criterion7() {
    Timer t;
    const Grid g = build_grid(1.0, 1.0, 32, 32, /*periodic_x=*/true);
    ProblemConfig cfg;
    cfg.grid = g;
    cfg.time = TimeGrid{1.0, 20};
    cfg.bc = BcSpec::dirichlet(BoundaryData::zero(g));
    cfg.fluid.mu = 1.0;
    cfg.body_force = constant_force(g, 1.0, 0.0);
    auto [us, ps] = solve_steady_stokes(g, cfg.bc, cfg.fluid.mu, cfg.body_force, 1e-13);
    cfg.initial = us;
    cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
    cfg.cost_weight = 1.0;
    cfg.solver_tol = 1e-12;
    cfg.target = record_target(cfg, {});

    const SweepReport rep = run_alpha_sweep(cfg, AdmissibleSet::box(0.0, 0.0),
                                            {10, 31.6, 100, 316, 1000, 3160, 10000}, {}, {});
    const bool ok = std::abs(rep.slope_u + 1.0) <= 0.05 && std::abs(rep.slope_trace_u + 0.5) <= 0.05;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "state slope %.4f (-1.0 +/- 0.05), trace slope %.4f (-0.5 +/- 0.05)",
                  rep.slope_u, rep.slope_trace_u);
    report(7, "channel sweep rate fit", ok, buf, t.secs());
}

// ---- criterion 8: projection properties and preset monotonicity -------------
void criterion8() {
    Timer t;
    const Grid g = build_grid(1.0, 1.0, 12, 12);
    const ControlMask mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
    const double dt = 0.05;
    const int nt = 3;
    std::mt19937_64 rng(2468);
    const AdmissibleSet sets[] = {AdmissibleSet::ball({}, 0.8), AdmissibleSet::box(-0.5, 1.0)};

    bool ok = true;
    double worst_exp = 0;
    for (const auto& set : sets) {
        for (int trial = 0; trial < 500; ++trial) { // 500 pairs x 2 sets = 1000
            ControlTrajectory a = random_control_direction(g, mask, dt, nt, rng);
            ControlTrajectory b = random_control_direction(g, mask, dt, nt, rng);
            for (auto& fn : a)
                for (auto& v : fn.fx) v *= 2.5;
            const ControlTrajectory pa = project(g, mask, dt, a, set);
            const ControlTrajectory pb = project(g, mask, dt, b, set);
            const ControlTrajectory ppa = project(g, mask, dt, pa, set);
            for (size_t n = 0; n < pa.size() && ok; ++n)
                for (size_t k = 0; k < pa[n].fx.size(); ++k)
                    if (ppa[n].fx[k] != pa[n].fx[k]) ok = false;
            ControlTrajectory d1 = pa, d2 = a;
            for (size_t n = 0; n < d1.size(); ++n) {
                for (size_t k = 0; k < d1[n].fx.size(); ++k) {
                    d1[n].fx[k] -= pb[n].fx[k];
                    d2[n].fx[k] -= b[n].fx[k];
                }
                for (size_t k = 0; k < d1[n].fy.size(); ++k) {
                    d1[n].fy[k] -= pb[n].fy[k];
                    d2[n].fy[k] -= b[n].fy[k];
                }
            }
            const double dp = control_spacetime_norm(g, mask, dt, d1);
            const double dc = control_spacetime_norm(g, mask, dt, d2);
            worst_exp = std::max(worst_exp, dp - dc);
            if (dp > dc + 1e-12) ok = false;
        }
    }

    // J-history monotonicity on the shipped optimization presets
    int presets = 0;
    const std::string base = std::string(NSOPT_SOURCE_DIR) + "/configs/";
    for (const std::string name : {"optimize_attainable.cfg", "optimize_ball.cfg"}) {
        RunSetup setup = load_run_setup(base + name);
        setup.opt.max_iter = std::min(setup.opt.max_iter, 30);
        const OptimizationResult res = optimize(setup.problem, setup.set, setup.opt);
        for (size_t k = 1; k < res.history.size(); ++k)
            if (res.history[k].J > res.history[k - 1].J + 1e-14) ok = false;
        ++presets;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 pairs: idempotent exact, nonexpansive slack %.1e (<=1e-12); %d preset "
                  "histories monotone",
                  worst_exp, presets);
    report(8, "projection properties and J-history monotonicity", ok, buf, t.secs());
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int a = 1; a < argc; ++a) which.push_back(std::atoi(argv[a]));
    auto want = [&](int id) {
        return which.empty() || std::find(which.begin(), which.end(), id) != which.end();
    };
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4();
    if (want(5)) criterion5();
    if (want(6)) criterion6();
    if (want(7)) criterion7();
    if (want(8)) criterion8();
    std::printf("acceptance: %d passed, %d failed\n", g_pass, g_fail);
    return g_fail == 0 ? 0 : 1;
}
