// Command-line driver: state solves, optimization, the alpha sweep and the
// gradient/energy verification workflows. Exit codes: 0 ok, 1 validation
// error, 2 numerical failure, 3 threshold failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsopt/checks.hpp"
#include "nsopt/config.hpp"
#include "nsopt/io.hpp"
#include "nsopt/presets.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;
constexpr int kThreshold = 3;

struct CommonArgs {
    std::string config;
    std::string bc;        // flag > config > default
    double alpha = -1;
    std::string out;
};

nsopt::RunSetup load(const CommonArgs& args) {
    nsopt::RunSetup setup = nsopt::load_run_setup(args.config);
    if (!args.bc.empty() || args.alpha > 0) nsopt::override_bc(setup, args.bc, args.alpha);
    if (!args.out.empty()) setup.out_dir = args.out;
    nsopt::ensure_dir(setup.out_dir);
    return setup;
}

int cmd_solve(const CommonArgs& args) {
    nsopt::RunSetup setup = load(args);
    const auto& cfg = setup.problem;
    nsopt::StateTrajectory traj = nsopt::solve_forward(cfg, {});
    const int every = setup.checkpoint_every;
    for (size_t n = 0; n < traj.u.size(); ++n) {
        const bool last = n + 1 == traj.u.size();
        if (!(last || n == 0 || (every > 0 && n % static_cast<size_t>(every) == 0))) continue;
        const std::string base = setup.out_dir + "/state_" + std::to_string(n);
        nsopt::dump_velocity_csv(base + "_u.csv", cfg.grid, traj.u[n]);
        nsopt::dump_pressure_csv(base + "_p.csv", cfg.grid, traj.p[n]);
    }
    nsopt::write_run_manifest(setup.out_dir + "/manifest.csv", setup.raw, cfg.solver_tol, traj);
    std::cout << "solve: wrote " << traj.u.size() << " levels to " << setup.out_dir << "\n";
    return kOk;
}

int cmd_optimize(const CommonArgs& args) {
    nsopt::RunSetup setup = load(args);
    const auto& cfg = setup.problem;
    nsopt::OptimizationResult res = nsopt::optimize(cfg, setup.set, setup.opt);
    nsopt::write_history_csv(setup.out_dir + "/history.csv", res.history);
    for (size_t n = 0; n < res.f.size(); ++n) {
        nsopt::VelocityField fv = nsopt::VelocityField::zeros(cfg.grid);
        fv.ux = res.f[n].fx;
        fv.uy = res.f[n].fy;
        nsopt::dump_velocity_csv(setup.out_dir + "/control_" + std::to_string(n + 1) + ".csv",
                                 cfg.grid, fv);
    }
    nsopt::dump_velocity_csv(setup.out_dir + "/state_final_u.csv", cfg.grid, res.state.u.back());
    nsopt::write_run_manifest(setup.out_dir + "/manifest.csv", setup.raw, cfg.solver_tol,
                              res.state);
    std::cout << "optimize: J = " << nsopt::num(res.J)
              << ", stationarity = " << nsopt::num(res.stationarity)
              << (res.converged ? " (converged)" : " (NOT converged: " + res.message + ")")
              << "\n";
    return res.converged ? kOk : kNumerical;
}

int cmd_sweep(const CommonArgs& args) {
    nsopt::RunSetup setup = load(args);
    nsopt::SweepReport rep =
        nsopt::run_alpha_sweep(setup.problem, setup.set, setup.alphas, setup.opt, setup.sweep);
    nsopt::write_sweep_csv(setup.out_dir + "/sweep.csv", rep);

    std::vector<double> xs;
    std::vector<double> f_col, u_col, tu_col, p_col, tp_col, dj_col;
    for (const auto& r : rep.rows) {
        xs.push_back(r.alpha);
        f_col.push_back(r.f_err);
        u_col.push_back(r.u_err);
        tu_col.push_back(r.trace_u);
        p_col.push_back(r.phi_err);
        tp_col.push_back(r.trace_phi);
        dj_col.push_back(std::abs(r.J_alpha - rep.J_ref));
    }
    nsopt::svg_loglog(setup.out_dir + "/sweep_state.svg", "state and control distances", xs,
                      {{"u_err", u_col}, {"f_err", f_col}, {"dJ", dj_col}});
    nsopt::svg_loglog(setup.out_dir + "/sweep_traces.svg", "sqrt(alpha)-weighted traces", xs,
                      {{"trace_u", tu_col}, {"trace_phi", tp_col}});
    nsopt::svg_loglog(setup.out_dir + "/sweep_adjoint.svg", "adjoint distance", xs,
                      {{"phi_err", p_col}});

    bool all_ok = true;
    for (const auto& r : rep.rows) {
        std::cout << "alpha " << nsopt::num(r.alpha) << ": u_err " << nsopt::num(r.u_err)
                  << ", f_err " << nsopt::num(r.f_err) << ", trace_u " << nsopt::num(r.trace_u)
                  << (r.converged ? "" : "  [FLAGGED: " + r.note + "]") << "\n";
        all_ok = all_ok && r.converged;
    }
    std::cout << "slopes: u " << nsopt::num(rep.slope_u) << ", trace_u "
              << nsopt::num(rep.slope_trace_u) << ", f " << nsopt::num(rep.slope_f) << "\n";
    return all_ok ? kOk : kNumerical;
}

int cmd_gradcheck(const CommonArgs& args, int directions, std::vector<double> eps,
                  double threshold) {
    nsopt::RunSetup setup = load(args);
    if (eps.empty()) eps = {1e-4};
    nsopt::GradCheckResult res =
        nsopt::gradient_check(setup.problem, directions, eps, /*seed=*/20240711u);
    nsopt::write_gradcheck_csv(setup.out_dir + "/gradcheck.csv", res.rows);
    std::cout << "gradcheck: worst relative error at smallest eps = "
              << nsopt::num(res.worst_rel_error_at_min_eps)
              << ", worst duality error = " << nsopt::num(res.worst_duality_error) << "\n";
    if (res.worst_rel_error_at_min_eps > threshold) {
        for (const auto& r : res.rows)
            if (r.rel_error > threshold)
                std::cout << "  exceeds threshold: direction " << r.direction << " at eps "
                          << nsopt::num(r.eps) << " (rel error " << nsopt::num(r.rel_error)
                          << ")\n";
        return kThreshold;
    }
    return kOk;
}

int cmd_energycheck(const CommonArgs& args, int runs, double slack) {
    nsopt::RunSetup setup = load(args);
    nsopt::EnergyCheckResult res = nsopt::energy_check(setup.problem, runs, /*seed=*/777u);
    std::ofstream out(setup.out_dir + "/energycheck.csv");
    out << "run,worst_relative_slack,initial_energy\n";
    for (const auto& r : res.runs)
        out << r.run << "," << nsopt::num(r.worst_slack) << "," << nsopt::num(r.initial_energy)
            << "\n";
    std::cout << "energycheck: worst relative slack = " << nsopt::num(res.worst_slack) << "\n";
    return res.worst_slack <= slack ? kOk : kThreshold;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D incompressible flow control: state solves, adjoint gradients, projected-"
                 "gradient optimization and the large-friction asymptotic sweep"};
    app.require_subcommand(1);

    CommonArgs args;
    int directions = 5;
    std::vector<double> eps;
    double threshold = 1e-5;
    int runs = 20;
    double slack = 1e-12;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", args.config, "configuration file")->required();
        sub->add_option("--bc", args.bc, "boundary condition override (dirichlet|slip)");
        sub->add_option("--alpha", args.alpha, "friction coefficient override (slip)");
        sub->add_option("--out", args.out, "output directory override");
    };

    CLI::App* solve = app.add_subcommand("solve", "integrate the state system");
    add_common(solve);
    CLI::App* opt = app.add_subcommand("optimize", "projected-gradient optimal control");
    add_common(opt);
    CLI::App* sweep = app.add_subcommand("sweep", "alpha ladder against the Dirichlet reference");
    add_common(sweep);
    CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    add_common(grad);
    grad->add_option("--directions", directions, "number of random directions");
    grad->add_option("--eps", eps, "finite-difference step list")->delimiter(',');
    grad->add_option("--threshold", threshold, "pass threshold at the smallest eps");
    CLI::App* energy = app.add_subcommand("energycheck", "discrete energy inequality suite");
    add_common(energy);
    energy->add_option("--runs", runs, "number of random initial conditions");
    energy->add_option("--slack", slack, "admissible relative slack");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (solve->parsed()) return cmd_solve(args);
        if (opt->parsed()) return cmd_optimize(args);
        if (sweep->parsed()) return cmd_sweep(args);
        if (grad->parsed()) return cmd_gradcheck(args, directions, eps, threshold);
        if (energy->parsed()) return cmd_energycheck(args, runs, slack);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kValidation;
}
