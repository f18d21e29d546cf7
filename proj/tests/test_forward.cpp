#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "nsopt/checks.hpp"
#include "nsopt/forward.hpp"
#include "nsopt/presets.hpp"

using namespace nsopt;

namespace {

// closed-form channel profile: mu U'' = -G with  mu U'(0) = alpha U(0),
// -mu U'(H) = alpha U(H)  =>  U(y) = G y(H-y)/(2 mu) + G H/(2 alpha)
double channel_exact(double y, double G, double mu, double H, double alpha_inv) {
    return G * y * (H - y) / (2 * mu) + 0.5 * G * H * alpha_inv;
}

ProblemConfig basic_config(const Grid& g, const BcSpec& bc, double T, int nt, double mu) {
    ProblemConfig cfg;
    cfg.grid = g;
    cfg.time = TimeGrid{T, nt};
    cfg.bc = bc;
    cfg.fluid.mu = mu;
    cfg.initial = VelocityField::zeros(g);
    cfg.mask = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
    cfg.body_force = VelocityField::zeros(g);
    cfg.cost_weight = 1.0;
    return cfg;
}

double channel_error(const Grid& g, const VelocityField& u, double G, double mu, double ainv) {
    // relative L2 error of the x-velocity against the sampled closed form
    VelocityField exact = VelocityField::zeros(g);
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j)
            exact.ux[g.ux_idx(i, j)] = channel_exact(g.ux_y(j), G, mu, g.Ly, ainv);
    return l2_norm(g, u - exact) / l2_norm(g, exact);
}

} // namespace

TEST_CASE("zero data is an equilibrium under both boundary conditions") {
    const Grid g = build_grid(1.0, 1.0, 8, 8);
    for (const bool slip : {false, true}) {
        const BcSpec bc = slip ? BcSpec::navier_slip(10.0, BoundaryData::zero(g))
                               : BcSpec::dirichlet(BoundaryData::zero(g));
        ProblemConfig cfg = basic_config(g, bc, 0.2, 4, 1.0);
        const StateTrajectory traj = solve_forward(cfg, {});
        for (const auto& u : traj.u) CHECK(l2_norm(g, u) == 0.0);
    }
}

TEST_CASE("steady slip channel matches the closed form") {
    // periodic-in-x channel, body force (1,0), mu = 1
    const double G = 1.0, mu = 1.0;
    for (const double alpha : {10.0, 100.0}) {
        const Grid g = build_grid(1.0, 1.0, 64, 64, /*periodic_x=*/true);
        const BcSpec bc = BcSpec::navier_slip(alpha, BoundaryData::zero(g));
        auto [u, p] = solve_steady_stokes(g, bc, mu, constant_force(g, G, 0.0), 1e-12);

        // wall trace is exact: the friction flux balance pins U(0) = GH/(2a)
        for (int i = 0; i < g.nx; ++i) {
            CHECK(u.ux[g.ux_idx(i, 0)] == doctest::Approx(G / (2 * alpha)).epsilon(1e-8));
            CHECK(u.ux[g.ux_idx(i, g.ny + 1)] == doctest::Approx(G / (2 * alpha)).epsilon(1e-8));
        }
        CHECK(channel_error(g, u, G, mu, 1.0 / alpha) < 1e-3);
        CHECK(l2_norm(g, p) < 1e-9);
        CHECK(max_divergence(g, u) < 1e-10);
    }
}

TEST_CASE("steady Dirichlet channel: classical profile, zero wall values") {
    const Grid g = build_grid(1.0, 1.0, 64, 64, true);
    auto [u, p] = solve_steady_stokes(g, BcSpec::dirichlet(BoundaryData::zero(g)), 1.0,
                                      constant_force(g, 1.0, 0.0), 1e-12);
    for (int i = 0; i < g.nx; ++i) CHECK(u.ux[g.ux_idx(i, 0)] == 0.0);
    CHECK(channel_error(g, u, 1.0, 1.0, 0.0) < 1e-3);
}

TEST_CASE("zero force, zero data: steady solve returns zero") {
    const Grid g = build_grid(1.0, 1.0, 16, 16, true);
    auto [u, p] = solve_steady_stokes(g, BcSpec::navier_slip(10.0, BoundaryData::zero(g)), 1.0,
                                      VelocityField::zeros(g), 1e-12);
    CHECK(l2_norm(g, u) == 0.0);
}

TEST_CASE("spatial order of the slip channel is two") {
    const double alpha = 10.0;
    std::vector<double> errs;
    for (const int n : {16, 32, 64}) {
        const Grid g = build_grid(1.0, 1.0, n, n, true);
        auto [u, p] = solve_steady_stokes(g, BcSpec::navier_slip(alpha, BoundaryData::zero(g)),
                                          1.0, constant_force(g, 1.0, 0.0), 1e-12);
        errs.push_back(channel_error(g, u, 1.0, 1.0, 1.0 / alpha));
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 1.9);
    CHECK(order2 >= 1.9);
}

TEST_CASE("steady profile is a fixed point of the transient scheme") {
    const Grid g = build_grid(1.0, 1.0, 32, 32, true);
    const double alpha = 10.0;
    const BcSpec bc = BcSpec::navier_slip(alpha, BoundaryData::zero(g));
    auto [ustar, pstar] = solve_steady_stokes(g, bc, 1.0, constant_force(g, 1.0, 0.0), 1e-13);

    ProblemConfig cfg = basic_config(g, bc, 0.5, 5, 1.0);
    cfg.initial = ustar;
    cfg.body_force = constant_force(g, 1.0, 0.0);
    const StateTrajectory traj = solve_forward(cfg, {});
    for (size_t n = 1; n < traj.u.size(); ++n)
        CHECK(l2_norm(g, traj.u[n] - ustar) < 1e-9 * l2_norm(g, ustar));
}

TEST_CASE("transient channel converges to the steady profile") {
    const Grid g = build_grid(1.0, 1.0, 16, 16, true);
    const double alpha = 10.0;
    const BcSpec bc = BcSpec::navier_slip(alpha, BoundaryData::zero(g));
    auto [ustar, pstar] = solve_steady_stokes(g, bc, 1.0, constant_force(g, 1.0, 0.0), 1e-13);

    ProblemConfig cfg = basic_config(g, bc, 10.0, 100, 1.0);
    cfg.body_force = constant_force(g, 1.0, 0.0);
    const StateTrajectory traj = solve_forward(cfg, {});
    CHECK(l2_norm(g, traj.u.back() - ustar) < 1e-6);
}

TEST_CASE("large-friction limit: slip approaches Dirichlet at rate 1/alpha") {
    const Grid g = build_grid(1.0, 1.0, 32, 32, true);
    auto [ud, pd] = solve_steady_stokes(g, BcSpec::dirichlet(BoundaryData::zero(g)), 1.0,
                                        constant_force(g, 1.0, 0.0), 1e-13);
    double prev = 1e300;
    for (const double alpha : {10.0, 100.0, 1000.0, 10000.0}) {
        auto [ua, pa] = solve_steady_stokes(g, BcSpec::navier_slip(alpha, BoundaryData::zero(g)),
                                            1.0, constant_force(g, 1.0, 0.0), 1e-13);
        const double diff = l2_norm(g, ua - ud);
        CHECK(diff < prev);
        // on the channel the gap is the constant G H/(2 alpha), |Omega| = 1
        CHECK(diff == doctest::Approx(1.0 / (2 * alpha)).epsilon(1e-5));
        prev = diff;
    }
}

TEST_CASE("sqrt(alpha)-weighted wall trace follows the closed form") {
    // frozen oracle: sqrt(alpha) * sqrt(2)/(2 alpha) at alpha = 10, 100, 1000
    const Grid g = build_grid(1.0, 1.0, 32, 32, true);
    const BoundaryData b0 = BoundaryData::zero(g);
    const double expected[] = {0.223606797749979, 0.07071067811865475, 0.02236067977499790};
    int k = 0;
    for (const double alpha : {10.0, 100.0, 1000.0}) {
        auto [ua, pa] = solve_steady_stokes(g, BcSpec::navier_slip(alpha, b0), 1.0,
                                            constant_force(g, 1.0, 0.0), 1e-13);
        const double tr = std::sqrt(alpha) * boundary_trace_norm(g, ua, b0);
        CHECK(tr == doctest::Approx(expected[k++]).epsilon(1e-6));
    }
}

TEST_CASE("slip solve at alpha = 1e8 agrees with the Dirichlet solve") {
    const Grid g = build_grid(1.0, 1.0, 24, 24);
    ProblemConfig cfg = basic_config(g, BcSpec::dirichlet(BoundaryData::zero(g)), 0.25, 10, 0.05);
    cfg.initial = taylor_vortex(g, 1.0);
    const StateTrajectory trajD = solve_forward(cfg, {});
    ProblemConfig cfgS = cfg.with_bc(BcSpec::navier_slip(1e8, BoundaryData::zero(g)));
    const StateTrajectory trajS = solve_forward(cfgS, {});
    std::vector<double> diffs, refs;
    for (size_t n = 1; n < trajD.u.size(); ++n) {
        diffs.push_back(l2_norm(g, trajD.u[n] - trajS.u[n]));
        refs.push_back(l2_norm(g, trajD.u[n]));
    }
    const double rel = spacetime_l2_of_norms(diffs, cfg.time.dt()) /
                       spacetime_l2_of_norms(refs, cfg.time.dt());
    CHECK(rel < 1e-5);
}

TEST_CASE("discrete energy inequality holds step by step") {
    const Grid g = build_grid(1.0, 1.0, 16, 16);
    for (const double alpha : {10.0, 1000.0}) {
        ProblemConfig cfg = basic_config(g, BcSpec::navier_slip(alpha, BoundaryData::zero(g)),
                                         0.2, 10, 0.02);
        const EnergyCheckResult res = energy_check(cfg, 4, 12345u);
        CHECK(res.worst_slack <= 1e-12);
    }
    // Dirichlet variant (no friction term)
    ProblemConfig cfg = basic_config(g, BcSpec::dirichlet(BoundaryData::zero(g)), 0.2, 10, 0.02);
    const EnergyCheckResult res = energy_check(cfg, 4, 54321u);
    CHECK(res.worst_slack <= 1e-12);
}

TEST_CASE("every computed level is discretely divergence free") {
    const Grid g = build_grid(1.0, 1.0, 24, 24);
    ProblemConfig cfg = basic_config(g, BcSpec::navier_slip(20.0, BoundaryData::zero(g)), 0.3,
                                     12, 0.05);
    cfg.initial = taylor_vortex(g, 1.0);
    const StateTrajectory traj = solve_forward(cfg, {});
    double umax = 0;
    for (const auto& u : traj.u)
        for (double v : u.ux) umax = std::max(umax, std::abs(v));
    const double scale = std::max(1.0, umax * (1 / g.hx + 1 / g.hy));
    for (double d : traj.step_divergence) CHECK(d <= 10 * cfg.solver_tol * scale);
}

TEST_CASE("Leray projection returns a divergence-free field and is idempotent") {
    const Grid g = build_grid(1.0, 1.0, 16, 16);
    const BcSpec bc = BcSpec::dirichlet(BoundaryData::zero(g));
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    VelocityField v = VelocityField::zeros(g);
    for (int i = 1; i < g.nx; ++i)
        for (int j = 1; j <= g.ny; ++j) v.ux[g.ux_idx(i, j)] = gauss(rng);
    for (int i = 1; i <= g.nx; ++i)
        for (int j = 1; j < g.ny; ++j) v.uy[g.uy_idx(i, j)] = gauss(rng);
    const VelocityField pv = leray_project(g, bc, v, 1e-13);
    CHECK(max_divergence(g, pv) < 1e-10);
    const VelocityField ppv = leray_project(g, bc, pv, 1e-13);
    CHECK(l2_norm(g, ppv - pv) < 1e-10 * std::max(1.0, l2_norm(g, pv)));
}

TEST_CASE("advance_step matches solve_forward's first level") {
    const Grid g = build_grid(1.0, 1.0, 12, 12);
    ProblemConfig cfg = basic_config(g, BcSpec::navier_slip(10.0, BoundaryData::zero(g)), 0.1,
                                     5, 0.1);
    cfg.initial = taylor_vortex(g, 0.5);
    auto [u1, p1] = advance_step(cfg.initial, PressureField::zeros(g), cfg,
                                 ControlField::zeros(g));
    const StateTrajectory traj = solve_forward(cfg, {});
    CHECK(l2_norm(g, u1 - traj.u[1]) < 1e-12);
}

TEST_CASE("config validation rejects bad data") {
    const Grid g = build_grid(1.0, 1.0, 8, 8);
    ProblemConfig cfg = basic_config(g, BcSpec::dirichlet(BoundaryData::zero(g)), 0.1, 5, 1.0);
    SUBCASE("non-divergence-free initial condition") {
        cfg.initial.ux[g.ux_idx(4, 4)] = 1.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("nonzero normal trace") {
        cfg.initial.uy[g.uy_idx(4, 0)] = 1.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("non-positive cost weight") {
        cfg.cost_weight = 0.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("slip alpha below the friction bound") {
        cfg.bc = BcSpec{BcKind::NavierSlip, 0.5, BoundaryData::zero(g)};
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}
