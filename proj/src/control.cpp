#include "nsopt/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsopt {

void AdmissibleSet::validate() const {
    if (kind == Kind::Ball && !(radius > 0))
        throw std::invalid_argument("set.radius: ball radius must be positive");
    if (kind == Kind::Box && !(lower <= upper))
        throw std::invalid_argument("set.bounds: box requires lower <= upper");
}

namespace {

ControlTrajectory zeros_like(const Grid& g, int nt) {
    return ControlTrajectory(nt, ControlField::zeros(g));
}

ControlTrajectory axpy(double a, const ControlTrajectory& x, const ControlTrajectory& y) {
    ControlTrajectory r = y;
    for (size_t n = 0; n < r.size(); ++n) {
        for (size_t k = 0; k < r[n].fx.size(); ++k) r[n].fx[k] += a * x[n].fx[k];
        for (size_t k = 0; k < r[n].fy.size(); ++k) r[n].fy[k] += a * x[n].fy[k];
    }
    return r;
}

} // namespace

CostValue evaluate_cost_terms(const Grid& g, const ControlMask& mask, double dt,
                              const StateTrajectory& state, const ControlTrajectory& f,
                              const CostConfig& cost) {
    if (state.u.empty()) throw std::invalid_argument("evaluate_cost: empty state trajectory");
    const size_t levels = state.u.size();
    if (!cost.target.empty() && cost.target.size() != levels)
        throw std::invalid_argument("evaluate_cost: target and state lengths differ");
    if (!f.empty() && f.size() + 1 != levels)
        throw std::invalid_argument("evaluate_cost: control and state time grids differ");

    CostValue v;
    for (size_t n = 1; n < levels; ++n) {
        const VelocityField diff =
            cost.target.empty() ? state.u[n] : state.u[n] - cost.target[n];
        v.fidelity += 0.5 * dt * l2_inner(g, diff, diff);
    }
    if (!f.empty())
        for (const auto& fn : f) v.penalty += 0.5 * cost.M * dt * control_l2_inner(g, mask, fn, fn);
    v.total = v.fidelity + v.penalty;
    return v;
}

double evaluate_cost(const Grid& g, const ControlMask& mask, double dt,
                     const StateTrajectory& state, const ControlTrajectory& f,
                     const CostConfig& cost) {
    return evaluate_cost_terms(g, mask, dt, state, f, cost).total;
}

ControlTrajectory project(const Grid& g, const ControlMask& mask, double dt,
                          const ControlTrajectory& candidate, const AdmissibleSet& set) {
    set.validate();
    ControlTrajectory out = candidate;
    for (auto& fn : out) restrict_to_mask(mask, fn);

    switch (set.kind) {
        case AdmissibleSet::Kind::Unconstrained:
            return out;
        case AdmissibleSet::Kind::Box:
            for (auto& fn : out) {
                for (size_t k = 0; k < fn.fx.size(); ++k)
                    if (mask.wx[k] > 0) fn.fx[k] = std::clamp(fn.fx[k], set.lower, set.upper);
                for (size_t k = 0; k < fn.fy.size(); ++k)
                    if (mask.wy[k] > 0) fn.fy[k] = std::clamp(fn.fy[k], set.lower, set.upper);
            }
            return out;
        case AdmissibleSet::Kind::Ball: {
            const ControlTrajectory& c =
                set.center.empty() ? zeros_like(g, static_cast<int>(out.size())) : set.center;
            if (c.size() != out.size())
                throw std::invalid_argument("project: ball centre time grid mismatch");
            ControlTrajectory d = axpy(-1.0, c, out);
            const double nrm = control_spacetime_norm(g, mask, dt, d);
            // the ulp guard keeps re-projection of a shell point exact
            if (nrm <= set.radius * (1.0 + 8e-16) || nrm == 0.0) {
                return out;
            }
            const double scale = set.radius / nrm;
            ControlTrajectory r = c;
            for (size_t n = 0; n < r.size(); ++n) {
                for (size_t k = 0; k < r[n].fx.size(); ++k) r[n].fx[k] += scale * d[n].fx[k];
                for (size_t k = 0; k < r[n].fy.size(); ++k) r[n].fy[k] += scale * d[n].fy[k];
            }
            return r;
        }
    }
    return out;
}

double stationarity_residual(const Grid& g, const ControlMask& mask, double dt,
                             const ControlTrajectory& f, const ControlTrajectory& grad,
                             const AdmissibleSet& set) {
    const ControlTrajectory moved = axpy(-1.0, grad, f);
    const ControlTrajectory proj = project(g, mask, dt, moved, set);
    const ControlTrajectory diff = axpy(-1.0, proj, f);
    return control_spacetime_norm(g, mask, dt, diff);
}

OptimizationResult optimize(const ProblemConfig& cfg, const AdmissibleSet& set,
                            const OptimizerOptions& opts) {
    cfg.validate();
    set.validate();
    const Grid& g = cfg.grid;
    const int nt = cfg.time.nt;
    const double dt = cfg.time.dt();
    const double M = cfg.cost_weight;
    CostConfig cost{M, cfg.target};

    OptimizationResult res;
    // start from the ball centre (the reference control), otherwise zero;
    // a warm-start iterate overrides either
    ControlTrajectory f;
    if (!opts.start.empty()) {
        if (opts.start.size() != static_cast<size_t>(nt))
            throw std::invalid_argument("optimize: warm-start control has the wrong length");
        f = opts.start;
    } else if (set.kind == AdmissibleSet::Kind::Ball && !set.center.empty()) {
        f = set.center;
    } else {
        f = zeros_like(g, nt);
    }
    f = project(g, cfg.mask, dt, f, set);

    StateTrajectory state = solve_forward(cfg, f);
    CostValue J = evaluate_cost_terms(g, cfg.mask, dt, state, f, cost);

    const double step0 = opts.step0 > 0 ? opts.step0 : 1.0 / M;
    double step = step0;
    double last_step = 0;
    int last_backtracks = 0;

    for (int iter = 0;; ++iter) {
        res.adjoint = solve_adjoint(state, cfg);
        const ControlTrajectory grad = cost_gradient(res.adjoint, f, M, cfg.mask);
        const double resid = stationarity_residual(g, cfg.mask, dt, f, grad, set);
        // fixed point of the projected optimality map P(-(1/M) phi) = P(f - grad/M)
        ControlTrajectory scaled = f;
        for (size_t n = 0; n < scaled.size(); ++n) {
            for (size_t k = 0; k < scaled[n].fx.size(); ++k)
                scaled[n].fx[k] -= grad[n].fx[k] / M;
            for (size_t k = 0; k < scaled[n].fy.size(); ++k)
                scaled[n].fy[k] -= grad[n].fy[k] / M;
        }
        const ControlTrajectory fp = project(g, cfg.mask, dt, scaled, set);
        const double fp_resid = control_spacetime_norm(g, cfg.mask, dt, axpy(-1.0, fp, f));

        res.history.push_back(
            {iter, J.total, J.fidelity, J.penalty, resid, last_step, last_backtracks});
        res.stationarity = resid;
        res.fixed_point_residual = fp_resid;

        if (resid <= opts.tol && fp_resid <= 10 * opts.tol) {
            res.converged = true;
            res.message = "converged";
            break;
        }
        if (iter >= opts.max_iter) {
            res.message = "iteration cap reached";
            break;
        }

        // Armijo backtracking on the projected step
        bool accepted = false;
        int backtracks = 0;
        double s = step;
        while (backtracks <= opts.max_backtracks) {
            const ControlTrajectory trial =
                project(g, cfg.mask, dt, axpy(-s, grad, f), set);
            const ControlTrajectory diff = axpy(-1.0, trial, f);
            const double move = control_spacetime_norm(g, cfg.mask, dt, diff);
            if (move == 0.0) break; // projection pinned: no descent direction in the set
            StateTrajectory trial_state = solve_forward(cfg, trial);
            const CostValue trial_J = evaluate_cost_terms(g, cfg.mask, dt, trial_state, trial, cost);
            if (trial_J.total <= J.total - (opts.armijo_sigma / s) * move * move) {
                f = trial;
                state = std::move(trial_state);
                J = trial_J;
                accepted = true;
                break;
            }
            s *= opts.backtrack;
            ++backtracks;
        }
        if (!accepted) {
            res.message = "line search failed after " + std::to_string(backtracks) +
                          " backtracks (stationarity " + std::to_string(resid) + ")";
            break;
        }
        last_step = s;
        last_backtracks = backtracks;
        // next iteration resumes from the accepted step; growth is capped at
        // the initial step so the iteration cannot park on the 2/L orbit
        step = std::min(s / opts.backtrack, step0);
    }

    res.f = f;
    res.J = J.total;
    res.state = std::move(state);
    return res;
}

ControlTrajectory sample_admissible(const Grid& g, const ControlMask& mask, double dt, int nt,
                                    const AdmissibleSet& set, std::mt19937_64& rng) {
    set.validate();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ControlTrajectory out = ControlTrajectory(nt, ControlField::zeros(g));

    switch (set.kind) {
        case AdmissibleSet::Kind::Box:
            for (auto& fn : out) {
                for (size_t k = 0; k < fn.fx.size(); ++k)
                    if (mask.wx[k] > 0) fn.fx[k] = set.lower + (set.upper - set.lower) * unif(rng);
                for (size_t k = 0; k < fn.fy.size(); ++k)
                    if (mask.wy[k] > 0) fn.fy[k] = set.lower + (set.upper - set.lower) * unif(rng);
            }
            return out;
        case AdmissibleSet::Kind::Unconstrained:
        case AdmissibleSet::Kind::Ball: {
            for (auto& fn : out) {
                for (size_t k = 0; k < fn.fx.size(); ++k)
                    if (mask.wx[k] > 0) fn.fx[k] = gauss(rng);
                for (size_t k = 0; k < fn.fy.size(); ++k)
                    if (mask.wy[k] > 0) fn.fy[k] = gauss(rng);
            }
            if (set.kind == AdmissibleSet::Kind::Unconstrained) return out;
            const double nrm = control_spacetime_norm(g, mask, dt, out);
            const double r = set.radius * std::sqrt(unif(rng)); // bias towards the shell
            const double scale = nrm > 0 ? r / nrm : 0.0;
            ControlTrajectory c = set.center.empty() ? ControlTrajectory(nt, ControlField::zeros(g))
                                                     : set.center;
            for (size_t n = 0; n < c.size(); ++n) {
                for (size_t k = 0; k < c[n].fx.size(); ++k) c[n].fx[k] += scale * out[n].fx[k];
                for (size_t k = 0; k < c[n].fy.size(); ++k) c[n].fy[k] += scale * out[n].fy[k];
            }
            return c;
        }
    }
    return out;
}

double vi_lhs(const Grid& g, const ControlMask& mask, double dt, const ControlTrajectory& f,
              const ControlTrajectory& grad_at_f, const ControlTrajectory& g_test) {
    const ControlTrajectory dir = axpy(-1.0, f, g_test); // g - f
    return control_spacetime_inner(g, mask, dt, dir, grad_at_f);
}

} // namespace nsopt
