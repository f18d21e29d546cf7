#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nsopt/adjoint.hpp"
#include "nsopt/forward.hpp"

namespace nsopt {

/// Closed convex admissible set of controls: the whole space, a ball in
/// L2(0,T;L2(omega)) around a reference control, or pointwise bounds.
struct AdmissibleSet {
    enum class Kind { Unconstrained, Ball, Box };
    Kind kind = Kind::Unconstrained;
    ControlTrajectory center;  ///< Ball centre f_hat (empty means zero)
    double radius = 0;         ///< Ball radius, > 0
    double lower = 0, upper = 0;

    static AdmissibleSet unconstrained() { return {}; }
    static AdmissibleSet ball(ControlTrajectory c, double r) {
        AdmissibleSet s;
        s.kind = Kind::Ball;
        s.center = std::move(c);
        s.radius = r;
        return s;
    }
    static AdmissibleSet box(double lo, double hi) {
        AdmissibleSet s;
        s.kind = Kind::Box;
        s.lower = lo;
        s.upper = hi;
        return s;
    }
    void validate() const;
};

struct CostConfig {
    double M = 1.0;
    std::vector<VelocityField> target; ///< levels 0..nt; empty means zero target
};

struct CostValue {
    double total = 0;
    double fidelity = 0; ///< 1/2 int |u - z_d|^2
    double penalty = 0;  ///< M/2 int_omega |f|^2
};

CostValue evaluate_cost_terms(const Grid& g, const ControlMask& mask, double dt,
                              const StateTrajectory& state, const ControlTrajectory& f,
                              const CostConfig& cost);
double evaluate_cost(const Grid& g, const ControlMask& mask, double dt,
                     const StateTrajectory& state, const ControlTrajectory& f,
                     const CostConfig& cost);

/// Metric projection onto the admissible set (space-time L2(omega) norm for
/// the ball, pointwise clamp for the box). Idempotent and nonexpansive.
ControlTrajectory project(const Grid& g, const ControlMask& mask, double dt,
                          const ControlTrajectory& candidate, const AdmissibleSet& set);

/// || f - P(f - grad) ||; zero iff the discrete variational inequality holds.
double stationarity_residual(const Grid& g, const ControlMask& mask, double dt,
                             const ControlTrajectory& f, const ControlTrajectory& grad,
                             const AdmissibleSet& set);

struct OptimizerOptions {
    double step0 = -1;        ///< initial step; defaults to 1/M
    double armijo_sigma = 1e-4;
    double backtrack = 0.5;
    double tol = 1e-8;        ///< stationarity tolerance
    int max_iter = 200;
    int max_backtracks = 45;
    bool verbose = false;
    ControlTrajectory start;  ///< warm start iterate; empty = ball centre / zero
};

struct IterationRecord {
    int iter = 0;
    double J = 0, fidelity = 0, penalty = 0;
    double residual = 0;   ///< stationarity residual at this iterate
    double step = 0;       ///< step size that produced this iterate (0 for the start)
    int backtracks = 0;
};

struct OptimizationResult {
    ControlTrajectory f;
    double J = 0;
    std::vector<IterationRecord> history;
    bool converged = false;
    std::string message;
    StateTrajectory state;
    AdjointTrajectory adjoint;
    double stationarity = 0;
    double fixed_point_residual = 0; ///< || f - P(-(1/M) phi|_omega) ||
};

/// Projected gradient with Armijo backtracking on J. The start iterate is
/// the ball centre (or zero); accepted steps satisfy
/// J(f+) <= J(f) - (sigma/s)||f+ - f||^2. Stops on the stationarity
/// residual (plus the fixed-point residual guard) or the iteration cap.
OptimizationResult optimize(const ProblemConfig& cfg, const AdmissibleSet& set,
                            const OptimizerOptions& opts);

/// Uniform random element of the admissible set (for sampled variational
/// inequality checks); deterministic under the given generator.
ControlTrajectory sample_admissible(const Grid& g, const ControlMask& mask, double dt, int nt,
                                    const AdmissibleSet& set, std::mt19937_64& rng);

/// Discrete left-hand side of the first-order variational inequality:
/// <g - f, phi|_omega + M f> over space-time.
double vi_lhs(const Grid& g, const ControlMask& mask, double dt, const ControlTrajectory& f,
              const ControlTrajectory& grad_at_f, const ControlTrajectory& g_test);

} // namespace nsopt
