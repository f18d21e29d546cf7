#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsopt/control.hpp"

namespace nsopt {

/// One friction value of the asymptotic experiment: distances of the slip
/// optimum to the Dirichlet reference plus the sqrt(alpha)-weighted
/// boundary traces of state and adjoint.
struct SweepRow {
    double alpha = 0;
    double f_err = 0;      ///< || f_alpha - f_ref ||_{L2(L2(omega))}
    double u_err = 0;      ///< || u_alpha - u_ref ||_{L2(L2)}
    double trace_u = 0;    ///< sqrt(alpha) || (u_alpha - b)_tau ||_{L2(L2(bdry))}
    double phi_err = 0;    ///< || phi_alpha - phi_ref ||_{L2(L2)}
    double trace_phi = 0;  ///< sqrt(alpha) || phi_alpha ||_{L2(L2(bdry))}
    double J_alpha = 0;
    bool converged = false;
    int iters = 0;
    double residual = 0;
    std::string note;
};

struct SweepReport {
    std::vector<SweepRow> rows; ///< sorted by increasing alpha
    double J_ref = 0;
    // least-squares slopes of log(metric) against log(alpha)
    double slope_f = 0, slope_u = 0, slope_trace_u = 0;
    double slope_phi = 0, slope_trace_phi = 0, slope_dJ = 0;
};

struct SweepOptions {
    bool warm_start = true; ///< start each alpha from the previous optimum
    int parallel = 1;       ///< rows solved concurrently when warm_start is off
};

/// Least-squares slope of log(y) vs log(x); non-positive entries are skipped.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Optimal control problem under the Dirichlet condition; the returned
/// adjoint belongs to the optimum.
std::pair<OptimizationResult, AdjointTrajectory> dirichlet_reference(
    const ProblemConfig& cfg, const AdmissibleSet& set, const OptimizerOptions& opts);

/// For each alpha (strictly increasing): optimize under Navier slip and
/// tabulate all convergence metrics against the Dirichlet reference.
/// Per-alpha failures are flagged in the row, the sweep continues.
SweepReport run_alpha_sweep(const ProblemConfig& base, const AdmissibleSet& set,
                            const std::vector<double>& alphas, const OptimizerOptions& opts,
                            const SweepOptions& sopts = {});

} // namespace nsopt
