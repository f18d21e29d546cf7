#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsopt/config.hpp"
#include "nsopt/control.hpp"
#include "nsopt/sweep.hpp"

namespace nsopt {

/// %.17g rendering; CSV outputs are byte-reproducible for identical runs.
std::string num(double v);

void ensure_dir(const std::string& path);

/// Field dump: `# component,nx,ny,hx,hy` header, then one CSV row per grid
/// line of each component (ux rows j = 0..ny+1, uy rows j = 0..ny,
/// p rows j = 0..ny-1).
void dump_velocity_csv(const std::string& path, const Grid& g, const VelocityField& u);
void dump_pressure_csv(const std::string& path, const Grid& g, const PressureField& p);

/// Run manifest: config echo, solver tolerances, one row per step with the
/// linear residual and max divergence. The generated-at comment line is the
/// only non-reproducible line.
void write_run_manifest(const std::string& path, const KeyFile& raw, double solver_tol,
                        const StateTrajectory& traj);

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history);

void write_sweep_csv(const std::string& path, const SweepReport& rep);

struct GradCheckRow {
    int direction = 0;
    double eps = 0;
    double fd_value = 0;
    double adjoint_value = 0;
    double rel_error = 0;
    double duality_error = 0;
};
void write_gradcheck_csv(const std::string& path, const std::vector<GradCheckRow>& rows);

/// Minimal static log-log SVG: one polyline per series with markers, decade
/// grid, and per-series least-squares slope annotation.
void svg_loglog(const std::string& path, const std::string& title,
                const std::vector<double>& xs,
                const std::vector<std::pair<std::string, std::vector<double>>>& series);

} // namespace nsopt
