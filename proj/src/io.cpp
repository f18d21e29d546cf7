#include "nsopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace nsopt {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + path + "'");
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

void dump_velocity_csv(const std::string& path, const Grid& g, const VelocityField& u) {
    std::ofstream out = open_out(path);
    out << "# component,nx,ny,hx,hy\n";
    out << "ux," << g.nx << "," << g.ny << "," << num(g.hx) << "," << num(g.hy) << "\n";
    for (int j = 0; j <= g.ny + 1; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            if (i) out << ",";
            out << num(u.ux[g.ux_idx(i, j)]);
        }
        out << "\n";
    }
    out << "uy," << g.nx << "," << g.ny << "," << num(g.hx) << "," << num(g.hy) << "\n";
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx + 1; ++i) {
            if (i) out << ",";
            out << num(u.uy[g.uy_idx(i, j)]);
        }
        out << "\n";
    }
}

void dump_pressure_csv(const std::string& path, const Grid& g, const PressureField& p) {
    std::ofstream out = open_out(path);
    out << "# component,nx,ny,hx,hy\n";
    out << "p," << g.nx << "," << g.ny << "," << num(g.hx) << "," << num(g.hy) << "\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out << ",";
            out << num(p.p[g.p_idx(i, j)]);
        }
        out << "\n";
    }
}

void write_run_manifest(const std::string& path, const KeyFile& raw, double solver_tol,
                        const StateTrajectory& traj) {
    std::ofstream out = open_out(path);
    std::time_t t = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    out << "# generated," << stamp << "\n"; // excluded from byte comparisons
    out << "section,key,value\n";
    for (const auto& [k, v] : raw.ordered) out << "config," << k << "," << v << "\n";
    out << "solver,tol," << num(solver_tol) << "\n";
    out << "step,residual,max_divergence\n";
    for (size_t n = 0; n < traj.step_residuals.size(); ++n)
        out << (n + 1) << "," << num(traj.step_residuals[n]) << ","
            << num(traj.step_divergence[n]) << "\n";
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history) {
    std::ofstream out = open_out(path);
    out << "iter,J,fidelity,control_term,stationarity,step,backtracks\n";
    for (const auto& r : history)
        out << r.iter << "," << num(r.J) << "," << num(r.fidelity) << "," << num(r.penalty)
            << "," << num(r.residual) << "," << num(r.step) << "," << r.backtracks << "\n";
}

void write_sweep_csv(const std::string& path, const SweepReport& rep) {
    std::ofstream out = open_out(path);
    out << "alpha,f_err,u_err,sqrt_alpha_trace_u,phi_err,sqrt_alpha_trace_phi,J_alpha,J_ref,"
           "converged,iters,residual,note\n";
    for (const auto& r : rep.rows)
        out << num(r.alpha) << "," << num(r.f_err) << "," << num(r.u_err) << ","
            << num(r.trace_u) << "," << num(r.phi_err) << "," << num(r.trace_phi) << ","
            << num(r.J_alpha) << "," << num(rep.J_ref) << "," << (r.converged ? 1 : 0) << ","
            << r.iters << "," << num(r.residual) << "," << r.note << "\n";
    out << "# slopes,f_err," << num(rep.slope_f) << ",u_err," << num(rep.slope_u)
        << ",trace_u," << num(rep.slope_trace_u) << ",phi_err," << num(rep.slope_phi)
        << ",trace_phi," << num(rep.slope_trace_phi) << ",dJ," << num(rep.slope_dJ) << "\n";
}

void write_gradcheck_csv(const std::string& path, const std::vector<GradCheckRow>& rows) {
    std::ofstream out = open_out(path);
    out << "direction,eps,fd_value,adjoint_value,rel_error,duality_error\n";
    for (const auto& r : rows)
        out << r.direction << "," << num(r.eps) << "," << num(r.fd_value) << ","
            << num(r.adjoint_value) << "," << num(r.rel_error) << "," << num(r.duality_error)
            << "\n";
}

void svg_loglog(const std::string& path, const std::string& title,
                const std::vector<double>& xs,
                const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const int W = 720, H = 520;
    const int ml = 70, mr = 180, mt = 50, mb = 60;
    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    for (double x : xs)
        if (x > 0) {
            lx0 = std::min(lx0, std::log10(x));
            lx1 = std::max(lx1, std::log10(x));
        }
    for (const auto& [name, ys] : series)
        for (double y : ys)
            if (y > 0 && std::isfinite(y)) {
                ly0 = std::min(ly0, std::log10(y));
                ly1 = std::max(ly1, std::log10(y));
            }
    if (!(lx1 > lx0)) lx1 = lx0 + 1;
    if (!(ly1 > ly0)) {
        ly0 = (ly0 > 1e299 ? 0.0 : ly0) - 1;
        ly1 = ly0 + 2;
    }
    auto X = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto Y = [&](double y) {
        return H - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (H - mt - mb);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ofstream out = open_out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // decade grid
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
        const double px = X(std::pow(10.0, d));
        out << "<line x1='" << px << "' y1='" << mt << "' x2='" << px << "' y2='" << H - mb
            << "' stroke='#dddddd'/>\n";
        out << "<text x='" << px << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11'>1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
        const double py = Y(std::pow(10.0, d));
        out << "<line x1='" << ml << "' y1='" << py << "' x2='" << W - mr << "' y2='" << py
            << "' stroke='#dddddd'/>\n";
        out << "<text x='" << ml - 8 << "' y='" << py + 4
            << "' text-anchor='end' font-size='11'>1e" << d << "</text>\n";
    }
    out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 16
        << "' text-anchor='middle' font-size='12'>alpha</text>\n";

    int ci = 0;
    for (const auto& [name, ys] : series) {
        const char* col = colors[ci % 6];
        std::string pts;
        std::vector<double> fx, fy;
        for (size_t k = 0; k < xs.size() && k < ys.size(); ++k) {
            if (!(xs[k] > 0) || !(ys[k] > 0) || !std::isfinite(ys[k])) continue;
            pts += num(X(xs[k])) + "," + num(Y(ys[k])) + " ";
            fx.push_back(xs[k]);
            fy.push_back(ys[k]);
        }
        out << "<polyline points='" << pts << "' fill='none' stroke='" << col
            << "' stroke-width='1.5'/>\n";
        for (size_t k = 0; k < xs.size() && k < ys.size(); ++k) {
            if (!(xs[k] > 0) || !(ys[k] > 0) || !std::isfinite(ys[k])) continue;
            out << "<circle cx='" << num(X(xs[k])) << "' cy='" << num(Y(ys[k]))
                << "' r='3' fill='" << col << "'/>\n";
        }
        const double slope = fit_loglog_slope(fx, fy);
        char lab[160];
        std::snprintf(lab, sizeof(lab), "%s (slope %.3f)", name.c_str(), slope);
        out << "<text x='" << W - mr + 10 << "' y='" << mt + 18 * (ci + 1)
            << "' font-size='12' fill='" << col << "'>" << lab << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

} // namespace nsopt
