#include "nsopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nsopt/presets.hpp"

namespace nsopt {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
}

// "name" or "name:arg1,arg2": preset reference with numeric arguments
struct PresetRef {
    std::string name;
    std::vector<double> args;
};

PresetRef parse_preset(const std::string& key, const std::string& raw) {
    PresetRef p;
    const auto colon = raw.find(':');
    p.name = trim(colon == std::string::npos ? raw : raw.substr(0, colon));
    if (colon != std::string::npos) {
        std::stringstream ss(raw.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                bad_key(key, "malformed numeric argument '" + tok + "'");
            p.args.push_back(v);
        }
    }
    return p;
}

double arg_or(const PresetRef& p, size_t k, double fallback) {
    return k < p.args.size() ? p.args[k] : fallback;
}

} // namespace

std::string KeyFile::get(const std::string& key, const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double KeyFile::get_double(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') bad_key(key, "expected a number, got '" + it->second + "'");
    return v;
}

int KeyFile::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) bad_key(key, "expected an integer");
    return i;
}

bool KeyFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_key(key, "expected a boolean, got '" + it->second + "'");
}

std::vector<double> KeyFile::get_doubles(const std::string& key) const {
    std::vector<double> out;
    const auto it = values.find(key);
    if (it == values.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') bad_key(key, "malformed list entry '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

KeyFile parse_key_text(const std::string& text) {
    KeyFile kf;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key =
            (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        kf.values[key] = value;
        kf.ordered.emplace_back(key, value);
    }
    return kf;
}

KeyFile parse_key_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_text(ss.str());
}

RunSetup realize_setup(const KeyFile& kf) {
    RunSetup s;
    s.raw = kf;

    // grid
    const double Lx = kf.get_double("grid.Lx", 1.0);
    const double Ly = kf.get_double("grid.Ly", 1.0);
    const int nx = kf.get_int("grid.nx", 32);
    const int ny = kf.get_int("grid.ny", 32);
    const bool periodic = kf.get_bool("grid.periodic_x", false);
    Grid grid = build_grid(Lx, Ly, nx, ny, periodic);

    // time
    TimeGrid time;
    time.T = kf.get_double("time.T", 0.5);
    time.nt = kf.get_int("time.nt", 25);
    if (!(time.T > 0)) bad_key("time.T", "horizon must be positive");
    if (time.nt < 1) bad_key("time.nt", "need at least one step");

    // boundary condition
    const std::string bkind = kf.get("bc.kind", "dirichlet");
    const PresetRef bref = parse_preset("bc.b", kf.get("bc.b", "zero"));
    BoundaryData bdata = BoundaryData::zero(grid);
    if (bref.name == "zero") {
    } else if (bref.name == "constant") {
        bdata = BoundaryData::constant(grid, arg_or(bref, 0, 0.0));
    } else {
        bad_key("bc.b", "unknown preset '" + bref.name + "' (zero|constant:<v>)");
    }
    BcSpec bc;
    if (bkind == "dirichlet") {
        bc = BcSpec::dirichlet(bdata);
    } else if (bkind == "slip") {
        bc = BcSpec::navier_slip(kf.get_double("bc.alpha", 100.0), bdata);
    } else {
        bad_key("bc.kind", "expected dirichlet or slip, got '" + bkind + "'");
    }

    // fluid and cost
    FluidParams fluid;
    fluid.mu = kf.get_double("fluid.mu", 1.0);
    if (!(fluid.mu > 0)) bad_key("fluid.mu", "viscosity must be positive");
    const double M = kf.get_double("cost.M", 1.0);
    if (!(M > 0)) bad_key("cost.M", "weight must be positive");

    // control region
    const auto om = kf.get_doubles("control.omega");
    double ox0 = 0.25 * Lx, oy0 = 0.25 * Ly, ox1 = 0.75 * Lx, oy1 = 0.75 * Ly;
    if (!om.empty()) {
        if (om.size() != 4) bad_key("control.omega", "expected x0,y0,x1,y1");
        ox0 = om[0];
        oy0 = om[1];
        ox1 = om[2];
        oy1 = om[3];
    }
    ControlMask mask;
    try {
        mask = build_control_mask(grid, ox0, oy0, ox1, oy1);
    } catch (const std::invalid_argument& e) {
        bad_key("control.omega", e.what());
    }

    // solver
    const std::string skind = kf.get("solver.kind", "auto");
    SolverKind solver;
    if (skind == "auto") solver = SolverKind::Auto;
    else if (skind == "direct") solver = SolverKind::Direct;
    else if (skind == "bicgstab") solver = SolverKind::BiCgStab;
    else bad_key("solver.kind", "expected auto|direct|bicgstab");
    const double stol = kf.get_double("solver.tol", 1e-10);
    if (!(stol > 0)) bad_key("solver.tol", "tolerance must be positive");

    // body force
    const PresetRef fref = parse_preset("force.body", kf.get("force.body", "zero"));
    VelocityField body = VelocityField::zeros(grid);
    if (fref.name == "zero") {
    } else if (fref.name == "constant") {
        body = constant_force(grid, arg_or(fref, 0, 0.0), arg_or(fref, 1, 0.0));
    } else {
        bad_key("force.body", "unknown preset '" + fref.name + "' (zero|constant:gx,gy)");
    }

    // initial condition
    const PresetRef aref = parse_preset("initial.a", kf.get("initial.a", "zero"));
    VelocityField a = VelocityField::zeros(grid);
    if (aref.name == "zero") {
    } else if (aref.name == "taylor-vortex") {
        a = taylor_vortex(grid, arg_or(aref, 0, 1.0));
    } else if (aref.name == "double-vortex") {
        a = double_vortex(grid, arg_or(aref, 0, 1.0));
    } else if (aref.name == "poiseuille-steady") {
        // discrete steady no-slip channel state under the configured force
        auto [us, ps] = solve_steady_stokes(grid, BcSpec::dirichlet(bdata), fluid.mu, body,
                                            std::min(stol, 1e-12), solver);
        a = us;
    } else {
        bad_key("initial.a",
                "unknown preset '" + aref.name + "' (zero|taylor-vortex|double-vortex|poiseuille-steady)");
    }
    if (kf.get_bool("initial.project", true) && aref.name != "zero" &&
        aref.name != "poiseuille-steady")
        a = leray_project(grid, bc, a, std::min(stol, 1e-12), solver);

    // assemble the problem (target filled below; recording needs the problem)
    s.problem.grid = grid;
    s.problem.time = time;
    s.problem.bc = bc;
    s.problem.fluid = fluid;
    s.problem.initial = a;
    s.problem.mask = mask;
    s.problem.cost_weight = M;
    s.problem.body_force = body;
    s.problem.solver_tol = stol;
    s.problem.solver = solver;
    s.problem.theta = kf.get_double("time.theta", 1.0);

    // target
    const PresetRef zref = parse_preset("target.zd", kf.get("target.zd", "zero"));
    if (zref.name == "zero") {
        s.problem.target.clear();
    } else if (zref.name == "record") {
        const PresetRef cref =
            parse_preset("target.record_control", kf.get("target.record_control", "zero"));
        ControlTrajectory fstar;
        if (cref.name == "zero") {
        } else if (cref.name == "constant") {
            fstar = constant_control(grid, mask, time.nt, arg_or(cref, 0, 0.0), arg_or(cref, 1, 0.0));
        } else if (cref.name == "bump") {
            fstar = bump_control(grid, mask, time, arg_or(cref, 0, 1.0), arg_or(cref, 1, 0.0));
        } else {
            bad_key("target.record_control", "unknown preset '" + cref.name + "'");
        }
        const std::string rbc = kf.get("target.record_bc", "dirichlet");
        ProblemConfig rec = s.problem;
        if (rbc == "dirichlet") rec.bc = BcSpec::dirichlet(bdata);
        else if (rbc == "same") rec.bc = bc;
        else bad_key("target.record_bc", "expected dirichlet or same");
        s.problem.target = record_target(rec, fstar);
    } else {
        bad_key("target.zd", "unknown preset '" + zref.name + "' (zero|record)");
    }

    // admissible set
    const std::string setkind = kf.get("set.kind", "free");
    if (setkind == "free") {
        s.set = AdmissibleSet::unconstrained();
    } else if (setkind == "ball") {
        const double radius = kf.get_double("set.radius", 1.0);
        const PresetRef ctr = parse_preset("set.center", kf.get("set.center", "zero"));
        ControlTrajectory center;
        if (ctr.name == "zero") {
        } else if (ctr.name == "constant") {
            center = constant_control(grid, mask, time.nt, arg_or(ctr, 0, 0.0), arg_or(ctr, 1, 0.0));
        } else {
            bad_key("set.center", "unknown preset '" + ctr.name + "'");
        }
        s.set = AdmissibleSet::ball(std::move(center), radius);
    } else if (setkind == "box") {
        s.set = AdmissibleSet::box(kf.get_double("set.lower", -1.0), kf.get_double("set.upper", 1.0));
    } else {
        bad_key("set.kind", "expected free|ball|box");
    }
    try {
        s.set.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what())); // already key-named
    }

    // optimizer
    s.opt.step0 = kf.get_double("opt.step0", -1.0);
    s.opt.armijo_sigma = kf.get_double("opt.sigma", 1e-4);
    s.opt.backtrack = kf.get_double("opt.backtrack", 0.5);
    s.opt.tol = kf.get_double("opt.tol", 1e-8);
    s.opt.max_iter = kf.get_int("opt.max_iter", 200);
    if (!(s.opt.armijo_sigma > 0 && s.opt.armijo_sigma < 1))
        bad_key("opt.sigma", "Armijo factor must lie in (0,1)");
    if (!(s.opt.backtrack > 0 && s.opt.backtrack < 1))
        bad_key("opt.backtrack", "backtracking ratio must lie in (0,1)");
    if (!(s.opt.tol > 0)) bad_key("opt.tol", "tolerance must be positive");

    // sweep
    s.alphas = kf.get_doubles("sweep.alphas");
    if (s.alphas.empty())
        s.alphas = {10.0, 31.6, 100.0, 316.0, 1000.0, 3160.0, 10000.0};
    s.sweep.warm_start = kf.get_bool("sweep.warm_start", true);
    s.sweep.parallel = kf.get_int("sweep.parallel", 1);

    // outputs
    s.out_dir = kf.get("output.dir", "out");
    s.checkpoint_every = kf.get_int("output.checkpoint_every", 0);

    // full validation of the assembled problem with config-key wording
    try {
        s.problem.validate();
    } catch (const std::invalid_argument&) {
        throw;
    }
    return s;
}

RunSetup load_run_setup(const std::string& path) { return realize_setup(parse_key_file(path)); }

void override_bc(RunSetup& setup, const std::string& kind, double alpha) {
    BoundaryData bd = setup.problem.bc.b;
    if (kind == "dirichlet") {
        setup.problem.bc = BcSpec::dirichlet(bd);
    } else if (kind == "slip") {
        const double a = alpha > 0 ? alpha : setup.problem.bc.alpha;
        setup.problem.bc = BcSpec::navier_slip(a, bd);
    } else if (!kind.empty()) {
        throw std::invalid_argument("--bc: expected dirichlet or slip, got '" + kind + "'");
    } else if (alpha > 0) {
        if (setup.problem.bc.kind == BcKind::NavierSlip)
            setup.problem.bc = BcSpec::navier_slip(alpha, bd);
        else
            throw std::invalid_argument("--alpha: only meaningful for the slip condition");
    }
    setup.problem.bc.validate(setup.problem.grid);
}

} // namespace nsopt
