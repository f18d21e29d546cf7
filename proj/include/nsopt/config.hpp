#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nsopt/control.hpp"
#include "nsopt/sweep.hpp"

namespace nsopt {

/// Flat key-value view of a config file: "section.key" -> raw string.
/// Syntax: `[section]` headers, `key = value` lines, `#` comments.
struct KeyFile {
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, std::string>> ordered; ///< file order, for the manifest

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const; ///< comma separated
};

KeyFile parse_key_file(const std::string& path);
KeyFile parse_key_text(const std::string& text);

/// Fully realized run: problem data, admissible set, optimizer and sweep
/// parameters, output location. All module preconditions are validated at
/// load; violations throw std::invalid_argument naming the config key.
struct RunSetup {
    ProblemConfig problem;
    AdmissibleSet set;
    OptimizerOptions opt;
    std::vector<double> alphas;
    SweepOptions sweep;
    std::string out_dir = "out";
    int checkpoint_every = 0;
    KeyFile raw;
};

RunSetup load_run_setup(const std::string& path);
RunSetup realize_setup(const KeyFile& kf);

/// Command-line overrides take precedence over config keys.
void override_bc(RunSetup& setup, const std::string& kind, double alpha);

} // namespace nsopt
