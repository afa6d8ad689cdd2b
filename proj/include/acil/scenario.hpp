#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "acil/engine.hpp"

namespace acil {

/// Flat key=value configuration document ('#' starts a comment). Later
/// assignments win; unknown keys are rejected when the SimConfig is built.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(std::istream& is);
ConfigMap load_config_file(const std::string& path);

/// Applies "key=value" override strings on top of a parsed config.
void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides);

struct LoadedConfig {
    SimConfig sim;
    std::string out_dir = "out";
};

/// Builds a full SimConfig. Values start from the named system's scenario
/// defaults and are overridden by the remaining keys. Throws
/// std::invalid_argument naming the offending key on any problem.
LoadedConfig build_config(const ConfigMap& map);

/// Scenario defaults by system name ("delta_wing", "minefield_robot",
/// "radial_drift").
LoadedConfig default_config(const std::string& system_name);

/// Centers read from a plain-text file, one whitespace-separated point per
/// line.
std::vector<Vector> load_centers(const std::string& path);

}  // namespace acil
