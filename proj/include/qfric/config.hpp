#pragma once

// Flat key-value configuration.
//
//   # comment
//   material.omega_p_si = 1.367e16
//
// One `key = value` per line, surrounding whitespace ignored, `#` starts a
// comment anywhere on a line. Unknown keys and unparsable values are errors.

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "qfric/units.hpp"

namespace qfric {

struct RunConfig
{
    SiParameters si;
    NumericsConfig numerics;
};

/// Gold surface, hydrogen-like atom, z_a = 1 nm, v = 1e-4 c.
RunConfig default_config();

/// Parses on top of `base`; later lines override earlier ones.
RunConfig parse_config(std::istream& in, RunConfig base = default_config());
RunConfig load_config(std::string const& path, RunConfig base = default_config());

/// Applies one `key=value` override.
void apply_setting(RunConfig& cfg, std::string const& key, std::string const& value);
void apply_override(RunConfig& cfg, std::string const& assignment);

std::vector<std::string> config_keys();

/// All keys with their resolved values, in config_keys() order.
std::vector<std::pair<std::string, std::string>> describe_config(RunConfig const& cfg);

}  // namespace qfric
