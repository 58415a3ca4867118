#include "qfric/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "qfric/errors.hpp"

namespace qfric {

namespace {

std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string const& key, std::string const& text)
{
    char* end = nullptr;
    errno = 0;
    double const x = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ValidationError("config: cannot parse value '" + text + "' for key " + key);
    }
    return x;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

struct KeySpec
{
    std::function<void(RunConfig&, std::string const&, std::string const&)> set;
    std::function<std::string(RunConfig const&)> get;
};

template <class M>
KeySpec si_key(M member)
{
    return {[member](RunConfig& c, std::string const& k, std::string const& v) {
                c.si.*member = parse_double(k, v);
            },
            [member](RunConfig const& c) { return fmt(c.si.*member); }};
}

template <class M>
KeySpec num_key(M member)
{
    return {[member](RunConfig& c, std::string const& k, std::string const& v) {
                c.numerics.*member = parse_double(k, v);
            },
            [member](RunConfig const& c) { return fmt(c.numerics.*member); }};
}

std::vector<std::pair<std::string, KeySpec>> const& key_table()
{
    static std::vector<std::pair<std::string, KeySpec>> const table = {
        {"material.omega_p_si", si_key(&SiParameters::omega_p_si)},
        {"material.gamma_si", si_key(&SiParameters::gamma_si)},
        {"atom.omega_a_si", si_key(&SiParameters::omega_a_si)},
        {"atom.alpha0_si", si_key(&SiParameters::alpha0_si)},
        {"geometry.za_si", si_key(&SiParameters::za_si)},
        {"motion.v_over_c", si_key(&SiParameters::v_over_c)},
        {"numerics.rel_tol_quad", num_key(&NumericsConfig::rel_tol_quad)},
        {"numerics.q_cutoff", num_key(&NumericsConfig::q_cutoff)},
        {"numerics.omega_cutoff", num_key(&NumericsConfig::omega_cutoff)},
        {"numerics.psd_tol", num_key(&NumericsConfig::psd_tol)},
        {"numerics.alpha_warn", num_key(&NumericsConfig::alpha_warn)},
        {"numerics.grid_size",
         {[](RunConfig& c, std::string const& k, std::string const& v) {
              double const x = parse_double(k, v);
              if (x != static_cast<int>(x)) {
                  throw ValidationError("config: " + k + " must be an integer");
              }
              c.numerics.grid_size = static_cast<int>(x);
          },
          [](RunConfig const& c) { return std::to_string(c.numerics.grid_size); }}},
        {"numerics.seed",
         {[](RunConfig& c, std::string const& k, std::string const& v) {
              char* end = nullptr;
              unsigned long long const x = std::strtoull(v.c_str(), &end, 10);
              if (v.empty() || end != v.c_str() + v.size()) {
                  throw ValidationError("config: " + k + " must be a nonnegative integer");
              }
              c.numerics.seed = x;
          },
          [](RunConfig const& c) { return std::to_string(c.numerics.seed); }}},
    };
    return table;
}

}  // namespace

RunConfig default_config()
{
    RunConfig c;
    // Gold: hbar omega_p = 9 eV, hbar Gamma = 35 meV.
    c.si.omega_p_si = 1.3673e16;
    c.si.gamma_si = 5.317e13;
    // Hydrogen-like ground-state transition (10.2 eV) and static polarizability.
    c.si.omega_a_si = 1.5497e16;
    c.si.alpha0_si = 7.4192e-41;
    c.si.za_si = 1e-9;
    c.si.v_over_c = 1e-4;
    return c;
}

void apply_setting(RunConfig& cfg, std::string const& key, std::string const& value)
{
    for (auto const& [name, spec] : key_table()) {
        if (name == key) {
            spec.set(cfg, key, value);
            return;
        }
    }
    throw ValidationError("config: unknown key '" + key + "'");
}

void apply_override(RunConfig& cfg, std::string const& assignment)
{
    auto const eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("config: override must look like key=value, got '" + assignment + "'");
    }
    apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(std::istream& in, RunConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto const hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config(std::string const& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("config: cannot open " + path);
    }
    return parse_config(in, base);
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (auto const& [name, spec] : key_table()) {
        keys.push_back(name);
    }
    return keys;
}

std::vector<std::pair<std::string, std::string>> describe_config(RunConfig const& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& [name, spec] : key_table()) {
        out.emplace_back(name, spec.get(cfg));
    }
    return out;
}

}  // namespace qfric
