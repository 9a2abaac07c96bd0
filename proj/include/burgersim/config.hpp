#pragma once

// Flat key/value scenario config files:
//
//   # lines starting with '#' are comments
//   nu = 5
//   variant = theorem1
//   r = 2 + 4*cos(pi*t) - 3*sin(pi*t)
//   ...
//
// Required keys: nu, k, variant, a, u_d, r, u0, n, dt, t_end.
// Optional: sample_stride, out_dir, tol_bound, tol_mean, tol_superpos,
// tol_energy_step.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "burgersim/sim.hpp"

namespace burgersim {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Refinement studies may switch feedback off entirely (k = 0); everything
// else enforces the variant's strict gain threshold.
enum class GainPolicy { strict, allow_zero };

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    static const char* known[] = {"nu", "k",  "variant", "a",  "u_d",
                                  "r",  "u0", "n",       "dt", "t_end",
                                  "sample_stride", "out_dir", "tol_bound",
                                  "tol_mean", "tol_superpos", "tol_energy_step"};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        if (kv.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        if (val.empty())
            throw ConfigError("key '" + key + "': empty value");
        kv[key] = val;
    }
    return kv;
}

inline double parse_real(const std::map<std::string, std::string>& kv,
                         const std::string& key) {
    const std::string& s = kv.at(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    }
    if (used != s.size())
        throw ConfigError("key '" + key + "': trailing characters in '" + s + "'");
    return v;
}

inline int parse_int(const std::map<std::string, std::string>& kv,
                     const std::string& key) {
    const double v = parse_real(kv, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("key '" + key + "': expected an integer");
    return i;
}

inline ExprPtr parse_expression(const std::map<std::string, std::string>& kv,
                                const std::string& key) {
    try {
        return parse(kv.at(key));
    } catch (const ParseError& ex) {
        throw ConfigError("key '" + key + "': " + ex.what() + " at position " +
                          std::to_string(ex.position));
    }
}

}  // namespace detail

inline Scenario load_scenario_stream(std::istream& in,
                                     GainPolicy policy = GainPolicy::strict) {
    using namespace detail;
    const auto kv = parse_key_values(in);
    for (const char* key : {"nu", "k", "variant", "a", "u_d", "r", "u0", "n",
                            "dt", "t_end"})
        if (!kv.count(key))
            throw ConfigError(std::string("missing required key '") + key + "'");

    Scenario sc;
    const std::string& var = kv.at("variant");
    if (var == "theorem1")
        sc.variant = Variant::theorem1;
    else if (var == "theorem2")
        sc.variant = Variant::theorem2;
    else
        throw ConfigError("key 'variant': expected theorem1 or theorem2, got '" +
                          var + "'");

    sc.nu = parse_real(kv, "nu");
    if (sc.nu <= 0.0) throw ConfigError("key 'nu': must be positive");
    sc.k = parse_real(kv, "k");
    if (policy == GainPolicy::strict) {
        if (!gain_ok(sc.variant, sc.k))
            throw ConfigError(std::string("key 'k': ") + variant_name(sc.variant) +
                              (sc.variant == Variant::theorem1 ? " requires k > 1/6"
                                                               : " requires k > 0"));
    } else {
        if (sc.k < 0.0) throw ConfigError("key 'k': must be >= 0");
        sc.allow_zero_gain = true;
    }

    sc.n = parse_int(kv, "n");
    if (sc.n < 3) throw ConfigError("key 'n': need at least 3 grid nodes");
    sc.dt = parse_real(kv, "dt");
    if (sc.dt <= 0.0) throw ConfigError("key 'dt': must be positive");
    sc.t_end = parse_real(kv, "t_end");
    if (sc.t_end <= 0.0) throw ConfigError("key 't_end': must be positive");

    sc.a_expr = parse_expression(kv, "a");
    sc.ud_expr = parse_expression(kv, "u_d");
    sc.r_expr = parse_expression(kv, "r");
    sc.u0_expr = parse_expression(kv, "u0");
    if (depends_on_x(sc.r_expr))
        throw ConfigError("key 'r': reference must depend on t only");
    if (depends_on_t(sc.u0_expr))
        throw ConfigError("key 'u0': initial state must depend on x only");

    if (kv.count("sample_stride")) {
        sc.sample_stride = parse_int(kv, "sample_stride");
        if (sc.sample_stride < 1)
            throw ConfigError("key 'sample_stride': must be >= 1");
    }
    if (kv.count("out_dir")) sc.out_dir = kv.at("out_dir");

    auto tol_override = [&](const char* key, double& target) {
        if (!kv.count(key)) return;
        const double v = parse_real(kv, key);
        if (v <= 0.0) throw ConfigError(std::string("key '") + key +
                                        "': must be positive");
        target = v;
    };
    tol_override("tol_bound", sc.tol.bound_slack);
    tol_override("tol_mean", sc.tol.mean_res);
    tol_override("tol_superpos", sc.tol.superpos);
    tol_override("tol_energy_step", sc.tol.energy_step);
    return sc;
}

inline Scenario load_scenario(const std::string& path,
                              GainPolicy policy = GainPolicy::strict) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return load_scenario_stream(in, policy);
    } catch (const ConfigError& ex) {
        throw ConfigError(path + ": " + ex.what());
    }
}

}  // namespace burgersim
