#pragma once

#include "parti/valuation.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parti {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key = value pairs. Values are kept as text until a command asks for them.
struct RawConfig {
    std::map<std::string, std::string> values;

    [[nodiscard]] bool has(const std::string& k) const { return values.count(k) != 0; }
    [[nodiscard]] std::string get(const std::string& k, const std::string& fallback = "") const {
        const auto it = values.find(k);
        return it == values.end() ? fallback : it->second;
    }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> k{"v0",          "r",         "nu",    "sigma",    "t_mat",
                                         "p_lump",      "p_over_v0", "g_total", "g_over_p", "k_threshold",
                                         "k_over_v0",   "alpha",     "tau1",  "tau2",     "rho"};
    return k;
}

inline const std::set<std::string>& command_keys() {
    static const std::set<std::string> k{"vb",      "mode",    "sweep",  "grid",   "region",
                                         "p_grid",  "y_grid",  "v_grid", "alphas", "t_mats",
                                         "tol",     "mc_paths", "mc_steps_per_year", "mc_scenarios"};
    return k;
}

inline const std::map<std::string, std::string>& partners() {
    static const std::map<std::string, std::string> p{
        {"g_total", "g_over_p"}, {"g_over_p", "g_total"},     {"k_threshold", "k_over_v0"},
        {"k_over_v0", "k_threshold"}, {"p_lump", "p_over_v0"}, {"p_over_v0", "p_lump"}};
    return p;
}

inline void check_key(const std::string& key) {
    if (!scenario_keys().count(key) && !command_keys().count(key)) {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

}  // namespace config_detail

/// Decimal number, or a percentage written with an explicit "%" suffix.
[[nodiscard]] inline double parse_number(const std::string& text) {
    std::string t = config_detail::trim(text);
    double scale = 1.0;
    if (!t.empty() && t.back() == '%') {
        t.pop_back();
        t = config_detail::trim(t);
        scale = 0.01;
    }
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last) {
        throw ConfigError("not a number: '" + text + "'");
    }
    return v * scale;
}

/// "a:b:step" (inclusive) or a comma-separated list; empty text is an empty grid.
[[nodiscard]] inline std::vector<double> parse_grid(const std::string& text) {
    const std::string t = config_detail::trim(text);
    std::vector<double> out;
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw ConfigError("range grid must be start:stop:step, got '" + text + "'");
        const double a = parse_number(parts[0]), b = parse_number(parts[1]), h = parse_number(parts[2]);
        if (!(h > 0.0) || b < a) throw ConfigError("range grid needs step > 0 and stop >= start: '" + text + "'");
        const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
        if (n > 10'000'000) throw ConfigError("range grid too large: '" + text + "'");
        for (long i = 0; i <= n; ++i) out.push_back(a + h * static_cast<double>(i));
        return out;
    }
    std::stringstream ss(t);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(parse_number(p));
    return out;
}

[[nodiscard]] inline RawConfig parse_config_text(const std::string& text) {
    RawConfig cfg;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = config_detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = config_detail::trim(t.substr(0, eq));
        config_detail::check_key(key);
        if (cfg.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values[key] = config_detail::trim(t.substr(eq + 1));
    }
    for (const auto& [k, other] : config_detail::partners()) {
        if (cfg.has(k) && cfg.has(other)) {
            throw ConfigError("'" + k + "' and '" + other + "' are mutually exclusive");
        }
    }
    return cfg;
}

[[nodiscard]] inline RawConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

/// Applies one "key=value" override; it replaces the key and its ratio/absolute partner.
inline void apply_override(RawConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = config_detail::trim(assignment.substr(0, eq));
    config_detail::check_key(key);
    const auto it = config_detail::partners().find(key);
    if (it != config_detail::partners().end()) cfg.values.erase(it->second);
    cfg.values[key] = config_detail::trim(assignment.substr(eq + 1));
}

/// Builds a validated scenario; unspecified fields keep their base values.
[[nodiscard]] inline Scenario scenario_from(const RawConfig& cfg) {
    Scenario s = base_scenario();
    auto num = [&](const char* k, double& dst) {
        if (cfg.has(k)) dst = parse_number(cfg.get(k));
    };
    num("v0", s.v0);
    num("r", s.market.r);
    num("nu", s.market.nu);
    num("sigma", s.market.sigma);
    num("t_mat", s.contract.t_mat);
    num("alpha", s.contract.alpha);
    num("tau1", s.frictions.tau1);
    num("tau2", s.frictions.tau2);
    num("rho", s.frictions.rho);
    // ratio forms are resolved after the absolute inputs they refer to
    const double base_g_over_p = s.contract.g_total / s.contract.p_lump;
    const bool g_given = cfg.has("g_total") || cfg.has("g_over_p");
    if (cfg.has("p_lump")) s.contract.p_lump = parse_number(cfg.get("p_lump"));
    if (cfg.has("p_over_v0")) s.contract.p_lump = parse_number(cfg.get("p_over_v0")) * s.v0;
    if (cfg.has("g_total")) s.contract.g_total = parse_number(cfg.get("g_total"));
    if (cfg.has("g_over_p")) s.contract.g_total = parse_number(cfg.get("g_over_p")) * s.contract.p_lump;
    if (!g_given) s.contract.g_total = base_g_over_p * s.contract.p_lump;
    if (cfg.has("k_threshold")) s.contract.k_threshold = parse_number(cfg.get("k_threshold"));
    if (cfg.has("k_over_v0")) s.contract.k_threshold = parse_number(cfg.get("k_over_v0")) * s.v0;
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

}  // namespace parti
