#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aerialnet/channel.hpp"
#include "aerialnet/errors.hpp"
#include "aerialnet/geometry.hpp"
#include "aerialnet/numerics.hpp"
#include "aerialnet/units.hpp"

namespace aerialnet {

// Every model parameter in SI-style internal units (m, W, linear ratios).
struct NetworkConfig {
    ChannelParams channel;
    double lambda_tb = 1.0 * per_km2;          // TBS per m^2
    double lambda_l = 4.0 / pi * per_km;       // lines per m per radian
    double lambda_p = 0.4 * per_km;            // dedicated BSs per m of road
    double tau = 1.0;                          // SINR threshold, linear
    double travel_distance = 5000.0;           // L, m
    double speed = 18.0;                       // v, m/s
    double sim_half_side = 12500.0;            // m
    double gamma_floor = db_to_linear(-10.0);  // Max-Min search floor, linear
    double epsilon_db = 0.1;
    int theta_nodes = 16;
    QuadPolicy quad{};

    double truncation_radius() const { return quad.truncation_radius; }
    Window simulation_window() const { return Window{sim_half_side}; }
    Window oracle_window() const { return Window{std::max(sim_half_side, quad.truncation_radius)}; }
    double dedicated_density() const { return pi * lambda_l * lambda_p; }

    void validate() const {
        channel.validate();
        auto req = [](bool ok, const char* key, const char* msg) {
            if (!ok) throw ConfigError(key, msg);
        };
        req(lambda_tb >= 0, "lambda_tb_per_km2", "must be >= 0");
        req(lambda_l >= 0, "lambda_l_km_per_km2", "must be >= 0");
        req(lambda_p >= 0, "lambda_p_per_km", "must be >= 0");
        req(tau > 0, "tau_db", "must be finite");
        req(travel_distance > 0, "L_km", "must be > 0");
        req(speed > 0, "v_mps", "must be > 0");
        req(sim_half_side > 0, "sim_half_side_km", "must be > 0");
        req(gamma_floor > 0, "gamma_floor_db", "must be finite");
        req(epsilon_db > 0, "epsilon_db", "must be > 0");
        req(theta_nodes >= 1, "theta_nodes", "must be >= 1");
        req(quad.rel_tol > 0, "quad_rel_tol", "must be > 0");
        req(quad.abs_tol > 0, "quad_abs_tol", "must be > 0");
        req(quad.max_depth >= 1, "quad_max_depth", "must be >= 1");
        req(quad.truncation_radius > 0, "truncation_radius_km", "must be > 0");
    }
};

inline NetworkConfig urban_config() { return NetworkConfig{}; }

inline NetworkConfig rural_config() {
    NetworkConfig c;
    c.channel.a = 4.88;
    c.channel.b = 0.43;
    c.channel.eta_l = 1.0;
    c.channel.eta_n = 1.0;
    c.lambda_tb = 0.1 * per_km2;
    c.lambda_l = 2.0 / pi * per_km;
    return c;
}

namespace detail {

struct KeySpec {
    const char* name;
    bool required;
    std::function<void(NetworkConfig&, double)> set;
    std::function<double(const NetworkConfig&)> get;
};

inline int as_int(const char* key, double v) {
    if (v != std::floor(v)) throw ConfigError(key, "must be an integer");
    return static_cast<int>(v);
}

inline const std::vector<KeySpec>& key_table() {
    using C = NetworkConfig;
    static const std::vector<KeySpec> table = {
        {"lambda_tb_per_km2", true, [](C& c, double v) { c.lambda_tb = v * per_km2; }, [](const C& c) { return c.lambda_tb / per_km2; }},
        {"lambda_l_km_per_km2", true, [](C& c, double v) { c.lambda_l = v * per_km; }, [](const C& c) { return c.lambda_l / per_km; }},
        {"lambda_p_per_km", true, [](C& c, double v) { c.lambda_p = v * per_km; }, [](const C& c) { return c.lambda_p / per_km; }},
        {"h_tb_m", true, [](C& c, double v) { c.channel.h_tb = v; }, [](const C& c) { return c.channel.h_tb; }},
        {"h_db_m", true, [](C& c, double v) { c.channel.h_db = v; }, [](const C& c) { return c.channel.h_db; }},
        {"h_u_m", true, [](C& c, double v) { c.channel.h_u = v; }, [](const C& c) { return c.channel.h_u; }},
        {"rho_tb_w", true, [](C& c, double v) { c.channel.rho_tb = v; }, [](const C& c) { return c.channel.rho_tb; }},
        {"rho_db_w", true, [](C& c, double v) { c.channel.rho_db = v; }, [](const C& c) { return c.channel.rho_db; }},
        {"g_m_db", true, [](C& c, double v) { c.channel.g_m = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.channel.g_m); }},
        {"g_s_db", true, [](C& c, double v) { c.channel.g_s = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.channel.g_s); }},
        {"z_db_m", true, [](C& c, double v) { c.channel.z_db = v; }, [](const C& c) { return c.channel.z_db; }},
        {"L_km", true, [](C& c, double v) { c.travel_distance = v * km; }, [](const C& c) { return c.travel_distance / km; }},
        {"v_mps", true, [](C& c, double v) { c.speed = v; }, [](const C& c) { return c.speed; }},
        {"tau_db", true, [](C& c, double v) { c.tau = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.tau); }},
        {"a", true, [](C& c, double v) { c.channel.a = v; }, [](const C& c) { return c.channel.a; }},
        {"b", true, [](C& c, double v) { c.channel.b = v; }, [](const C& c) { return c.channel.b; }},
        {"sigma2_w", true, [](C& c, double v) { c.channel.sigma2 = v; }, [](const C& c) { return c.channel.sigma2; }},
        {"alpha_n", true, [](C& c, double v) { c.channel.alpha_n = v; }, [](const C& c) { return c.channel.alpha_n; }},
        {"alpha_l", true, [](C& c, double v) { c.channel.alpha_l = v; }, [](const C& c) { return c.channel.alpha_l; }},
        {"m_n", true, [](C& c, double v) { c.channel.m_n = as_int("m_n", v); }, [](const C& c) { return double(c.channel.m_n); }},
        {"m_l", true, [](C& c, double v) { c.channel.m_l = as_int("m_l", v); }, [](const C& c) { return double(c.channel.m_l); }},
        {"eta_n_db", true, [](C& c, double v) { c.channel.eta_n = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.channel.eta_n); }},
        {"eta_l_db", true, [](C& c, double v) { c.channel.eta_l = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.channel.eta_l); }},
        {"quad_rel_tol", false, [](C& c, double v) { c.quad.rel_tol = v; }, [](const C& c) { return c.quad.rel_tol; }},
        {"quad_abs_tol", false, [](C& c, double v) { c.quad.abs_tol = v; }, [](const C& c) { return c.quad.abs_tol; }},
        {"quad_max_depth", false, [](C& c, double v) { c.quad.max_depth = as_int("quad_max_depth", v); }, [](const C& c) { return double(c.quad.max_depth); }},
        {"truncation_radius_km", false, [](C& c, double v) { c.quad.truncation_radius = v * km; }, [](const C& c) { return c.quad.truncation_radius / km; }},
        {"theta_nodes", false, [](C& c, double v) { c.theta_nodes = as_int("theta_nodes", v); }, [](const C& c) { return double(c.theta_nodes); }},
        {"sim_half_side_km", false, [](C& c, double v) { c.sim_half_side = v * km; }, [](const C& c) { return c.sim_half_side / km; }},
        {"gamma_floor_db", false, [](C& c, double v) { c.gamma_floor = db_to_linear(v); }, [](const C& c) { return linear_to_db(c.gamma_floor); }},
        {"epsilon_db", false, [](C& c, double v) { c.epsilon_db = v; }, [](const C& c) { return c.epsilon_db; }},
    };
    return table;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& k : detail::key_table()) keys.push_back(k.name);
    return keys;
}

// Sets one key from its file-level (km / dB) value.
inline void set_config_value(NetworkConfig& cfg, const std::string& key, double value) {
    for (const auto& k : detail::key_table()) {
        if (key == k.name) {
            if (!std::isfinite(value)) throw ConfigError(key, "must be finite");
            k.set(cfg, value);
            return;
        }
    }
    throw ConfigError(key, "unknown key");
}

inline double get_config_value(const NetworkConfig& cfg, const std::string& key) {
    for (const auto& k : detail::key_table())
        if (key == k.name) return k.get(cfg);
    throw ConfigError(key, "unknown key");
}

// `key = value` lines; '#' starts a comment.
inline NetworkConfig parse_config(const std::string& text) {
    NetworkConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string raw = detail::trim(line.substr(eq + 1));
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError(key, "not a number: '" + raw + "'");
        }
        if (seen[key]) throw ConfigError(key, "duplicate key");
        seen[key] = true;
        set_config_value(cfg, key, value);
    }
    for (const auto& k : detail::key_table())
        if (k.required && !seen[k.name]) throw ConfigError(k.name, "missing required key");
    try {
        cfg.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError("channel", e.what());
    }
    return cfg;
}

inline NetworkConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

inline std::string format_config(const NetworkConfig& cfg) {
    std::string out;
    for (const auto& k : detail::key_table()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", k.name, k.get(cfg));
        out += buf;
    }
    return out;
}

// FNV-1a over the canonical key listing.
inline std::uint64_t config_hash(const NetworkConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : format_config(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string config_hash_hex(const NetworkConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

} // namespace aerialnet
