#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aerialnet/config.hpp"
#include "aerialnet/coverage.hpp"
#include "aerialnet/errors.hpp"
#include "aerialnet/montecarlo.hpp"
#include "aerialnet/trajectory.hpp"
#include "aerialnet/validation.hpp"

#ifndef AERIALNET_VERSION
#define AERIALNET_VERSION "0.0.0"
#endif

namespace aerialnet {

inline constexpr const char* kVersion = AERIALNET_VERSION;
inline constexpr int kSchemaVersion = 1;

struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

struct ExperimentSpec {
    std::string command;
    std::string config_path; // empty: built-in urban defaults
    std::vector<SweepAxis> sweeps;
    std::uint64_t seed = 1;
    std::uint64_t iterations = 0; // 0: command default
    std::string out;              // empty: stdout
    unsigned workers = 0;
    int profile_nodes = 16;
};

// "KEY=v1,v2,..."
inline SweepAxis parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(text, "sweep must look like KEY=v1,v2,...");
    SweepAxis axis;
    axis.key = text.substr(0, eq);
    get_config_value(NetworkConfig{}, axis.key); // rejects unknown keys
    std::stringstream list(text.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
        item = detail::trim(item);
        try {
            std::size_t used = 0;
            axis.values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError(axis.key, "bad sweep value '" + item + "'");
        }
    }
    if (axis.values.empty()) throw ConfigError(axis.key, "empty sweep grid");
    return axis;
}

inline NetworkConfig base_config(const ExperimentSpec& spec) {
    NetworkConfig cfg = spec.config_path.empty() ? urban_config() : load_config(spec.config_path);
    cfg.validate();
    return cfg;
}

inline NetworkConfig with_value(NetworkConfig cfg, const std::string& key, double value) {
    set_config_value(cfg, key, value);
    try {
        cfg.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(key, e.what());
    }
    return cfg;
}

inline std::uint64_t iterations_or(const ExperimentSpec& spec, std::uint64_t fallback) {
    return spec.iterations ? spec.iterations : fallback;
}

inline std::string metadata_header(const ExperimentSpec& spec, const NetworkConfig& cfg, std::uint64_t iterations) {
    std::string h;
    h += std::string("# aerialnet ") + kVersion + "\n";
    h += "# schema=" + std::to_string(kSchemaVersion) + "\n";
    h += "# command=" + spec.command + "\n";
    h += "# config_hash=" + config_hash_hex(cfg) + "\n";
    h += "# seed=" + std::to_string(spec.seed) + "\n";
    h += "# iterations=" + std::to_string(iterations) + "\n";
    for (const SweepAxis& a : spec.sweeps) h += "# sweep=" + a.key + "\n";
    return h;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// One row per grid point of a single sweep axis.
inline void run_coverage_sweep(const ExperimentSpec& spec, std::ostream& out) {
    if (spec.sweeps.size() != 1) throw ConfigError("--sweep", "coverage-sweep takes exactly one sweep axis");
    const NetworkConfig base = base_config(spec);
    const std::uint64_t iters = iterations_or(spec, 10000);
    const SweepAxis& axis = spec.sweeps.front();
    out << metadata_header(spec, base, iters);
    out << "sweep_param,analytic_p_cov,mc_p_cov,mc_ci_lo,mc_ci_hi,p_tb_l,p_tb_n,p_db_l,p_db_n\n";
    for (double v : axis.values) {
        const NetworkConfig cfg = with_value(base, axis.key, v);
        const CoverageBreakdown a = coverage_probability(cfg.tau, cfg);
        const ProportionEstimate mc = estimate_coverage(cfg, cfg.tau, iters, spec.seed, spec.workers);
        out << fmt(v) << ',' << fmt(a.total) << ',' << fmt(mc.p) << ',' << fmt(mc.ci_lo) << ',' << fmt(mc.ci_hi) << ','
            << fmt(a.p_tb_l) << ',' << fmt(a.p_tb_n) << ',' << fmt(a.p_db_l) << ',' << fmt(a.p_db_n) << '\n';
    }
}

struct MaxMinCell {
    double mean_gamma_star_db = 0.0;
    double mean_t_min = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t realizations = 0;

    double success_rate() const { return realizations ? double(successes) / realizations : 0.0; }
};

// Realization i of every cell uses stream i of the seed.
inline MaxMinCell run_maxmin_cell(const NetworkConfig& cfg, const SinrProfile& profile, std::uint64_t iterations,
                                  std::uint64_t seed, unsigned workers) {
    std::vector<TrajectoryInstance> runs(iterations);
    parallel_for(iterations, workers, [&](std::uint64_t i, unsigned) {
        runs[i] = solve_trajectory_instance(cfg, profile, seed, i);
        runs[i].realization = {};
    });
    MaxMinCell cell;
    cell.realizations = iterations;
    for (const auto& r : runs) {
        if (!r.solution) continue;
        ++cell.successes;
        cell.mean_gamma_star_db += r.maxmin->gamma_star_db();
        cell.mean_t_min += r.solution->t_min;
    }
    if (cell.successes) {
        cell.mean_gamma_star_db /= cell.successes;
        cell.mean_t_min /= cell.successes;
    }
    return cell;
}

// Cartesian grid over one or two sweep axes.
inline void run_maxmin_sweep(const ExperimentSpec& spec, std::ostream& out) {
    if (spec.sweeps.empty() || spec.sweeps.size() > 2)
        throw ConfigError("--sweep", "maxmin-sweep takes one or two sweep axes");
    const NetworkConfig base = base_config(spec);
    const std::uint64_t iters = iterations_or(spec, 200);
    out << metadata_header(spec, base, iters);
    for (const SweepAxis& a : spec.sweeps) out << a.key << ',';
    out << "mean_gamma_star_db,mean_t_min_s,success_rate,n_realizations\n";
    const SweepAxis& outer = spec.sweeps.front();
    const SweepAxis inner = spec.sweeps.size() == 2 ? spec.sweeps[1] : SweepAxis{"", {0.0}};
    for (double u : outer.values)
        for (double w : inner.values) {
            NetworkConfig cfg = with_value(base, outer.key, u);
            if (!inner.key.empty()) cfg = with_value(cfg, inner.key, w);
            const SinrProfile profile = SinrProfile::build(cfg, spec.profile_nodes);
            const MaxMinCell cell = run_maxmin_cell(cfg, profile, iters, spec.seed, spec.workers);
            out << fmt(u) << ',';
            if (!inner.key.empty()) out << fmt(w) << ',';
            out << fmt(cell.mean_gamma_star_db) << ',' << fmt(cell.mean_t_min) << ',' << fmt(cell.success_rate())
                << ',' << cell.realizations << '\n';
        }
}

inline nlohmann::ordered_json point_json(Point p) { return nlohmann::ordered_json::array({p.x, p.y}); }

// First feasible realization from stream 0 of the seed, with everything a
// trajectory figure needs.
inline nlohmann::ordered_json trajectory_demo_json(const ExperimentSpec& spec, int max_attempts = 1000) {
    const NetworkConfig cfg = base_config(spec);
    const SinrProfile profile = SinrProfile::build(cfg, spec.profile_nodes);
    for (int i = 0; i < max_attempts; ++i) {
        TrajectoryInstance inst = solve_trajectory_instance(cfg, profile, spec.seed, std::uint64_t(i));
        if (!inst.solution) continue;
        const TrajectorySolution& sol = *inst.solution;
        nlohmann::ordered_json j;
        j["meta"] = {{"tool", "aerialnet"},
                     {"version", kVersion},
                     {"schema", kSchemaVersion},
                     {"command", "trajectory-demo"},
                     {"config_hash", config_hash_hex(cfg)},
                     {"seed", spec.seed},
                     {"realization_index", i}};
        j["window_half_side_m"] = inst.realization.window.half_side;
        j["S"] = point_json(trajectory_start(cfg));
        j["D"] = point_json(trajectory_end(cfg));
        j["tbs"] = nlohmann::ordered_json::array();
        for (const Point& g : inst.realization.tbs)
            if (inst.realization.window.contains(g)) j["tbs"].push_back(point_json(g));
        j["dedicated"] = nlohmann::ordered_json::array();
        j["roads"] = nlohmann::ordered_json::array();
        for (const Road& road : inst.realization.roads) {
            j["roads"].push_back({{"rho_m", road.line.rho}, {"phi_rad", road.line.phi}});
            for (const Point& g : road.points)
                if (inst.realization.window.contains(g)) j["dedicated"].push_back(point_json(g));
        }
        j["gamma_star"] = sol.gamma_star;
        j["gamma_star_db"] = linear_to_db(sol.gamma_star);
        j["radii_m"] = {{"tbs", profile.radius(sol.gamma_star, BsKind::Tbs)},
                        {"dedicated", profile.radius(sol.gamma_star, BsKind::Dedicated)}};
        j["sequence"] = nlohmann::ordered_json::array();
        for (const BsNode& n : sol.bs_sequence)
            j["sequence"].push_back({{"x", n.location.x}, {"y", n.location.y}, {"kind", to_string(n.kind)},
                                     {"radius_m", n.radius}});
        j["waypoints"] = nlohmann::ordered_json::array();
        for (const Point& p : sol.waypoints) j["waypoints"].push_back(point_json(p));
        j["total_length_m"] = sol.total_length;
        j["t_min_s"] = sol.t_min;
        return j;
    }
    throw NoRouteError("trajectory-demo: no feasible realization in " + std::to_string(max_attempts) + " attempts");
}

inline void run_trajectory_demo(const ExperimentSpec& spec, std::ostream& out) {
    out << trajectory_demo_json(spec).dump(2) << '\n';
}

// Returns the number of failed checks.
inline int run_validate(const ExperimentSpec& spec, std::ostream& out) {
    const NetworkConfig cfg = base_config(spec);
    const std::uint64_t iters = iterations_or(spec, 100000);
    out << metadata_header(spec, cfg, iters);
    if (iters < 100000) out << "# reduced budget: KS and coverage gates widened with 1/sqrt(n)\n";
    int failed = 0;
    for (const CheckResult& c : run_validation(cfg, iters, spec.seed, spec.workers)) {
        if (!c.passed) ++failed;
        char buf[96];
        std::snprintf(buf, sizeof buf, " value=%.4g tol=%.4g ", c.value, c.tolerance);
        out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << buf << c.detail << '\n';
    }
    return failed;
}

} // namespace aerialnet
