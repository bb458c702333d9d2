#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "aerialnet/cli.hpp"

namespace {

enum ExitCode { kOk = 0, kValidationFailure = 1, kConfigError = 2, kNumericsError = 3 };

std::unique_ptr<std::ostream> open_output(const std::string& path) {
    if (path.empty()) return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw aerialnet::ConfigError(path, "cannot open output file");
    return f;
}

} // namespace

int main(int argc, char** argv) {
    using namespace aerialnet;
    CLI::App app{"Coverage, Max-Min SINR and trajectory experiments for hybrid TBS / roadside BS networks"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    std::vector<std::string> sweeps;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", spec.config_path, "key = value config file (default: built-in urban)");
        sub->add_option("--seed", spec.seed, "64-bit seed");
        sub->add_option("--iters", spec.iterations, "Monte Carlo iterations or realizations per cell")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", spec.out, "output path (default: stdout)");
        sub->add_option("--workers", spec.workers, "worker threads (0: hardware concurrency)");
    };
    auto* coverage = app.add_subcommand("coverage-sweep", "analytic and simulated coverage over a parameter grid");
    auto* maxmin = app.add_subcommand("maxmin-sweep", "mean Max-Min SINR and minimal travel time per grid cell");
    auto* demo = app.add_subcommand("trajectory-demo", "one realization with its minimal-time trajectory as JSON");
    auto* validate = app.add_subcommand("validate", "oracle suite: distance laws, Laplace transforms, coverage");
    for (auto* sub : {coverage, maxmin, demo, validate}) common(sub);
    for (auto* sub : {coverage, maxmin})
        sub->add_option("--sweep", sweeps, "KEY=v1,v2,... (repeatable)")->required()->take_all();
    for (auto* sub : {maxmin, demo})
        sub->add_option("--profile-nodes", spec.profile_nodes, "mean-SINR table nodes per gain piece")
            ->check(CLI::Range(3, 200));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        spec.command = app.get_subcommands().front()->get_name();
        for (const auto& s : sweeps) spec.sweeps.push_back(parse_sweep(s));
        auto file = open_output(spec.out);
        std::ostream& out = file ? *file : std::cout;
        if (spec.command == "coverage-sweep") {
            run_coverage_sweep(spec, out);
        } else if (spec.command == "maxmin-sweep") {
            run_maxmin_sweep(spec, out);
        } else if (spec.command == "trajectory-demo") {
            run_trajectory_demo(spec, out);
        } else {
            const int failed = run_validate(spec, out);
            if (file) std::cout << (failed ? "validation failed: " : "validation passed: ") << failed << " failing checks\n";
            return failed ? kValidationFailure : kOk;
        }
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericsError& e) {
        std::cerr << "numerics error: " << e.what() << '\n';
        return kNumericsError;
    } catch (const NoRouteError& e) {
        std::cerr << "no route: " << e.what() << '\n';
        return kNumericsError;
    }
}
