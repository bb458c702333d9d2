#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "aerialnet/trajectory.hpp"

namespace fs = std::filesystem;
using namespace aerialnet;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(AERIALNET_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), {}};
}

// Urban constants with a short truncation radius and loose quadrature.
fs::path fast_config() {
    const fs::path dir = fs::temp_directory_path() / "aerialnet_cli_test";
    fs::create_directories(dir);
    const fs::path p = dir / "fast.cfg";
    std::ofstream f(p);
    std::istringstream base(read_file(fs::path(AERIALNET_CONFIG_DIR) / "urban.cfg"));
    auto overridden = [](const std::string& l) {
        for (const char* key : {"truncation_radius_km", "quad_rel_tol", "theta_nodes"})
            if (l.rfind(key, 0) == 0) return true;
        return false;
    };
    for (std::string l; std::getline(base, l);)
        if (!overridden(l)) f << l << '\n';
    f << "truncation_radius_km = 5\nquad_rel_tol = 1e-4\ntheta_nodes = 8\n";
    return p;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
}

} // namespace

TEST(CoverageSweep, CsvLayoutAndDeterminism) {
    const std::string args = "coverage-sweep --config " + fast_config().string() +
                             " --sweep lambda_p_per_km=0,0.4 --iters 2000 --seed 3";
    const RunResult a = run_cli(args);
    ASSERT_EQ(a.status, 0);
    const auto ls = lines(a.out);
    std::vector<std::string> body;
    bool saw_hash = false, saw_seed = false;
    for (const auto& l : ls) {
        if (l.rfind("# config_hash=", 0) == 0) saw_hash = true;
        if (l == "# seed=3") saw_seed = true;
        if (!l.empty() && l[0] != '#') body.push_back(l);
    }
    EXPECT_TRUE(saw_hash);
    EXPECT_TRUE(saw_seed);
    ASSERT_EQ(body.size(), 3u);
    EXPECT_EQ(body[0], "sweep_param,analytic_p_cov,mc_p_cov,mc_ci_lo,mc_ci_hi,p_tb_l,p_tb_n,p_db_l,p_db_n");
    for (std::size_t i = 1; i < body.size(); ++i) {
        const auto cols = split(body[i], ',');
        ASSERT_EQ(cols.size(), 9u);
        const double analytic = std::stod(cols[1]), mc = std::stod(cols[2]);
        EXPECT_GE(analytic, 0.0);
        EXPECT_LE(analytic, 1.0);
        EXPECT_LE(std::stod(cols[3]), mc);
        EXPECT_GE(std::stod(cols[4]), mc);
        EXPECT_NEAR(analytic, std::stod(cols[5]) + std::stod(cols[6]) + std::stod(cols[7]) + std::stod(cols[8]), 1e-8);
    }
    const auto zero = split(body[1], ',');
    EXPECT_EQ(std::stod(zero[0]), 0.0);
    EXPECT_EQ(std::stod(zero[7]), 0.0);
    EXPECT_EQ(std::stod(zero[8]), 0.0);

    const RunResult b = run_cli(args);
    EXPECT_EQ(a.out, b.out);
}

TEST(CoverageSweep, WritesOutputFile) {
    const fs::path out = fs::temp_directory_path() / "aerialnet_cli_test" / "cov.csv";
    fs::remove(out);
    const RunResult r = run_cli("coverage-sweep --config " + fast_config().string() +
                                " --sweep tau_db=0 --iters 200 --out " + out.string());
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(read_file(out).find("sweep_param,analytic_p_cov"), std::string::npos);
}

TEST(Errors, BadConfigExitsTwo) {
    const fs::path p = fs::temp_directory_path() / "aerialnet_cli_test" / "bad.cfg";
    fs::create_directories(p.parent_path());
    std::ofstream(p) << "lambda_tb_per_km2 = 1\n";
    EXPECT_EQ(run_cli("coverage-sweep --config " + p.string() + " --sweep tau_db=0").status, 2);
    EXPECT_EQ(run_cli("coverage-sweep --config /nonexistent/x.cfg --sweep tau_db=0").status, 2);
}

TEST(Errors, BadSweepExitsTwo) {
    EXPECT_EQ(run_cli("coverage-sweep --sweep no_such_key=1,2").status, 2);
    EXPECT_EQ(run_cli("coverage-sweep --sweep lambda_p_per_km=abc").status, 2);
    EXPECT_EQ(run_cli("coverage-sweep --sweep lambda_p_per_km=-1 --iters 10").status, 2);
    EXPECT_EQ(run_cli("coverage-sweep").status, 2);
    EXPECT_EQ(run_cli("").status, 2);
}

TEST(Errors, HelpExitsZero) { EXPECT_EQ(run_cli("--help").status, 0); }

TEST(TrajectoryDemo, JsonFieldsAndGeometry) {
    const RunResult r = run_cli("trajectory-demo --config " + fast_config().string() + " --profile-nodes 4 --seed 2");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"meta", "window_half_side_m", "S", "D", "tbs", "dedicated", "roads", "gamma_star",
                            "gamma_star_db", "radii_m", "sequence", "waypoints", "total_length_m", "t_min_s"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["meta"]["seed"], 2);
    EXPECT_EQ(j["meta"]["command"], "trajectory-demo");
    std::vector<Disk> disks;
    for (const auto& n : j["sequence"]) disks.push_back({{n["x"], n["y"]}, n["radius_m"]});
    ASSERT_FALSE(disks.empty());
    std::vector<Point> pts;
    for (const auto& w : j["waypoints"]) pts.push_back({w[0], w[1]});
    ASSERT_GE(pts.size(), 2u);
    EXPECT_EQ(pts.front().x, j["S"][0].get<double>());
    EXPECT_EQ(pts.back().x, j["D"][0].get<double>());
    EXPECT_TRUE(polyline_inside(pts, disks, 1.0));
    EXPECT_NEAR(j["total_length_m"].get<double>(), polyline_length(pts), 1e-6);
    EXPECT_GE(j["t_min_s"].get<double>(), 5000.0 / 18.0 - 1e-9);
}

TEST(MaxMinSweep, SmallGrid) {
    const RunResult r = run_cli("maxmin-sweep --config " + fast_config().string() +
                                " --sweep lambda_p_per_km=0.4 --iters 4 --profile-nodes 4");
    ASSERT_EQ(r.status, 0);
    std::vector<std::string> body;
    for (const auto& l : lines(r.out))
        if (!l.empty() && l[0] != '#') body.push_back(l);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0], "lambda_p_per_km,mean_gamma_star_db,mean_t_min_s,success_rate,n_realizations");
    const auto cols = split(body[1], ',');
    ASSERT_EQ(cols.size(), 5u);
    EXPECT_EQ(cols[4], "4");
    const double rate = std::stod(cols[3]);
    EXPECT_GE(rate, 0.0);
    EXPECT_LE(rate, 1.0);
}

TEST(MaxMinSweep, RejectsThreeAxes) {
    EXPECT_EQ(run_cli("maxmin-sweep --sweep tau_db=0 --sweep v_mps=18 --sweep L_km=5").status, 2);
}

TEST(Validate, ReducedBudgetReport) {
    const RunResult r = run_cli("validate --config " + fast_config().string() + " --iters 4000 --seed 5");
    EXPECT_TRUE(r.status == 0 || r.status == 1);
    int pass = 0, fail = 0;
    for (const auto& l : lines(r.out)) {
        if (l.rfind("[PASS]", 0) == 0) ++pass;
        if (l.rfind("[FAIL]", 0) == 0) ++fail;
    }
    EXPECT_GT(pass + fail, 10);
    EXPECT_EQ(r.status, fail ? 1 : 0);
    EXPECT_EQ(fail, 0) << r.out;
}
