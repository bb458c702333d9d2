#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "aerialnet/montecarlo.hpp"

using namespace aerialnet;

namespace {

NetworkConfig small_config() {
    NetworkConfig cfg = urban_config();
    cfg.quad.truncation_radius = 5000.0;
    return cfg;
}

} // namespace

TEST(Estimators, ZeroIterationsRejected) {
    const NetworkConfig cfg = small_config();
    EXPECT_THROW(estimate_coverage(cfg, 1.0, 0, 1), InvalidParameter);
    EXPECT_THROW(empirical_distance_cdf(kAllKinds[0], cfg, 0, 1), InvalidParameter);
    EXPECT_THROW(estimate_laplace({1.0}, {kAllKinds[0], 100.0, 0.0}, cfg, 0, 1), InvalidParameter);
    EXPECT_THROW(estimate_mean_sinr(100.0, BsKind::Tbs, cfg, 0, 1), InvalidParameter);
}

TEST(Estimators, IndependentOfWorkerCount) {
    const NetworkConfig cfg = small_config();
    EXPECT_EQ(sample_sinrs(cfg, 3000, 42, 1), sample_sinrs(cfg, 3000, 42, 4));
    const EmpiricalCdf a = empirical_distance_cdf(kAllKinds[2], cfg, 3000, 42, 1);
    const EmpiricalCdf b = empirical_distance_cdf(kAllKinds[2], cfg, 3000, 42, 3);
    EXPECT_EQ(a.distances, b.distances);
    EXPECT_EQ(a.total, b.total);
}

TEST(Estimators, SeedChangesOutcome) {
    const NetworkConfig cfg = small_config();
    EXPECT_NE(sample_sinrs(cfg, 200, 1), sample_sinrs(cfg, 200, 2));
}

TEST(SimulateSinr, EmptyRealizationHasNoServer) {
    const NetworkConfig cfg = small_config();
    NetworkRealization real;
    RandomStream rng(1);
    EXPECT_THROW(simulate_sinr_at_origin(real, cfg, rng), NoServerError);
}

// One TBS and no interferers: SINR = P g / sigma^2 with unit-mean fading.
TEST(SimulateSinr, SingleTbsIsNoiseLimited) {
    const NetworkConfig cfg = small_config();
    NetworkRealization real;
    real.tbs = {{300.0, 400.0}};
    const int n = 20000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        RandomStream rng(8, i);
        const SinrSample s = simulate_sinr_at_origin(real, cfg, rng);
        ASSERT_EQ(s.serving.bs, BsKind::Tbs);
        ASSERT_DOUBLE_EQ(s.serving_distance, 500.0);
        const double x = s.sinr * cfg.channel.sigma2 / mean_received_power(500.0, BsKind::Tbs, s.serving.link, cfg.channel);
        sum += x;
        ss += x * x;
    }
    const double mean = sum / n, se = std::sqrt((ss / n - mean * mean) / n);
    EXPECT_NEAR(mean, 1.0, 4.0 * se);
}

TEST(SimulateSinr, OutsideTruncationIgnored) {
    const NetworkConfig cfg = small_config();
    NetworkRealization real;
    real.tbs = {{6000.0, 0.0}};
    RandomStream rng(1);
    EXPECT_THROW(simulate_sinr_at_origin(real, cfg, rng), NoServerError);
}

TEST(Association, StrongestMeanPowerServes) {
    const ChannelParams p;
    const std::vector<Transmitter> tx = {
        {{BsKind::Tbs, LinkKind::NLoS}, 100.0, mean_received_power(100.0, BsKind::Tbs, LinkKind::NLoS, p)},
        {{BsKind::Tbs, LinkKind::LoS}, 1000.0, mean_received_power(1000.0, BsKind::Tbs, LinkKind::LoS, p)},
        {{BsKind::Dedicated, LinkKind::NLoS}, 50.0, mean_received_power(50.0, BsKind::Dedicated, LinkKind::NLoS, p)},
    };
    RandomStream rng(3);
    const SinrSample s = sinr_from_transmitters(tx, p, rng);
    EXPECT_EQ(s.serving, (Kind{BsKind::Tbs, LinkKind::LoS}));
    EXPECT_EQ(s.serving_distance, 1000.0);
}

TEST(Association, TiesPreferDedicatedThenLos) {
    const Transmitter tbs{{BsKind::Tbs, LinkKind::LoS}, 10.0, 1.0};
    const Transmitter db_n{{BsKind::Dedicated, LinkKind::NLoS}, 20.0, 1.0};
    const Transmitter db_l{{BsKind::Dedicated, LinkKind::LoS}, 30.0, 1.0};
    EXPECT_TRUE(stronger(db_n, tbs));
    EXPECT_FALSE(stronger(tbs, db_n));
    EXPECT_TRUE(stronger(db_l, db_n));
    EXPECT_FALSE(stronger(db_n, db_l));
}

TEST(Wilson, Bounds) {
    const ProportionEstimate e = wilson_interval(50, 100);
    EXPECT_DOUBLE_EQ(e.p, 0.5);
    EXPECT_LT(e.ci_lo, 0.5);
    EXPECT_GT(e.ci_hi, 0.5);
    const ProportionEstimate z = wilson_interval(0, 100);
    EXPECT_EQ(z.ci_lo, 0.0);
    EXPECT_GT(z.ci_hi, 0.0);
}

// Spread of the coverage estimate across seeds shrinks like N^(-1/2).
TEST(CoverageEstimate, StandardErrorSlope) {
    const NetworkConfig cfg = small_config();
    std::vector<double> log_n, log_sd;
    for (std::uint64_t n : {200u, 800u, 3200u}) {
        std::vector<double> ps;
        for (std::uint64_t seed = 0; seed < 24; ++seed) ps.push_back(estimate_coverage(cfg, 1.0, n, 1000 + seed).p);
        const MeanEstimate m = summarize(ps);
        log_n.push_back(std::log(double(n)));
        log_sd.push_back(std::log(m.stderr_ * std::sqrt(double(ps.size()))));
    }
    const double slope = (log_sd.back() - log_sd.front()) / (log_n.back() - log_n.front());
    EXPECT_NEAR(slope, -0.5, 0.15);
}

TEST(RadialDraw, CountsMatchIntensities) {
    const NetworkConfig cfg = small_config();
    const double R = cfg.truncation_radius();
    RadialDraw d;
    double tbs = 0.0, db = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        RandomStream rng(12, i);
        sample_radial(cfg, rng, d);
        tbs += d.tbs.size();
        db += d.dedicated.size();
        for (double x : d.dedicated) ASSERT_LE(x, R);
    }
    const double area = pi * R * R;
    EXPECT_NEAR(tbs / n, cfg.lambda_tb * area, 4.0 * std::sqrt(cfg.lambda_tb * area / n));
    EXPECT_NEAR(db / n / (cfg.dedicated_density() * area), 1.0, 0.03);
}
