#include <cmath>
#include <optional>

#include <gtest/gtest.h>

#include "aerialnet/distlaw.hpp"

using namespace aerialnet;

namespace {

constexpr Kind kTbsL{BsKind::Tbs, LinkKind::LoS};
constexpr Kind kTbsN{BsKind::Tbs, LinkKind::NLoS};
constexpr Kind kDbL{BsKind::Dedicated, LinkKind::LoS};
constexpr Kind kDbN{BsKind::Dedicated, LinkKind::NLoS};

// Total association mass over all four serving kinds.
double association_mass(const NetworkConfig& cfg) {
    const ThetaRule& rule = theta_rule(cfg.theta_nodes);
    double total = 0.0;
    for (const Kind& k : kAllKinds) {
        auto g = [&](double r) {
            const double f = nearest_marginal_pdf(k, r, cfg);
            if (f <= 0.0) return 0.0;
            if (k.bs == BsKind::Tbs) return f * association_probability(k, r, 0.0, cfg);
            const auto tilt = line_angle_tilt(k.link, r, cfg);
            double v = 0.0;
            for (std::size_t i = 0; i < tilt.size(); ++i)
                v += rule.weight[i] * tilt[i] * association_probability(k, r, rule.theta[i], cfg);
            return f * v;
        };
        QuadPolicy q = cfg.quad.with_rel_tol(1e-4);
        q.abs_tol = 1e-6;
        q.breakpoints = {cfg.channel.z_db};
        total += integrate(g, 0.0, 8000.0, q).value;
    }
    return total;
}

} // namespace

TEST(ExclusionDistance, SameKindIsServingDistance) {
    const ChannelParams p;
    EXPECT_EQ(exclusion_distance(kDbL, kDbL, 321.0, p), 321.0);
}

TEST(ExclusionDistance, EqualPowerAtBoundary) {
    const ChannelParams p;
    for (const Kind& s : kAllKinds)
        for (const Kind& o : kAllKinds)
            for (double d : {0.0, 150.0, 700.0, 2500.0}) {
                if (s == o) continue;
                const double x = exclusion_distance(s, o, d, p);
                ASSERT_GE(x, 0.0);
                const double serving = mean_received_power(d, s.bs, s.link, p);
                if (x == 0.0) {
                    EXPECT_LE(mean_received_power(0.0, o.bs, o.link, p), serving * (1 + 1e-12));
                } else if (o.bs == BsKind::Dedicated && x == p.z_db) {
                    // lands on the gain drop: the boundary sits on the jump
                    EXPECT_LE(mean_received_power(x, o.bs, o.link, p), serving * (1 + 1e-12));
                    EXPECT_GE(mean_received_power(x - 1e-6, o.bs, o.link, p), serving * (1 - 1e-12));
                } else {
                    EXPECT_NEAR(mean_received_power(x, o.bs, o.link, p) / serving, 1.0, 1e-9);
                }
            }
}

TEST(NearestCdf, ZeroAtOriginAndMonotone) {
    const NetworkConfig cfg = urban_config();
    for (const Kind& k : kAllKinds) {
        EXPECT_EQ(nearest_cdf(k, 0.0, std::nullopt, cfg), 0.0);
        double prev = 0.0;
        for (double r = 50.0; r <= 4000.0; r += 250.0) {
            const double f = nearest_cdf(k, r, std::nullopt, cfg);
            EXPECT_GE(f, prev - 1e-12);
            EXPECT_LE(f, 1.0);
            prev = f;
        }
    }
}

TEST(NearestCdf, NoDedicatedBsWithoutPoints) {
    NetworkConfig cfg = urban_config();
    cfg.lambda_p = 0.0;
    EXPECT_EQ(nearest_cdf(kDbL, 2000.0, std::nullopt, cfg), 0.0);
    EXPECT_EQ(nearest_cdf(kDbN, 2000.0, pi / 3, cfg), 0.0);
    EXPECT_EQ(nearest_marginal_pdf(kDbL, 500.0, cfg), 0.0);
}

TEST(NearestCdf, RejectsNegativeDistance) {
    EXPECT_THROW(nearest_cdf(kTbsL, -1.0, std::nullopt, urban_config()), InvalidParameter);
}

TEST(NearestCdf, KnownLineRaisesDedicatedCdf) {
    const NetworkConfig cfg = urban_config();
    for (double r : {200.0, 800.0})
        EXPECT_GT(nearest_cdf(kDbL, r, 0.0, cfg), nearest_cdf(kDbL, r, std::nullopt, cfg));
}

// TBS: f(r) = 2 pi lambda r P_c(r) exp(-2 pi lambda int_0^r z P_c(z) dz).
TEST(NearestPdf, TbsClosedForm) {
    const NetworkConfig cfg = urban_config();
    for (const Kind& k : {kTbsL, kTbsN})
        for (double r : {100.0, 400.0, 1200.0, 3000.0}) {
            const double lam = cfg.lambda_tb;
            QuadPolicy q = cfg.quad.with_rel_tol(1e-12);
            auto pc = [&](double z) { return link_probability(k.link, z, BsKind::Tbs, cfg.channel); };
            const double e = 2.0 * pi * lam * integrate([&](double z) { return z * pc(z); }, 0.0, r, q).value;
            const double exact = 2.0 * pi * lam * r * pc(r) * std::exp(-e);
            EXPECT_NEAR(nearest_pdf(k, r, std::nullopt, cfg) / exact, 1.0, 1e-6) << r;
        }
}

TEST(NearestPdf, MatchesCdfDerivative) {
    const NetworkConfig cfg = urban_config();
    for (const Kind& k : kAllKinds)
        for (double r : {100.0, 400.0, 1200.0}) {
            auto F = [&](double x) { return nearest_cdf(k, x, std::nullopt, cfg); };
            EXPECT_NEAR(nearest_marginal_pdf(k, r, cfg) / derivative(F, r, 0.5), 1.0, 1e-5) << r;
        }
}

TEST(NearestPdf, JointAveragesToMarginal) {
    const NetworkConfig cfg = urban_config();
    for (const Kind& k : {kDbL, kDbN})
        for (double r : {150.0, 600.0, 2000.0}) {
            const double avg = expect_theta([&](double t) { return nearest_pdf(k, r, t, cfg); }, cfg.theta_nodes);
            EXPECT_NEAR(avg / nearest_marginal_pdf(k, r, cfg), 1.0, 1e-9);
        }
}

TEST(NearestPdf, IntegratesToCdf) {
    const NetworkConfig cfg = urban_config();
    for (const Kind& k : kAllKinds) {
        QuadPolicy q = cfg.quad.with_rel_tol(1e-6);
        q.abs_tol = 1e-9;
        const double mass = integrate([&](double r) { return nearest_marginal_pdf(k, r, cfg); }, 0.0, 1500.0, q).value;
        EXPECT_NEAR(mass, nearest_cdf(k, 1500.0, std::nullopt, cfg), 1e-5);
    }
}

TEST(Association, ZeroWithoutDedicatedBss) {
    NetworkConfig cfg = urban_config();
    cfg.lambda_p = 0.0;
    EXPECT_EQ(association_probability(kDbL, 100.0, 0.3, cfg), 0.0);
    EXPECT_GT(association_probability(kTbsL, 100.0, 0.0, cfg), 0.0);
}

TEST(Association, TotalProbabilityUrban) { EXPECT_NEAR(association_mass(urban_config()), 1.0, 2e-2); }

TEST(Association, TotalProbabilityTbsOnly) {
    NetworkConfig cfg = urban_config();
    cfg.lambda_p = 0.0;
    EXPECT_NEAR(association_mass(cfg), 1.0, 2e-2);
}
