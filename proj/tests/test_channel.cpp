#include <cmath>

#include <gtest/gtest.h>

#include "aerialnet/channel.hpp"

using namespace aerialnet;

TEST(LosProbability, OverheadUrban) { EXPECT_NEAR(los_probability(0.0, 70.0, 12.0, 0.11), 0.99776, 1e-5); }

TEST(LosProbability, FarLimit) {
    const double a = 12.0, b = 0.11;
    EXPECT_NEAR(los_probability(1e9, 70.0, a, b), 1.0 / (1.0 + a * std::exp(a * b)), 1e-6);
}

TEST(LosProbability, MonotoneDecreasingInDistance) {
    double prev = 1.0;
    for (double d = 0.0; d <= 10000.0; d += 50.0) {
        const double p = los_probability(d, 70.0, 12.0, 0.11);
        EXPECT_LE(p, prev + 1e-15);
        prev = p;
    }
}

TEST(LosProbability, RejectsNonPositiveHeight) {
    EXPECT_THROW(los_probability(10.0, 0.0, 12.0, 0.11), InvalidParameter);
    EXPECT_THROW(los_probability(10.0, -5.0, 12.0, 0.11), InvalidParameter);
}

TEST(LinkProbability, StatesSumToOne) {
    const ChannelParams p;
    for (BsKind bs : {BsKind::Tbs, BsKind::Dedicated})
        for (double d : {0.0, 10.0, 300.0, 5000.0, 1e6})
            EXPECT_NEAR(link_probability(LinkKind::LoS, d, bs, p) + link_probability(LinkKind::NLoS, d, bs, p), 1.0,
                        1e-14);
}

// Rural constants: P_n stays well resolved near overhead.
TEST(LinkProbability, NlosResolvedWithoutCancellation) {
    ChannelParams p;
    p.a = 4.88;
    p.b = 0.43;
    const double pn = link_probability(LinkKind::NLoS, 0.0, BsKind::Dedicated, p);
    const double q = 4.88 * std::exp(-0.43 * (90.0 - 4.88));
    EXPECT_NEAR(pn / (q / (1.0 + q)), 1.0, 1e-12);
}

TEST(AntennaGain, Piecewise) {
    ChannelParams p;
    EXPECT_EQ(antenna_gain(100.0, p), p.g_m);
    EXPECT_EQ(antenna_gain(533.999, p), p.g_m);
    EXPECT_EQ(antenna_gain(534.0, p), p.g_s);
    EXPECT_EQ(antenna_gain(1000.0, p), p.g_s);
    EXPECT_EQ(bs_gain(100.0, BsKind::Tbs, p), p.g_s);
    EXPECT_EQ(bs_gain(100.0, BsKind::Dedicated, p), p.g_m);
}

TEST(MeanReceivedPower, Examples) {
    ChannelParams p;
    EXPECT_NEAR(mean_received_power(0.0, BsKind::Tbs, LinkKind::LoS, p), std::pow(70.0, -2.1), 1e-18);
    EXPECT_NEAR(mean_received_power(0.0, BsKind::Dedicated, LinkKind::LoS, p), 10.0 * std::pow(90.0, -2.1), 1e-18);
    EXPECT_NEAR(mean_received_power(1000.0, BsKind::Dedicated, LinkKind::NLoS, p),
                0.01 * std::pow(1000.0 * 1000.0 + 8100.0, -2.0), 1e-24);
}

TEST(MeanReceivedPower, GainDropAtBoundary) {
    ChannelParams p;
    const double before = mean_received_power(p.z_db - 1e-9, BsKind::Dedicated, LinkKind::LoS, p);
    const double after = mean_received_power(p.z_db, BsKind::Dedicated, LinkKind::LoS, p);
    EXPECT_NEAR(before / after, p.g_m / p.g_s, 1e-6);
}

TEST(MeanReceivedPower, DecreasingWithinPieces) {
    ChannelParams p;
    for (LinkKind c : {LinkKind::LoS, LinkKind::NLoS})
        for (double d = 0.0; d < 2000.0; d += 10.0) {
            if (d + 10.0 >= p.z_db && d < p.z_db) continue;
            EXPECT_GT(mean_received_power(d, BsKind::Dedicated, c, p),
                      mean_received_power(d + 10.0, BsKind::Dedicated, c, p));
        }
}

class FadingMoments : public ::testing::TestWithParam<int> {};

TEST_P(FadingMoments, UnitMeanVarianceOneOverM) {
    const int m = GetParam();
    RandomStream rng(77, m);
    const int n = 200000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_fading(m, rng);
        ASSERT_GE(x, 0.0);
        s += x;
        ss += x * x;
    }
    const double mean = s / n, var = ss / n - mean * mean;
    EXPECT_NEAR(mean, 1.0, 4.0 * std::sqrt(1.0 / m / n));
    EXPECT_NEAR(var, 1.0 / m, 0.02 / m * 3.0);
}

INSTANTIATE_TEST_SUITE_P(Shapes, FadingMoments, ::testing::Values(1, 3, 12));

TEST(SampleFading, RejectsZeroShape) {
    RandomStream rng(1);
    EXPECT_THROW(sample_fading(0, rng), InvalidParameter);
}

TEST(ChannelParams, ValidateRejectsBadHeights) {
    ChannelParams p;
    p.h_u = 20.0;
    EXPECT_THROW(p.validate(), InvalidParameter);
}
