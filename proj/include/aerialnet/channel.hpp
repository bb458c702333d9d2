#pragma once

#include <cmath>
#include <random>

#include "aerialnet/errors.hpp"
#include "aerialnet/rng.hpp"
#include "aerialnet/units.hpp"

namespace aerialnet {

enum class LinkKind { LoS, NLoS };
enum class BsKind { Tbs, Dedicated };

struct Kind {
    BsKind bs = BsKind::Tbs;
    LinkKind link = LinkKind::LoS;
    friend bool operator==(Kind, Kind) = default;
};

inline constexpr Kind kAllKinds[4] = {
    {BsKind::Tbs, LinkKind::LoS},
    {BsKind::Tbs, LinkKind::NLoS},
    {BsKind::Dedicated, LinkKind::LoS},
    {BsKind::Dedicated, LinkKind::NLoS},
};

inline const char* to_string(BsKind b) { return b == BsKind::Tbs ? "tbs" : "dedicated"; }
inline const char* to_string(LinkKind c) { return c == LinkKind::LoS ? "los" : "nlos"; }
inline LinkKind other(LinkKind c) { return c == LinkKind::LoS ? LinkKind::NLoS : LinkKind::LoS; }

// Linear units; lengths in m, powers in W.
struct ChannelParams {
    double a = 12.0;
    double b = 0.11;
    double alpha_l = 2.1;
    double alpha_n = 4.0;
    double eta_l = 1.0;
    double eta_n = 0.01;
    int m_l = 3;
    int m_n = 1;
    double rho_tb = 1.0;
    double rho_db = 1.0;
    double g_m = 10.0;
    double g_s = 1.0;
    double z_db = 534.0;
    double h_tb = 30.0;
    double h_db = 10.0;
    double h_u = 100.0;
    double sigma2 = 1e-9;

    double dh_db() const { return h_u - h_db; }
    double dh_tb() const { return h_u - h_tb; }
    double dh(BsKind bs) const { return bs == BsKind::Tbs ? dh_tb() : dh_db(); }
    double alpha(LinkKind c) const { return c == LinkKind::LoS ? alpha_l : alpha_n; }
    double eta(LinkKind c) const { return c == LinkKind::LoS ? eta_l : eta_n; }
    int m(LinkKind c) const { return c == LinkKind::LoS ? m_l : m_n; }
    double rho(BsKind bs) const { return bs == BsKind::Tbs ? rho_tb : rho_db; }

    void validate() const {
        auto req = [](bool ok, const char* msg) {
            if (!ok) throw InvalidParameter(msg);
        };
        req(alpha_l > 0 && alpha_n >= alpha_l, "need alpha_n >= alpha_l > 0");
        req(eta_n > 0 && eta_n <= eta_l, "need 0 < eta_n <= eta_l");
        req(m_l >= 1 && m_n >= 1, "Nakagami shapes must be >= 1");
        req(h_u > h_tb && h_u > h_db, "UAV height must exceed both BS heights");
        req(z_db > 0, "z_db must be positive");
        req(g_s > 0 && g_m >= g_s, "need g_m >= g_s > 0");
        req(rho_tb > 0 && rho_db > 0, "transmit powers must be positive");
        req(sigma2 >= 0, "noise power must be non-negative");
        req(a > 0 && b > 0, "environment constants must be positive");
    }
};

namespace detail {
// Odds of NLoS against LoS.
inline double nlos_odds(double d, double delta_h, double a, double b) {
    if (!(delta_h > 0.0)) throw InvalidParameter("los_probability: delta_h must be positive");
    const double elevation_deg = (180.0 / pi) * std::atan2(delta_h, d);
    return a * std::exp(-b * (elevation_deg - a));
}
} // namespace detail

inline double los_probability(double d, double delta_h, double a, double b) {
    return 1.0 / (1.0 + detail::nlos_odds(d, delta_h, a, b));
}

// Probability that a BS of kind `bs` at horizontal distance d is in state c.
inline double link_probability(LinkKind c, double d, BsKind bs, const ChannelParams& p) {
    const double q = detail::nlos_odds(d, p.dh(bs), p.a, p.b);
    return c == LinkKind::LoS ? 1.0 / (1.0 + q) : q / (1.0 + q);
}

inline double antenna_gain(double d, const ChannelParams& p) { return d < p.z_db ? p.g_m : p.g_s; }

inline double bs_gain(double d, BsKind bs, const ChannelParams& p) {
    return bs == BsKind::Tbs ? p.g_s : antenna_gain(d, p);
}

inline double mean_received_power(double d, BsKind bs, LinkKind c, const ChannelParams& p) {
    const double dh = p.dh(bs);
    return p.eta(c) * p.rho(bs) * bs_gain(d, bs, p) * std::pow(d * d + dh * dh, -0.5 * p.alpha(c));
}

// Unit-mean Gamma(m, 1/m) power gain.
inline double sample_fading(int m, RandomStream& rng) {
    if (m < 1) throw InvalidParameter("sample_fading: shape must be >= 1");
    if (m <= 8) {
        double prod = 1.0;
        for (int i = 0; i < m; ++i) prod *= rng.uniform();
        return -std::log(prod) / m;
    }
    std::gamma_distribution<double> dist(m, 1.0 / m);
    return dist(rng);
}

} // namespace aerialnet
