#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "aerialnet/channel.hpp"
#include "aerialnet/config.hpp"
#include "aerialnet/numerics.hpp"

namespace aerialnet {

namespace detail {

inline QuadPolicy tight_policy(const NetworkConfig& cfg, double rel) {
    QuadPolicy q = cfg.quad;
    q.rel_tol = std::min(q.rel_tol, rel);
    q.abs_tol = 1e-18;
    q.breakpoints.clear();
    return q;
}

} // namespace detail

// Sup of {x : mean power of a (bs, c) transmitter at horizontal distance x >= power}.
inline double equal_power_radius(BsKind bs, LinkKind c, double power, const ChannelParams& p) {
    auto radius = [&](double gain) {
        const double dh = p.dh(bs);
        const double d2 = std::pow(p.eta(c) * p.rho(bs) * gain / power, 2.0 / p.alpha(c)) - dh * dh;
        return d2 > 0.0 ? std::sqrt(d2) : 0.0;
    };
    if (bs == BsKind::Tbs) return radius(p.g_s);
    const double x_main = radius(p.g_m);
    if (x_main < p.z_db) return x_main;
    return std::max(p.z_db, radius(p.g_s));
}

// Horizontal radius around the UAV inside which a BS of kind `other` would
// beat a serving BS of kind `serving` at distance d on mean received power.
inline double exclusion_distance(Kind serving, Kind other, double d, const ChannelParams& p) {
    if (serving == other) return d;
    return equal_power_radius(other.bs, other.link, mean_received_power(d, serving.bs, serving.link, p), p);
}

// 2 pi lambda_tb int_0^r z P_c(z) dz
inline double tbs_void_exponent(LinkKind c, double r, const NetworkConfig& cfg) {
    r = std::min(r, cfg.truncation_radius());
    if (cfg.lambda_tb <= 0.0 || r <= 0.0) return 0.0;
    const ChannelParams& p = cfg.channel;
    auto f = [&](double z) { return z * link_probability(c, z, BsKind::Tbs, p); };
    const double v = with_context("tbs void exponent", [&] {
        return integrate_tail(f, 0.0, r, 100.0, detail::tight_policy(cfg, 1e-12)).value;
    });
    return 2.0 * pi * cfg.lambda_tb * v;
}

// Mass of c-type dedicated BSs on a line at offset y inside B(0, r).
inline double typical_line_exponent(LinkKind c, double r, double y, const NetworkConfig& cfg) {
    r = std::min(r, cfg.truncation_radius());
    const double half = std::sqrt(std::max(0.0, r * r - y * y));
    if (cfg.lambda_p <= 0.0 || half <= 0.0) return 0.0;
    const ChannelParams& p = cfg.channel;
    auto f = [&](double z) { return link_probability(c, std::hypot(z, y), BsKind::Dedicated, p); };
    const double v = with_context("typical line exponent", [&] {
        return integrate(f, 0.0, half, detail::tight_policy(cfg, 1e-12)).value;
    });
    return 2.0 * cfg.lambda_p * v;
}

// Void exponent of c-type dedicated BSs inside B(0, r) over all lines of the
// process, with rho = r sin(phi).
inline double lines_void_exponent(LinkKind c, double r, const NetworkConfig& cfg) {
    r = std::min(r, cfg.truncation_radius());
    if (cfg.lambda_l <= 0.0 || cfg.lambda_p <= 0.0 || r <= 0.0) return 0.0;
    const ChannelParams& p = cfg.channel;
    const QuadPolicy inner = detail::tight_policy(cfg, 1e-13);
    auto outer = [&](double phi) {
        const double rho = r * std::sin(phi);
        const double half = r * std::cos(phi);
        if (half <= 0.0) return 0.0;
        auto g = [&](double z) { return link_probability(c, std::hypot(z, rho), BsKind::Dedicated, p); };
        const double mass = 2.0 * cfg.lambda_p * integrate(g, 0.0, half, inner).value;
        return -std::expm1(-mass) * half;
    };
    const double v = with_context("line void exponent", [&] {
        return integrate(outer, 0.0, 0.5 * pi, detail::tight_policy(cfg, 1e-10)).value;
    });
    return 2.0 * pi * cfg.lambda_l * v;
}

// P(no BS of `kind` within horizontal distance r). For dedicated kinds an
// optional line offset adds the known line through a dedicated BS.
inline double void_probability(Kind kind, double r, std::optional<double> line_offset, const NetworkConfig& cfg) {
    if (r <= 0.0) return 1.0;
    if (kind.bs == BsKind::Tbs) return std::exp(-tbs_void_exponent(kind.link, r, cfg));
    double e = lines_void_exponent(kind.link, r, cfg);
    if (line_offset) e += typical_line_exponent(kind.link, r, *line_offset, cfg);
    return std::exp(-e);
}

// Nearest-distance CDF. With theta the dedicated CDF includes the line at
// offset r sin(theta); without it, the unconditioned law.
inline double nearest_cdf(Kind kind, double r, std::optional<double> theta, const NetworkConfig& cfg) {
    if (!(r >= 0.0)) throw InvalidParameter("nearest_cdf: r must be non-negative");
    if (r == 0.0) return 0.0;
    std::optional<double> offset;
    if (kind.bs == BsKind::Dedicated && theta) offset = r * std::sin(*theta);
    return -std::expm1(std::log(void_probability(kind, r, offset, cfg)));
}

// Weights e^{-T(r, theta_i)} / E[e^{-T}] over the theta rule: the conditional
// law of the line angle of a dedicated BS found at distance r.
inline std::vector<double> line_angle_tilt(LinkKind c, double r, const NetworkConfig& cfg) {
    const ThetaRule& rule = theta_rule(cfg.theta_nodes);
    std::vector<double> w(rule.theta.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-typical_line_exponent(c, r, r * std::sin(rule.theta[i]), cfg));
        norm += rule.weight[i] * w[i];
    }
    for (auto& x : w) x /= norm;
    return w;
}

inline double line_angle_tilt(LinkKind c, double r, double theta, const NetworkConfig& cfg) {
    const double num = std::exp(-typical_line_exponent(c, r, r * std::sin(theta), cfg));
    const double den = expect_theta(
        [&](double t) { return std::exp(-typical_line_exponent(c, r, r * std::sin(t), cfg)); }, cfg.theta_nodes);
    return num / den;
}

// Marginal nearest-distance density -d/dr P(void): closed form for TBSs, the
// derivative of the line exponent for dedicated BSs.
inline double nearest_marginal_pdf(Kind kind, double r, const NetworkConfig& cfg) {
    if (r <= 0.0 || r >= cfg.truncation_radius()) return 0.0;
    if (kind.bs == BsKind::Tbs) {
        if (cfg.lambda_tb <= 0.0) return 0.0;
        return 2.0 * pi * cfg.lambda_tb * r * link_probability(kind.link, r, BsKind::Tbs, cfg.channel) *
               std::exp(-tbs_void_exponent(kind.link, r, cfg));
    }
    if (cfg.dedicated_density() <= 0.0) return 0.0;
    const double h = std::min({1.0, 0.25 * r, 0.25 * (cfg.truncation_radius() - r)});
    auto E = [&](double x) { return lines_void_exponent(kind.link, x, cfg); };
    return std::max(0.0, derivative(E, r, h)) * std::exp(-E(r));
}

// Nearest-distance density; for dedicated kinds with theta this is the joint
// density of (R, theta) relative to the uniform theta measure.
inline double nearest_pdf(Kind kind, double r, std::optional<double> theta, const NetworkConfig& cfg) {
    if (!(r >= 0.0)) throw InvalidParameter("nearest_pdf: r must be non-negative");
    const double f = nearest_marginal_pdf(kind, r, cfg);
    if (kind.bs == BsKind::Tbs || !theta || f == 0.0) return f;
    return f * line_angle_tilt(kind.link, r, *theta, cfg);
}

// Probability that no BS of the other three kinds beats a (kind) BS at
// distance d on mean power. theta is the serving line angle (dedicated only).
inline double association_probability(Kind kind, double d, double theta, const NetworkConfig& cfg) {
    if (kind.bs == BsKind::Dedicated && cfg.dedicated_density() <= 0.0) return 0.0;
    if (kind.bs == BsKind::Tbs && cfg.lambda_tb <= 0.0) return 0.0;
    double a = 1.0;
    for (const Kind& o : kAllKinds) {
        if (o == kind) continue;
        const double x = exclusion_distance(kind, o, d, cfg.channel);
        std::optional<double> offset;
        if (o.bs == BsKind::Dedicated && kind.bs == BsKind::Dedicated) offset = d * std::sin(theta);
        a *= void_probability(o, x, offset, cfg);
    }
    return a;
}

} // namespace aerialnet
