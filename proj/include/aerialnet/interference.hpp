#pragma once

#include <algorithm>
#include <cmath>

#include "aerialnet/channel.hpp"
#include "aerialnet/config.hpp"
#include "aerialnet/distlaw.hpp"
#include "aerialnet/numerics.hpp"

namespace aerialnet {

struct LaplaceContext {
    Kind serving;
    double d = 0.0;          // horizontal serving distance, m
    double theta = pi / 4;   // serving line angle, dedicated serving only
};

// Lower limits of the interference integrals.
struct IntegrationBounds {
    bool has_typical = false;
    double v0_l = 0.0, v0_n = 0.0;   // along the serving line, from the foot of the perpendicular
    double vtb_l = 0.0, vtb_n = 0.0; // TBS exclusion radii
    double v1_l = 0.0, v1_n = 0.0;   // dedicated exclusion radii for the other lines

    double v0(LinkKind c) const { return c == LinkKind::LoS ? v0_l : v0_n; }
    double vtb(LinkKind c) const { return c == LinkKind::LoS ? vtb_l : vtb_n; }
    double v1(LinkKind c) const { return c == LinkKind::LoS ? v1_l : v1_n; }
};

inline IntegrationBounds integration_bounds(const LaplaceContext& ctx, const NetworkConfig& cfg) {
    const ChannelParams& p = cfg.channel;
    IntegrationBounds b;
    b.vtb_l = exclusion_distance(ctx.serving, {BsKind::Tbs, LinkKind::LoS}, ctx.d, p);
    b.vtb_n = exclusion_distance(ctx.serving, {BsKind::Tbs, LinkKind::NLoS}, ctx.d, p);
    b.v1_l = exclusion_distance(ctx.serving, {BsKind::Dedicated, LinkKind::LoS}, ctx.d, p);
    b.v1_n = exclusion_distance(ctx.serving, {BsKind::Dedicated, LinkKind::NLoS}, ctx.d, p);
    if (ctx.serving.bs == BsKind::Dedicated) {
        b.has_typical = true;
        const double y = ctx.d * std::sin(ctx.theta);
        auto along = [&](double v) { return std::sqrt(std::max(0.0, v * v - y * y)); };
        const double same = ctx.d * std::cos(ctx.theta);
        b.v0_l = ctx.serving.link == LinkKind::LoS ? same : along(b.v1_l);
        b.v0_n = ctx.serving.link == LinkKind::NLoS ? same : along(b.v1_n);
    }
    return b;
}

namespace detail {

// 1 - (m / (m + x))^m without cancellation for small x.
inline double one_minus_nakagami(int m, double x) { return -std::expm1(-m * std::log1p(x / m)); }

inline double interferer_term(BsKind bs, LinkKind c, double s, double horizontal, const ChannelParams& p) {
    return s * mean_received_power(horizontal, bs, c, p);
}

} // namespace detail

// which = 1: TBS interferer at horizontal distance x; 2 and 3: dedicated
// interferer (general lines / serving line) at horizontal distance x.
inline double kappa(int which, LinkKind c, double s, double x, const ChannelParams& p) {
    if (which < 1 || which > 3) throw InvalidParameter("kappa: which must be 1, 2 or 3");
    const BsKind bs = which == 1 ? BsKind::Tbs : BsKind::Dedicated;
    const int m = p.m(c);
    return std::pow(m / (m + detail::interferer_term(bs, c, s, x, p)), m);
}

namespace detail {

inline double tbs_interference_exponent(LinkKind c, double s, double v, const NetworkConfig& cfg) {
    const double R = cfg.truncation_radius();
    if (cfg.lambda_tb <= 0.0 || v >= R) return 0.0;
    const ChannelParams& p = cfg.channel;
    const int m = p.m(c);
    auto f = [&](double z) {
        return one_minus_nakagami(m, interferer_term(BsKind::Tbs, c, s, z, p)) * z *
               link_probability(c, z, BsKind::Tbs, p);
    };
    QuadPolicy q = cfg.quad;
    q.breakpoints.clear();
    return 2.0 * pi * cfg.lambda_tb * integrate_tail(f, v, R, 100.0, q).value;
}

// Mass 2 lambda_p int (1 - kappa2) P_c du over the chord of B(0, R) on a line at
// offset rho, excluding |u| < u0.
inline double line_chord_mass(LinkKind c, double s, double rho, double u0, const NetworkConfig& cfg,
                              const QuadPolicy& q) {
    const double R = cfg.truncation_radius();
    const double umax = std::sqrt(std::max(0.0, R * R - rho * rho));
    if (u0 >= umax) return 0.0;
    const ChannelParams& p = cfg.channel;
    const int m = p.m(c);
    auto g = [&](double u) {
        const double x = std::hypot(u, rho);
        return one_minus_nakagami(m, interferer_term(BsKind::Dedicated, c, s, x, p)) *
               link_probability(c, x, BsKind::Dedicated, p);
    };
    QuadPolicy qq = q;
    qq.breakpoints.clear();
    if (rho < p.z_db) qq.breakpoints.push_back(std::sqrt(p.z_db * p.z_db - rho * rho));
    return 2.0 * cfg.lambda_p * integrate_tail(g, u0, umax, 100.0, qq).value;
}

inline double lines_interference_exponent(LinkKind c, double s, double v1, const NetworkConfig& cfg) {
    const double R = cfg.truncation_radius();
    if (cfg.lambda_l <= 0.0 || cfg.lambda_p <= 0.0 || v1 >= R) return 0.0;
    QuadPolicy outer = cfg.quad;
    outer.breakpoints.clear();
    const QuadPolicy inner = outer.with_rel_tol(outer.rel_tol * 0.1);
    double total = 0.0;
    if (v1 > 0.0) {
        // Lines crossing the exclusion disk, rho = v1 sin(phi).
        auto crossing = [&](double phi) {
            const double rho = v1 * std::sin(phi);
            return -std::expm1(-line_chord_mass(c, s, rho, v1 * std::cos(phi), cfg, inner)) * v1 * std::cos(phi);
        };
        total += integrate(crossing, 0.0, 0.5 * pi, outer).value;
    }
    auto missing = [&](double rho) { return -std::expm1(-line_chord_mass(c, s, rho, 0.0, cfg, inner)); };
    // The chord mass has square-root edges as rho -> z from below and as
    // rho -> R; both are removed with rho = edge - t^2.
    auto edge = [&](double lo, double hi) {
        auto g = [&](double t) { return missing(hi - t * t) * 2.0 * t; };
        return integrate(g, 0.0, std::sqrt(hi - lo), outer).value;
    };
    const double z = cfg.channel.z_db;
    double lo = v1;
    if (v1 < z && z < R) {
        total += edge(v1, z);
        lo = z;
    }
    const double far = std::max(lo, 0.5 * R);
    total += integrate_tail(missing, lo, far, 100.0, outer).value;
    total += edge(far, R);
    return 2.0 * pi * cfg.lambda_l * total;
}

} // namespace detail

// Interference from all TBSs and from dedicated BSs on lines other than the
// serving line, outside the association exclusion radii.
inline double laplace_general(double s, const LaplaceContext& ctx, const NetworkConfig& cfg) {
    if (s < 0.0) throw InvalidParameter("laplace_general: s must be non-negative");
    if (s == 0.0) return 1.0;
    const IntegrationBounds b = integration_bounds(ctx, cfg);
    return with_context("laplace_general", [&] {
        double e = 0.0;
        for (LinkKind c : {LinkKind::LoS, LinkKind::NLoS}) {
            e += detail::tbs_interference_exponent(c, s, b.vtb(c), cfg);
            e += detail::lines_interference_exponent(c, s, b.v1(c), cfg);
        }
        return std::exp(-e);
    });
}

inline double typical_interference_exponent(LinkKind c, double s, double y, double v0, const NetworkConfig& cfg) {
    const double R = cfg.truncation_radius();
    const double xmax = std::sqrt(std::max(0.0, R * R - y * y));
    if (cfg.lambda_p <= 0.0 || v0 >= xmax) return 0.0;
    const ChannelParams& p = cfg.channel;
    const int m = p.m(c);
    auto f = [&](double x) {
        const double h = std::hypot(x, y);
        return detail::one_minus_nakagami(m, detail::interferer_term(BsKind::Dedicated, c, s, h, p)) *
               link_probability(c, h, BsKind::Dedicated, p);
    };
    QuadPolicy q = cfg.quad;
    q.breakpoints.clear();
    if (y < p.z_db) q.breakpoints.push_back(std::sqrt(p.z_db * p.z_db - y * y));
    return 2.0 * cfg.lambda_p * integrate_tail(f, v0, xmax, 100.0, q).value;
}

// Interference from the other dedicated BSs on the serving line.
inline double laplace_typical(double s, const LaplaceContext& ctx, const NetworkConfig& cfg) {
    if (ctx.serving.bs != BsKind::Dedicated)
        throw ContractViolation("laplace_typical requires a dedicated serving BS");
    if (s < 0.0) throw InvalidParameter("laplace_typical: s must be non-negative");
    if (s == 0.0) return 1.0;
    const IntegrationBounds b = integration_bounds(ctx, cfg);
    const double y = ctx.d * std::sin(ctx.theta);
    return with_context("laplace_typical", [&] {
        double e = 0.0;
        for (LinkKind c : {LinkKind::LoS, LinkKind::NLoS}) e += typical_interference_exponent(c, s, y, b.v0(c), cfg);
        return std::exp(-e);
    });
}

inline double laplace_interference(double s, const LaplaceContext& ctx, const NetworkConfig& cfg,
                                   bool with_noise = false) {
    double v = laplace_general(s, ctx, cfg);
    if (ctx.serving.bs == BsKind::Dedicated) v *= laplace_typical(s, ctx, cfg);
    if (with_noise) v *= std::exp(-s * cfg.channel.sigma2);
    return v;
}

} // namespace aerialnet
