#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "aerialnet/channel.hpp"
#include "aerialnet/config.hpp"
#include "aerialnet/distlaw.hpp"
#include "aerialnet/interference.hpp"
#include "aerialnet/numerics.hpp"

namespace aerialnet {

// (m!)^(-1/m)
inline double beta2(int m) {
    if (m < 1) throw InvalidParameter("beta2: m must be >= 1");
    return std::exp(-std::lgamma(m + 1.0) / m);
}

inline double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

// Laplace argument of the k-th term of the success probability.
inline double xi(int k, double tau, double d, Kind serving, const ChannelParams& p) {
    const int m = p.m(serving.link);
    return k * beta2(m) * m * tau / mean_received_power(d, serving.bs, serving.link, p);
}

namespace detail {

// Terms C(m,k) (-1)^(k+1) L_gen(xi_k) e^(-xi_k sigma^2) for k = 1..m; the
// serving-line factor is applied per theta by the caller.
struct SuccessTerms {
    std::vector<double> s;
    std::vector<double> weight;
};

inline SuccessTerms success_terms(double tau, const LaplaceContext& ctx, const NetworkConfig& cfg) {
    const ChannelParams& p = cfg.channel;
    const int m = p.m(ctx.serving.link);
    SuccessTerms t;
    for (int k = 1; k <= m; ++k) {
        const double s = xi(k, tau, ctx.d, ctx.serving, p);
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double noise = std::exp(-s * p.sigma2);
        t.s.push_back(s);
        t.weight.push_back(noise == 0.0 ? 0.0 : sign * binomial(m, k) * noise * laplace_general(s, ctx, cfg));
    }
    return t;
}

inline double combine(const SuccessTerms& t, const LaplaceContext& ctx, const NetworkConfig& cfg) {
    double v = 0.0;
    for (std::size_t k = 0; k < t.s.size(); ++k) {
        if (t.weight[k] == 0.0) continue;
        double typ = ctx.serving.bs == BsKind::Dedicated ? laplace_typical(t.s[k], ctx, cfg) : 1.0;
        v += t.weight[k] * typ;
    }
    return std::clamp(v, 0.0, 1.0);
}

} // namespace detail

// P(SINR > tau) given the serving link in ctx.
inline double success_probability(double tau, const LaplaceContext& ctx, const NetworkConfig& cfg) {
    if (!(tau > 0.0)) throw InvalidParameter("success_probability: tau must be positive");
    return detail::combine(detail::success_terms(tau, ctx, cfg), ctx, cfg);
}

struct CoverageBreakdown {
    double p_tb_l = 0.0;
    double p_tb_n = 0.0;
    double p_db_l = 0.0;
    double p_db_n = 0.0;
    double total = 0.0;

    double& part(Kind k) {
        if (k.bs == BsKind::Tbs) return k.link == LinkKind::LoS ? p_tb_l : p_tb_n;
        return k.link == LinkKind::LoS ? p_db_l : p_db_n;
    }
};

// Serving distances at which some exclusion radius hits 0 or z_db; the
// integrand has kinks there.
inline std::vector<double> coverage_breakpoints(Kind serving, const NetworkConfig& cfg) {
    const ChannelParams& p = cfg.channel;
    std::vector<double> out;
    if (serving.bs == BsKind::Dedicated) out.push_back(p.z_db);
    for (const Kind& o : kAllKinds) {
        if (o == serving) continue;
        std::vector<double> levels{mean_received_power(0.0, o.bs, o.link, p)};
        if (o.bs == BsKind::Dedicated) {
            const double dh = p.dh_db(), z = p.z_db;
            const double base = p.eta(o.link) * p.rho_db * std::pow(z * z + dh * dh, -0.5 * p.alpha(o.link));
            levels.push_back(base * p.g_m);
            levels.push_back(base * p.g_s);
        }
        for (double level : levels) {
            const double d = equal_power_radius(serving.bs, serving.link, level, p);
            if (d > 0.0 && d < cfg.truncation_radius()) out.push_back(d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline double coverage_part(Kind kind, double tau, const NetworkConfig& cfg) {
    if (kind.bs == BsKind::Tbs && cfg.lambda_tb <= 0.0) return 0.0;
    if (kind.bs == BsKind::Dedicated && cfg.dedicated_density() <= 0.0) return 0.0;
    const ThetaRule& rule = theta_rule(cfg.theta_nodes);
    auto integrand = [&](double r) -> double {
        const double f = nearest_marginal_pdf(kind, r, cfg);
        if (f <= 0.0) return 0.0;
        if (kind.bs == BsKind::Tbs) {
            const double a = association_probability(kind, r, 0.0, cfg);
            if (f * a < 1e-16) return 0.0;
            return f * a * success_probability(tau, {kind, r, 0.0}, cfg);
        }
        const std::vector<double> tilt = line_angle_tilt(kind.link, r, cfg);
        std::vector<double> weight(rule.theta.size());
        double mass = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i) {
            weight[i] = rule.weight[i] * tilt[i] * association_probability(kind, r, rule.theta[i], cfg);
            mass += weight[i];
        }
        if (f * mass < 1e-16) return 0.0;
        const detail::SuccessTerms terms = detail::success_terms(tau, {kind, r, pi / 4}, cfg);
        double v = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i) {
            if (weight[i] == 0.0) continue;
            v += weight[i] * detail::combine(terms, {kind, r, rule.theta[i]}, cfg);
        }
        return f * v;
    };
    QuadPolicy q = cfg.quad;
    q.rel_tol = 10.0 * cfg.quad.rel_tol;
    q.abs_tol = 10.0 * cfg.quad.rel_tol;
    q.breakpoints = coverage_breakpoints(kind, cfg);
    char label[64];
    std::snprintf(label, sizeof label, "coverage part %s/%s", to_string(kind.bs), to_string(kind.link));
    return with_context(label, [&] { return integrate(integrand, 0.0, cfg.truncation_radius(), q).value; });
}

inline CoverageBreakdown coverage_probability(double tau, const NetworkConfig& cfg) {
    if (!(tau > 0.0)) throw InvalidParameter("coverage_probability: tau must be positive");
    CoverageBreakdown out;
    for (const Kind& k : kAllKinds) out.part(k) = coverage_part(k, tau, cfg);
    out.total = out.p_tb_l + out.p_tb_n + out.p_db_l + out.p_db_n;
    return out;
}

// E[SINR] of one serving link kind at distance d, averaged over the serving
// line angle: integral of the success probability over tau.
inline double mean_link_sinr(Kind kind, double d, const NetworkConfig& cfg) {
    const ThetaRule& rule = theta_rule(cfg.theta_nodes);
    auto ps = [&](double tau) {
        const detail::SuccessTerms terms = detail::success_terms(tau, {kind, d, pi / 4}, cfg);
        if (kind.bs == BsKind::Tbs) return detail::combine(terms, {kind, d, 0.0}, cfg);
        double v = 0.0;
        for (std::size_t i = 0; i < rule.theta.size(); ++i)
            v += rule.weight[i] * detail::combine(terms, {kind, d, rule.theta[i]}, cfg);
        return v;
    };
    const double tau_lo = 1e-9;
    double tau_hi = std::max(1.0, mean_received_power(d, kind.bs, kind.link, cfg.channel) /
                                      std::max(cfg.channel.sigma2, 1e-300));
    for (int i = 0; i < 200 && ps(tau_hi) >= 1e-9; ++i) tau_hi *= 4.0;
    auto g = [&](double t) {
        const double tau = std::exp(t);
        return ps(tau) * tau;
    };
    QuadPolicy q = cfg.quad;
    q.breakpoints.clear();
    q.rel_tol = std::max(cfg.quad.rel_tol, 1e-5);
    q.abs_tol = 1e-12;
    return with_context("mean sinr", [&] {
        return tau_lo + integrate(g, std::log(tau_lo), std::log(tau_hi), q).value;
    });
}

inline double mean_sinr(double d, BsKind bs, const NetworkConfig& cfg) {
    if (!(d >= 0.0)) throw InvalidParameter("mean_sinr: d must be non-negative");
    double v = 0.0;
    for (LinkKind c : {LinkKind::LoS, LinkKind::NLoS}) {
        const double w = link_probability(c, d, bs, cfg.channel);
        if (w > 0.0) v += w * mean_link_sinr({bs, c}, d, cfg);
    }
    return v;
}

// Largest d with f(d) >= gamma for a function decreasing on [0, z) and on
// [z, dmax] (z = dmax for a single piece). Far piece first.
template <class F>
double invert_decreasing(F&& f, double gamma, double z, double dmax, double tol = 0.01) {
    auto solve = [&](double lo, double hi, double f_hi) {
        if (f_hi >= gamma) return hi;
        return bisect([&](double x) { return f(x) - gamma; }, lo, hi, tol);
    };
    if (z < dmax) {
        const double f_far0 = f(z);
        if (f_far0 >= gamma) return solve(z, dmax, f(dmax));
        if (f(0.0) < gamma) return 0.0;
        const double below = std::nextafter(z, 0.0);
        return solve(0.0, below, f(below));
    }
    if (f(0.0) < gamma) return 0.0;
    return solve(0.0, dmax, f(dmax));
}

inline double max_distance_for_sinr(double gamma, BsKind bs, const NetworkConfig& cfg, double dmax = -1.0) {
    if (!(gamma > 0.0)) throw InvalidParameter("max_distance_for_sinr: gamma must be positive");
    if (dmax <= 0.0) dmax = 0.5 * cfg.truncation_radius();
    const double z = bs == BsKind::Dedicated ? cfg.channel.z_db : dmax;
    return invert_decreasing([&](double d) { return mean_sinr(d, bs, cfg); }, gamma, z, dmax);
}

} // namespace aerialnet
