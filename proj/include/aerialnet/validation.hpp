#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aerialnet/coverage.hpp"
#include "aerialnet/distlaw.hpp"
#include "aerialnet/interference.hpp"
#include "aerialnet/montecarlo.hpp"
#include "aerialnet/numerics.hpp"
#include "aerialnet/trajectory.hpp"

namespace aerialnet {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// Kolmogorov-Smirnov distance between an empirical CDF (with its missing
// mass) and a continuous analytic CDF. F is evaluated exactly at every
// `stride`-th order statistic and interpolated monotonically in between.
template <class F>
double ks_statistic(const EmpiricalCdf& emp, F&& analytic, std::size_t stride = 50) {
    const std::size_t n = emp.distances.size();
    if (emp.total == 0) throw InvalidParameter("ks_statistic: empty sample");
    if (n == 0) return analytic(std::numeric_limits<double>::max());
    std::vector<double> xs{0.0}, ys{0.0};
    for (std::size_t i = 0; i < n; i += std::max<std::size_t>(stride, 1))
        if (emp.distances[i] > xs.back()) {
            xs.push_back(emp.distances[i]);
            ys.push_back(analytic(emp.distances[i]));
        }
    if (emp.distances.back() > xs.back()) {
        xs.push_back(emp.distances.back());
        ys.push_back(analytic(emp.distances.back()));
    }
    std::optional<Pchip> interp;
    if (xs.size() >= 2) interp.emplace(xs, ys);
    const double total = double(emp.total);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = interp ? (*interp)(emp.distances[i]) : analytic(emp.distances[i]);
        ks = std::max({ks, std::abs(f - i / total), std::abs(f - (i + 1) / total)});
    }
    return ks;
}

// Coarser budgets widen the KS gate to the 99% Kolmogorov quantile.
inline double ks_tolerance(std::uint64_t iterations) {
    return std::max(0.01, 1.63 / std::sqrt(double(iterations)));
}

inline CheckResult check_distance_law(Kind kind, const NetworkConfig& cfg, std::uint64_t iterations, std::uint64_t seed,
                                      unsigned workers = 1) {
    const EmpiricalCdf emp = empirical_distance_cdf(kind, cfg, iterations, seed, workers);
    const double ks = ks_statistic(emp, [&](double r) { return nearest_cdf(kind, r, std::nullopt, cfg); });
    CheckResult c;
    c.name = std::string("distance law ") + to_string(kind.bs) + "/" + to_string(kind.link);
    c.value = ks;
    c.tolerance = ks_tolerance(iterations);
    c.passed = ks <= c.tolerance;
    c.detail = "KS=" + std::to_string(ks) + " n=" + std::to_string(iterations) +
               " missing=" + std::to_string(emp.missing());
    return c;
}

// Laplace arguments probed per serving configuration: xi_1 at -10, 0, 10 dB.
inline std::vector<double> laplace_probe_points(const LaplaceContext& ctx, const ChannelParams& p) {
    std::vector<double> s;
    for (double tau_db : {-10.0, 0.0, 10.0}) s.push_back(xi(1, db_to_linear(tau_db), ctx.d, ctx.serving, p));
    return s;
}

inline std::vector<CheckResult> check_laplace(const LaplaceContext& ctx, const NetworkConfig& cfg,
                                              std::uint64_t iterations, std::uint64_t seed, double sigmas = 3.0) {
    std::vector<CheckResult> out;
    const std::string tag = std::string(to_string(ctx.serving.bs)) + "/" + to_string(ctx.serving.link);
    const bool typical = ctx.serving.bs == BsKind::Dedicated;

    CheckResult zero;
    zero.name = "laplace at zero " + tag;
    zero.value = std::abs(laplace_general(0.0, ctx, cfg) - 1.0);
    if (typical) zero.value = std::max(zero.value, std::abs(laplace_typical(0.0, ctx, cfg) - 1.0));
    zero.tolerance = 1e-9;
    zero.passed = zero.value <= zero.tolerance;
    out.push_back(zero);

    const std::vector<double> s = laplace_probe_points(ctx, cfg.channel);
    const std::vector<LaplaceEstimate> mc = estimate_laplace(s, ctx, cfg, iterations, seed);
    auto add = [&](const char* part, double s_value, double analytic, const MeanEstimate& est) {
        CheckResult c;
        c.name = std::string("laplace ") + part + " " + tag + " s=" + std::to_string(s_value);
        c.value = std::abs(analytic - est.mean);
        c.tolerance = sigmas * est.stderr_;
        c.passed = c.value <= c.tolerance;
        c.detail = "analytic=" + std::to_string(analytic) + " mc=" + std::to_string(est.mean) +
                   " se=" + std::to_string(est.stderr_);
        out.push_back(c);
    };
    for (const LaplaceEstimate& e : mc) {
        add("general", e.s, laplace_general(e.s, ctx, cfg), e.general);
        if (typical) add("typical", e.s, laplace_typical(e.s, ctx, cfg), e.typical);
    }
    return out;
}

// Absolute coverage gate: 0.03 at the full budget, widened by three binomial
// standard errors below 1e5 iterations.
inline double coverage_tolerance(double p, std::uint64_t iterations) {
    if (iterations >= 100000) return 0.03;
    return 0.03 + 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-4) / double(iterations));
}

inline CheckResult check_coverage(const NetworkConfig& cfg, double tau, std::uint64_t iterations, std::uint64_t seed,
                                  unsigned workers = 1) {
    const double analytic = coverage_probability(tau, cfg).total;
    const ProportionEstimate mc = estimate_coverage(cfg, tau, iterations, seed, workers);
    CheckResult c;
    c.name = "coverage lambda_p=" + std::to_string(cfg.lambda_p / per_km) + "/km tau=" +
             std::to_string(linear_to_db(tau)) + "dB";
    c.value = std::abs(analytic - mc.p);
    c.tolerance = coverage_tolerance(mc.p, iterations);
    c.passed = c.value <= c.tolerance;
    c.detail = "analytic=" + std::to_string(analytic) + " mc=" + std::to_string(mc.p) + " ci=[" +
               std::to_string(mc.ci_lo) + "," + std::to_string(mc.ci_hi) + "]";
    return c;
}

// Random chains of overlapping disks and random segments: a covered verdict
// must survive 1 m sampling, and an uncovered verdict must come with a gap
// point outside every disk.
inline CheckResult check_segment_oracle(std::uint64_t seed, int instances = 200, int segments = 20) {
    RandomStream rng(seed, 0x5e9);
    int mismatches = 0, checked = 0;
    for (int k = 0; k < instances; ++k) {
        std::vector<Disk> disks;
        Point c{0.0, 0.0};
        const int n = 2 + int(rng.uniform() * 5);
        for (int i = 0; i < n; ++i) {
            const double r = rng.uniform(200.0, 800.0);
            if (i > 0) {
                const double step = rng.uniform(0.3, 0.95) * (r + disks.back().radius);
                const double a = rng.uniform(-0.6, 0.6);
                c = c + step * Point{std::cos(a), std::sin(a)};
            }
            disks.push_back({c, r});
        }
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const Disk& d : disks) {
            xmin = std::min(xmin, d.center.x - d.radius);
            xmax = std::max(xmax, d.center.x + d.radius);
            ymin = std::min(ymin, d.center.y - d.radius);
            ymax = std::max(ymax, d.center.y + d.radius);
        }
        auto inside = [&](Point p) {
            return std::any_of(disks.begin(), disks.end(), [&](const Disk& d) { return d.contains(p, kCoverSlack); });
        };
        for (int s = 0; s < segments; ++s) {
            Point p{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
            Point q{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
            if (!inside(p) || !inside(q)) continue;
            ++checked;
            if (segment_covered(p, q, disks)) {
                if (!polyline_inside({p, q}, disks, 1.0)) ++mismatches;
                continue;
            }
            // Locate a gap from the chord intervals and test its midpoint.
            std::vector<std::pair<double, double>> spans;
            for (const Disk& d : disks)
                if (auto iv = chord_interval(p, q, d, kCoverSlack)) spans.push_back(*iv);
            std::sort(spans.begin(), spans.end());
            double reach = 0.0;
            std::optional<double> gap;
            for (const auto& [lo, hi] : spans) {
                if (lo > reach) {
                    gap = 0.5 * (reach + lo);
                    break;
                }
                reach = std::max(reach, hi);
            }
            if (!gap && reach < 1.0) gap = 0.5 * (reach + 1.0);
            if (!gap || inside(p + *gap * (q - p))) ++mismatches;
        }
    }
    CheckResult c;
    c.name = "segment coverage sampling oracle";
    c.value = mismatches;
    c.tolerance = 0.0;
    c.passed = mismatches == 0 && checked > 0;
    c.detail = std::to_string(checked) + " segments, " + std::to_string(mismatches) + " mismatches";
    return c;
}

// The full oracle suite at one configuration.
inline std::vector<CheckResult> run_validation(const NetworkConfig& cfg, std::uint64_t iterations, std::uint64_t seed,
                                               unsigned workers = 1) {
    std::vector<CheckResult> out;
    for (const Kind& k : kAllKinds) {
        if (k.bs == BsKind::Dedicated && cfg.dedicated_density() <= 0.0) continue;
        if (k.bs == BsKind::Tbs && cfg.lambda_tb <= 0.0) continue;
        out.push_back(check_distance_law(k, cfg, iterations, seed, workers));
    }
    for (const Kind& k : kAllKinds) {
        auto part = check_laplace({k, 200.0, pi / 4}, cfg, std::max<std::uint64_t>(iterations / 10, 1), seed + 1);
        out.insert(out.end(), part.begin(), part.end());
    }
    out.push_back(check_coverage(cfg, cfg.tau, iterations, seed + 2, workers));
    out.push_back(check_segment_oracle(seed + 3));
    return out;
}

} // namespace aerialnet
