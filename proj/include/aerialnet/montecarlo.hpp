#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "aerialnet/channel.hpp"
#include "aerialnet/config.hpp"
#include "aerialnet/distlaw.hpp"
#include "aerialnet/errors.hpp"
#include "aerialnet/geometry.hpp"
#include "aerialnet/interference.hpp"
#include "aerialnet/rng.hpp"

namespace aerialnet {

struct SinrSample {
    double sinr = 0.0;
    Kind serving;
    double serving_distance = 0.0;
};

// One BS as seen from the UAV: its class, static link mark and mean power.
struct Transmitter {
    Kind kind;
    double distance = 0.0;
    double power = 0.0;
};

inline NetworkRealization sample_realization(const NetworkConfig& cfg, const Window& window, RandomStream& rng) {
    NetworkRealization r;
    r.window = window;
    r.tbs = sample_ppp(cfg.lambda_tb, window, rng);
    r.roads = sample_plcp(cfg.lambda_l, cfg.lambda_p, window, rng);
    return r;
}

// True if candidate (power, kind) beats the incumbent: higher mean power,
// ties to dedicated, then LoS.
inline bool stronger(const Transmitter& a, const Transmitter& b) {
    if (a.power != b.power) return a.power > b.power;
    if (a.kind.bs != b.kind.bs) return a.kind.bs == BsKind::Dedicated;
    return a.kind.link == LinkKind::LoS && b.kind.link != LinkKind::LoS;
}

inline Transmitter mark_transmitter(BsKind bs, double distance, const ChannelParams& p, RandomStream& rng) {
    const LinkKind c = rng.uniform() < los_probability(distance, p.dh(bs), p.a, p.b) ? LinkKind::LoS : LinkKind::NLoS;
    return {{bs, c}, distance, mean_received_power(distance, bs, c, p)};
}

// Every BS within the truncation radius of `at`, each with one LoS/NLoS mark.
inline std::vector<Transmitter> visible_transmitters(const NetworkRealization& real, const NetworkConfig& cfg,
                                                     RandomStream& rng, Point at = {}) {
    const double R = cfg.truncation_radius();
    std::vector<Transmitter> out;
    out.reserve(real.tbs.size() + real.dedicated_count());
    for (const Point& g : real.tbs) {
        const double d = horizontal_distance(g, at);
        if (d <= R) out.push_back(mark_transmitter(BsKind::Tbs, d, cfg.channel, rng));
    }
    for (const Road& road : real.roads)
        for (const Point& g : road.points) {
            const double d = horizontal_distance(g, at);
            if (d <= R) out.push_back(mark_transmitter(BsKind::Dedicated, d, cfg.channel, rng));
        }
    return out;
}

// Associates on mean power, then draws fading for every transmitter.
inline SinrSample sinr_from_transmitters(const std::vector<Transmitter>& tx, const ChannelParams& p, RandomStream& rng) {
    if (tx.empty()) throw NoServerError("no base station within the truncation radius");
    std::size_t best = 0;
    for (std::size_t i = 1; i < tx.size(); ++i)
        if (stronger(tx[i], tx[best])) best = i;
    double signal = 0.0, interference = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const double g = sample_fading(p.m(tx[i].kind.link), rng);
        if (i == best)
            signal = tx[i].power * g;
        else
            interference += tx[i].power * g;
    }
    return {signal / (interference + p.sigma2), tx[best].kind, tx[best].distance};
}

inline SinrSample simulate_sinr_at_origin(const NetworkRealization& real, const NetworkConfig& cfg, RandomStream& rng) {
    return sinr_from_transmitters(visible_transmitters(real, cfg, rng), cfg.channel, rng);
}

// Distances from the origin to the BSs inside B(0, R), sampled directly in
// polar form: same law as a windowed realization clipped to the disk.
struct RadialDraw {
    std::vector<double> tbs;
    std::vector<double> dedicated;
};

inline void sample_radial(const NetworkConfig& cfg, RandomStream& rng, RadialDraw& out) {
    const double R = cfg.truncation_radius();
    out.tbs.clear();
    out.dedicated.clear();
    const std::uint64_t n_tbs = sample_poisson(cfg.lambda_tb * pi * R * R, rng);
    for (std::uint64_t i = 0; i < n_tbs; ++i) out.tbs.push_back(R * std::sqrt(rng.uniform()));
    if (cfg.lambda_p <= 0.0) return;
    const std::uint64_t n_lines = sample_poisson(2.0 * pi * cfg.lambda_l * R, rng);
    for (std::uint64_t k = 0; k < n_lines; ++k) {
        const double rho = R * rng.uniform();
        const double half = std::sqrt(std::max(0.0, R * R - rho * rho));
        const std::uint64_t n = sample_poisson(2.0 * half * cfg.lambda_p, rng);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double t = half * (2.0 * rng.uniform() - 1.0);
            out.dedicated.push_back(std::sqrt(rho * rho + t * t));
        }
    }
}

inline std::optional<SinrSample> sample_sinr_at_origin(const NetworkConfig& cfg, RandomStream& rng,
                                                       RadialDraw& scratch, std::vector<Transmitter>& tx) {
    sample_radial(cfg, rng, scratch);
    tx.clear();
    for (double d : scratch.tbs) tx.push_back(mark_transmitter(BsKind::Tbs, d, cfg.channel, rng));
    for (double d : scratch.dedicated) tx.push_back(mark_transmitter(BsKind::Dedicated, d, cfg.channel, rng));
    if (tx.empty()) return std::nullopt;
    return sinr_from_transmitters(tx, cfg.channel, rng);
}

// Runs body(i, worker) for i in [0, n) over a fixed partition; results must
// be written per index so the outcome is independent of the worker count.
template <class Body>
void parallel_for(std::uint64_t n, unsigned workers, Body&& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) body(i, 0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < n; i += workers) body(i, w);
        });
    for (auto& t : pool) t.join();
}

struct ProportionEstimate {
    double p = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

inline ProportionEstimate wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
    ProportionEstimate e;
    e.successes = k;
    e.trials = n;
    if (n == 0) return e;
    const double ph = double(k) / n, z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4.0 * n * n)) / denom;
    e.p = ph;
    e.ci_lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    e.ci_hi = k == n ? 1.0 : std::min(1.0, center + half);
    return e;
}

// SINR at the origin for `iterations` independent realizations; stream i of
// `seed` drives realization i. Missing servers give SINR 0.
inline std::vector<double> sample_sinrs(const NetworkConfig& cfg, std::uint64_t iterations, std::uint64_t seed,
                                        unsigned workers = 1) {
    if (iterations == 0) throw InvalidParameter("iterations must be >= 1");
    std::vector<double> out(iterations, 0.0);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<RadialDraw> scratch(workers);
    std::vector<std::vector<Transmitter>> tx(workers);
    parallel_for(iterations, workers, [&](std::uint64_t i, unsigned w) {
        RandomStream rng(seed, i);
        auto s = sample_sinr_at_origin(cfg, rng, scratch[w], tx[w]);
        out[i] = s ? s->sinr : 0.0;
    });
    return out;
}

inline ProportionEstimate estimate_coverage(const NetworkConfig& cfg, double tau, std::uint64_t iterations,
                                            std::uint64_t seed, unsigned workers = 1) {
    const std::vector<double> s = sample_sinrs(cfg, iterations, seed, workers);
    const auto k = static_cast<std::uint64_t>(std::count_if(s.begin(), s.end(), [&](double x) { return x > tau; }));
    return wilson_interval(k, iterations);
}

// Sorted nearest distances of one BS kind; realizations without such a BS
// inside the truncation radius count towards `total` only.
struct EmpiricalCdf {
    std::vector<double> distances;
    std::uint64_t total = 0;

    std::uint64_t missing() const { return total - distances.size(); }
    double operator()(double r) const {
        if (total == 0) return 0.0;
        const auto n = std::upper_bound(distances.begin(), distances.end(), r) - distances.begin();
        return double(n) / double(total);
    }
};

inline EmpiricalCdf empirical_distance_cdf(Kind kind, const NetworkConfig& cfg, std::uint64_t iterations,
                                           std::uint64_t seed, unsigned workers = 1) {
    if (iterations == 0) throw InvalidParameter("iterations must be >= 1");
    std::vector<double> nearest(iterations, INFINITY);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<RadialDraw> scratch(workers);
    parallel_for(iterations, workers, [&](std::uint64_t i, unsigned w) {
        RandomStream rng(seed, i);
        sample_radial(cfg, rng, scratch[w]);
        const auto& ds = kind.bs == BsKind::Tbs ? scratch[w].tbs : scratch[w].dedicated;
        const double dh = cfg.channel.dh(kind.bs);
        double best = INFINITY;
        for (double d : ds) {
            const bool los = rng.uniform() < los_probability(d, dh, cfg.channel.a, cfg.channel.b);
            if (los == (kind.link == LinkKind::LoS)) best = std::min(best, d);
        }
        nearest[i] = best;
    });
    EmpiricalCdf cdf;
    cdf.total = iterations;
    for (double d : nearest)
        if (std::isfinite(d)) cdf.distances.push_back(d);
    std::sort(cdf.distances.begin(), cdf.distances.end());
    return cdf;
}

struct MeanEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
};

inline MeanEstimate summarize(const std::vector<double>& xs) {
    MeanEstimate e;
    e.samples = xs.size();
    if (xs.empty()) return e;
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.mean = sum / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.stderr_ = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1) / xs.size()) : 0.0;
    return e;
}

// Interference seen by a UAV whose serving BS is fixed by ctx: every BS of
// each class outside that class's exclusion radius interferes, with sampled
// marks and fading. `typical` is the part due to the serving line.
struct InterferenceDraw {
    double general = 0.0;
    double typical = 0.0;
};

inline InterferenceDraw sample_interference(const LaplaceContext& ctx, const NetworkConfig& cfg, RandomStream& rng,
                                            RadialDraw& scratch) {
    const ChannelParams& p = cfg.channel;
    const double R = cfg.truncation_radius();
    double excl[2][2];
    for (const Kind& k : kAllKinds)
        excl[int(k.bs)][int(k.link)] = exclusion_distance(ctx.serving, k, ctx.d, p);
    auto contribution = [&](BsKind bs, double d) {
        const Transmitter t = mark_transmitter(bs, d, p, rng);
        if (d < excl[int(bs)][int(t.kind.link)]) return 0.0;
        return t.power * sample_fading(p.m(t.kind.link), rng);
    };
    InterferenceDraw out;
    sample_radial(cfg, rng, scratch);
    for (double d : scratch.tbs) out.general += contribution(BsKind::Tbs, d);
    for (double d : scratch.dedicated) out.general += contribution(BsKind::Dedicated, d);
    if (ctx.serving.bs == BsKind::Dedicated && cfg.lambda_p > 0.0) {
        const double y = ctx.d * std::sin(ctx.theta);
        const double half = std::sqrt(std::max(0.0, R * R - y * y));
        const std::uint64_t n = sample_poisson(2.0 * half * cfg.lambda_p, rng);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = half * (2.0 * rng.uniform() - 1.0);
            out.typical += contribution(BsKind::Dedicated, std::hypot(x, y));
        }
    }
    return out;
}

struct LaplaceEstimate {
    double s = 0.0;
    MeanEstimate general;
    MeanEstimate typical;
};

inline std::vector<LaplaceEstimate> estimate_laplace(const std::vector<double>& s_values, const LaplaceContext& ctx,
                                                     const NetworkConfig& cfg, std::uint64_t iterations,
                                                     std::uint64_t seed) {
    if (iterations == 0) throw InvalidParameter("iterations must be >= 1");
    std::vector<InterferenceDraw> draws(iterations);
    RadialDraw scratch;
    for (std::uint64_t i = 0; i < iterations; ++i) {
        RandomStream rng(seed, i);
        draws[i] = sample_interference(ctx, cfg, rng, scratch);
    }
    std::vector<LaplaceEstimate> out;
    for (double s : s_values) {
        std::vector<double> g(iterations), t(iterations);
        for (std::uint64_t i = 0; i < iterations; ++i) {
            g[i] = std::exp(-s * draws[i].general);
            t[i] = std::exp(-s * draws[i].typical);
        }
        out.push_back({s, summarize(g), summarize(t)});
    }
    return out;
}

// Mean SINR of a serving link at distance d: the link state is drawn from
// its LoS probability, the serving line angle uniformly, and interferers
// inside the association exclusion radii are absent.
inline MeanEstimate estimate_mean_sinr(double d, BsKind bs, const NetworkConfig& cfg, std::uint64_t iterations,
                                       std::uint64_t seed) {
    if (iterations == 0) throw InvalidParameter("iterations must be >= 1");
    const ChannelParams& p = cfg.channel;
    std::vector<double> sinr(iterations);
    RadialDraw scratch;
    for (std::uint64_t i = 0; i < iterations; ++i) {
        RandomStream rng(seed, i);
        const LinkKind c = rng.uniform() < los_probability(d, p.dh(bs), p.a, p.b) ? LinkKind::LoS : LinkKind::NLoS;
        const double theta = 0.5 * pi * rng.uniform();
        const LaplaceContext ctx{{bs, c}, d, theta};
        const InterferenceDraw I = sample_interference(ctx, cfg, rng, scratch);
        const double signal = mean_received_power(d, bs, c, p) * sample_fading(p.m(c), rng);
        sinr[i] = signal / (I.general + I.typical + p.sigma2);
    }
    return summarize(sinr);
}

} // namespace aerialnet
