#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "aerialnet/channel.hpp"
#include "aerialnet/config.hpp"
#include "aerialnet/coverage.hpp"
#include "aerialnet/errors.hpp"
#include "aerialnet/geometry.hpp"
#include "aerialnet/montecarlo.hpp"
#include "aerialnet/numerics.hpp"

namespace aerialnet {

// Tabulated mean SINR against horizontal distance for both BS kinds, with the
// inverse map r(gamma). Interpolation is monotone cubic in log SINR on each
// antenna-gain piece.
class SinrProfile {
public:
    struct Piece {
        double lo = 0.0, hi = 0.0;
        Pchip log_sinr;
    };

    SinrProfile() = default;

    // Evaluates mean_sinr on `nodes` points per piece over [0, dmax]; dmax < 0
    // picks the first doubling of 1 km where both kinds sit below half the
    // Max-Min search floor.
    static SinrProfile build(const NetworkConfig& cfg, int nodes = 16, double dmax = -1.0) {
        if (nodes < 3) throw InvalidParameter("SinrProfile: need at least 3 nodes per piece");
        auto exact = [&](double d, BsKind bs) { return mean_sinr(d, bs, cfg); };
        const double cap = 0.5 * cfg.truncation_radius();
        if (dmax <= 0.0) {
            dmax = std::min(1000.0, cap);
            while (dmax < cap && std::max(exact(dmax, BsKind::Tbs), exact(dmax, BsKind::Dedicated)) >=
                                     0.5 * cfg.gamma_floor)
                dmax = std::min(2.0 * dmax, cap);
        }
        return build_from(exact, cfg.channel.z_db, dmax, nodes);
    }

    // Same table from any mean-SINR function f(d, bs).
    template <class F>
    static SinrProfile build_from(F&& f, double z_db, double dmax, int nodes) {
        SinrProfile p;
        p.z_ = z_db;
        p.dmax_ = dmax;
        p.tbs_.push_back(make_piece(f, BsKind::Tbs, 0.0, dmax, nodes));
        if (z_db < dmax) {
            p.db_.push_back(make_piece(f, BsKind::Dedicated, 0.0, std::nextafter(z_db, 0.0), nodes));
            p.db_.push_back(make_piece(f, BsKind::Dedicated, z_db, dmax, nodes));
        } else {
            p.db_.push_back(make_piece(f, BsKind::Dedicated, 0.0, dmax, nodes));
        }
        return p;
    }

    // Interpolated mean SINR (linear); zero beyond the table.
    double sinr(double d, BsKind bs) const {
        if (d > dmax_) return 0.0;
        const auto& pieces = bs == BsKind::Tbs ? tbs_ : db_;
        for (const auto& piece : pieces)
            if (d <= piece.hi) return std::exp(piece.log_sinr(std::max(d, piece.lo)));
        return std::exp(pieces.back().log_sinr(d));
    }

    // Largest d with sinr(d) >= gamma, far piece first; 0 if none.
    double radius(double gamma, BsKind bs) const {
        if (!(gamma > 0.0)) throw InvalidParameter("SinrProfile::radius: gamma must be positive");
        const double z = bs == BsKind::Dedicated ? z_ : dmax_;
        return invert_decreasing([&](double d) { return sinr(d, bs); }, gamma, std::min(z, dmax_), dmax_, 1e-3);
    }

    double dmax() const { return dmax_; }
    double z_db() const { return z_; }
    const std::vector<Piece>& pieces(BsKind bs) const { return bs == BsKind::Tbs ? tbs_ : db_; }

private:
    template <class F>
    static Piece make_piece(F& f, BsKind bs, double lo, double hi, int nodes) {
        std::vector<double> x(nodes), y(nodes);
        for (int k = 0; k < nodes; ++k) {
            const double u = double(k) / (nodes - 1);
            x[k] = k == nodes - 1 ? hi : lo + (hi - lo) * u * u;
            const double v = f(x[k], bs);
            if (!(v > 0.0)) throw NumericsError("SinrProfile: non-positive mean SINR in table");
            y[k] = std::log(v);
        }
        return {lo, hi, Pchip(std::move(x), std::move(y))};
    }

    double z_ = 0.0;
    double dmax_ = 0.0;
    std::vector<Piece> tbs_, db_;
};

struct BsSite {
    Point location;
    BsKind kind = BsKind::Tbs;
};

struct BsNode {
    Point location;
    BsKind kind = BsKind::Tbs;
    std::size_t index = 0; // position in the site list
    double radius = 0.0;
};

using BsSequence = std::vector<BsNode>;

// All BSs of a realization inside its window: TBSs first, then dedicated BSs
// road by road.
inline std::vector<BsSite> collect_sites(const NetworkRealization& real) {
    std::vector<BsSite> out;
    for (const Point& g : real.tbs)
        if (real.window.contains(g)) out.push_back({g, BsKind::Tbs});
    for (const Road& road : real.roads)
        for (const Point& g : road.points)
            if (real.window.contains(g)) out.push_back({g, BsKind::Dedicated});
    return out;
}

struct GraphEdge {
    std::size_t to = 0;
    double weight = 0.0;
};

// BS disk graph plus two anchors: node ids [0, n) are BSs, n is S and n + 1 is D.
struct BsGraph {
    std::vector<BsNode> nodes;
    Point s, d;
    std::vector<std::vector<GraphEdge>> adj;

    std::size_t source() const { return nodes.size(); }
    std::size_t target() const { return nodes.size() + 1; }
    Point location(std::size_t id) const {
        if (id == source()) return s;
        if (id == target()) return d;
        return nodes[id].location;
    }
    bool has_edge(std::size_t a, std::size_t b) const {
        return std::any_of(adj[a].begin(), adj[a].end(), [&](const GraphEdge& e) { return e.to == b; });
    }
};

namespace detail {

struct CellKey {
    std::int64_t i, j;
    friend bool operator==(CellKey, CellKey) = default;
};
struct CellHash {
    std::size_t operator()(CellKey k) const { return std::hash<std::int64_t>()(k.i * 73856093LL ^ k.j * 19349663LL); }
};

} // namespace detail

// Disk-overlap graph: BSs i, j adjacent iff |g_i - g_j| <= r_i + r_j; an
// anchor connects to BS i iff it lies in disk i. Nodes with zero radius are
// dropped. Weights are Euclidean distances.
inline BsGraph build_bs_graph(const std::vector<BsNode>& candidates, Point S, Point D) {
    BsGraph g;
    g.s = S;
    g.d = D;
    double rmax = 0.0;
    for (const BsNode& n : candidates)
        if (n.radius > 0.0) {
            g.nodes.push_back(n);
            rmax = std::max(rmax, n.radius);
        }
    const std::size_t n = g.nodes.size();
    g.adj.assign(n + 2, {});
    if (n == 0) return g;

    const double cell = 2.0 * rmax;
    auto key = [&](Point p) { return detail::CellKey{std::int64_t(std::floor(p.x / cell)), std::int64_t(std::floor(p.y / cell))}; };
    std::unordered_map<detail::CellKey, std::vector<std::size_t>, detail::CellHash> grid;
    for (std::size_t i = 0; i < n; ++i) grid[key(g.nodes[i].location)].push_back(i);

    for (std::size_t i = 0; i < n; ++i) {
        const detail::CellKey k = key(g.nodes[i].location);
        for (std::int64_t di = -1; di <= 1; ++di)
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                auto it = grid.find({k.i + di, k.j + dj});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                    if (j <= i) continue;
                    const double dist = horizontal_distance(g.nodes[i].location, g.nodes[j].location);
                    if (dist <= g.nodes[i].radius + g.nodes[j].radius) {
                        g.adj[i].push_back({j, dist});
                        g.adj[j].push_back({i, dist});
                    }
                }
            }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double ds = horizontal_distance(S, g.nodes[i].location);
        if (ds <= g.nodes[i].radius) {
            g.adj[g.source()].push_back({i, ds});
            g.adj[i].push_back({g.source(), ds});
        }
        const double dd = horizontal_distance(D, g.nodes[i].location);
        if (dd <= g.nodes[i].radius) {
            g.adj[g.target()].push_back({i, dd});
            g.adj[i].push_back({g.target(), dd});
        }
    }
    for (auto& edges : g.adj)
        std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.to < b.to; });
    return g;
}

template <class Model>
std::vector<BsNode> assign_radii(const std::vector<BsSite>& sites, double gamma, const Model& model) {
    const double r_tb = model.radius(gamma, BsKind::Tbs);
    const double r_db = model.radius(gamma, BsKind::Dedicated);
    std::vector<BsNode> out;
    out.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        out.push_back({sites[i].location, sites[i].kind, i, sites[i].kind == BsKind::Tbs ? r_tb : r_db});
    return out;
}

template <class Model>
BsGraph build_bs_graph(const std::vector<BsSite>& sites, double gamma, Point S, Point D, const Model& model) {
    return build_bs_graph(assign_radii(sites, gamma, model), S, D);
}

// Dijkstra over an adjacency list. Labels compare by (length, hops); on a
// full tie the lower predecessor index wins. Returns the node path or nothing.
inline std::optional<std::vector<std::size_t>> dijkstra_path(const std::vector<std::vector<GraphEdge>>& adj,
                                                             std::size_t from, std::size_t to) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    const std::size_t n = adj.size();
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> hops(n, none), prev(n, none);
    std::vector<char> done(n, 0);
    using Label = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
    dist[from] = 0.0;
    hops[from] = 0;
    queue.push({0.0, 0, from});
    while (!queue.empty()) {
        const auto [du, hu, u] = queue.top();
        queue.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == to) break;
        for (const GraphEdge& e : adj[u]) {
            if (done[e.to]) continue;
            const double nd = du + e.weight;
            const std::size_t nh = hu + 1;
            const bool better = nd < dist[e.to] || (nd == dist[e.to] && (nh < hops[e.to] || (nh == hops[e.to] && u < prev[e.to])));
            if (!better) continue;
            dist[e.to] = nd;
            hops[e.to] = nh;
            prev[e.to] = u;
            queue.push({nd, nh, e.to});
        }
    }
    if (!done[to]) return std::nullopt;
    std::vector<std::size_t> path;
    for (std::size_t v = to; v != none; v = prev[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

// Shortest S -> D chain of BS disks; nothing if the graph is disconnected.
inline std::optional<BsSequence> shortest_bs_sequence(const BsGraph& graph) {
    auto path = dijkstra_path(graph.adj, graph.source(), graph.target());
    if (!path) return std::nullopt;
    BsSequence seq;
    for (std::size_t id : *path)
        if (id < graph.nodes.size()) seq.push_back(graph.nodes[id]);
    return seq;
}

struct BisectionStep {
    double gamma_db = 0.0;
    bool feasible = false;
};

struct MaxMinResult {
    double gamma_star = 0.0; // linear
    double gamma_upper = 0.0;
    BsSequence sequence;
    std::vector<BisectionStep> trace;

    double gamma_star_db() const { return linear_to_db(gamma_star); }
};

// Best mean SINR any single BS offers at point p.
template <class Model>
double best_sinr_at(Point p, const std::vector<BsSite>& sites, const Model& model) {
    double best = 0.0;
    for (const BsSite& s : sites) best = std::max(best, model.sinr(horizontal_distance(p, s.location), s.kind));
    return best;
}

template <class Model>
std::optional<BsSequence> feasible_sequence(const std::vector<BsSite>& sites, double gamma, Point S, Point D,
                                            const Model& model) {
    return shortest_bs_sequence(build_bs_graph(sites, gamma, S, D, model));
}

// Bisection in dB between the search floor and the endpoint upper bound; stops
// once the bracket is narrower than eps_db and returns the last feasible level.
template <class Model>
MaxMinResult max_min_sinr(const std::vector<BsSite>& sites, Point S, Point D, const Model& model, double gamma_floor,
                          double eps_db) {
    if (!(gamma_floor > 0.0) || !(eps_db > 0.0)) throw InvalidParameter("max_min_sinr: floor and eps must be positive");
    MaxMinResult out;
    out.gamma_upper = std::min(best_sinr_at(S, sites, model), best_sinr_at(D, sites, model));
    auto probe = [&](double gamma_db) {
        auto seq = feasible_sequence(sites, db_to_linear(gamma_db), S, D, model);
        out.trace.push_back({gamma_db, seq.has_value()});
        return seq;
    };
    double lo = linear_to_db(gamma_floor);
    if (!(out.gamma_upper >= gamma_floor)) throw NoRouteError("max_min_sinr: an endpoint is uncovered at the search floor");
    auto best = probe(lo);
    if (!best) throw NoRouteError("max_min_sinr: no BS chain from S to D at the search floor");
    double hi = linear_to_db(out.gamma_upper);
    if (auto top = probe(hi)) {
        lo = hi;
        best = std::move(top);
    } else {
        while (hi - lo >= eps_db) {
            const double mid = 0.5 * (lo + hi);
            if (auto seq = probe(mid)) {
                lo = mid;
                best = std::move(seq);
            } else {
                hi = mid;
            }
        }
    }
    out.gamma_star = db_to_linear(lo);
    out.sequence = std::move(*best);
    return out;
}

template <class Model>
MaxMinResult max_min_sinr(const NetworkRealization& real, Point S, Point D, const Model& model,
                          const NetworkConfig& cfg) {
    return max_min_sinr(collect_sites(real), S, D, model, cfg.gamma_floor, cfg.epsilon_db);
}

struct Disk {
    Point center;
    double radius = 0.0;

    bool contains(Point p, double slack = 0.0) const { return horizontal_distance(p, center) <= radius + slack; }
};

inline constexpr double kCoverSlack = 1e-6; // m

inline std::vector<Disk> chain_disks(const BsSequence& seq) {
    std::vector<Disk> out;
    for (const BsNode& n : seq) out.push_back({n.location, n.radius});
    return out;
}

// Boundary intersections of two circles: two points, one on tangency, none
// for disjoint, nested or concentric circles.
inline std::vector<Point> circle_intersections(Point c1, double r1, Point c2, double r2) {
    const double d = horizontal_distance(c1, c2);
    if (d == 0.0 || d > r1 + r2 || d < std::abs(r1 - r2)) return {};
    const Point u = (1.0 / d) * (c2 - c1);
    const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double h2 = r1 * r1 - a * a;
    const Point mid = c1 + a * u;
    if (h2 <= 0.0 || d == r1 + r2 || d == std::abs(r1 - r2)) return {mid};
    const double h = std::sqrt(h2);
    const Point n{-u.y, u.x};
    return {mid + h * n, mid - h * n};
}

// Parameter interval of segment p + t (q - p), t in [0, 1], inside a disk.
inline std::optional<std::pair<double, double>> chord_interval(Point p, Point q, const Disk& disk, double slack) {
    const Point u = q - p, w = p - disk.center;
    const double r = disk.radius + slack;
    const double a = dot(u, u), b = 2.0 * dot(u, w), c = dot(w, w) - r * r;
    if (a == 0.0) {
        if (c <= 0.0) return std::pair{0.0, 1.0};
        return std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double t1 = (-b - sq) / (2.0 * a), t2 = (-b + sq) / (2.0 * a);
    t1 = std::max(t1, 0.0);
    t2 = std::min(t2, 1.0);
    if (t1 > t2) return std::nullopt;
    return std::pair{t1, t2};
}

// True iff every point of segment pq lies in the union of the disks.
inline bool segment_covered(Point p, Point q, const std::vector<Disk>& disks, double slack = kCoverSlack) {
    std::vector<std::pair<double, double>> spans;
    for (const Disk& d : disks)
        if (auto s = chord_interval(p, q, d, slack)) spans.push_back(*s);
    if (spans.empty()) return false;
    std::sort(spans.begin(), spans.end());
    double reach = 0.0;
    if (spans.front().first > 0.0) return false;
    for (const auto& [lo, hi] : spans) {
        if (lo > reach) return false;
        reach = std::max(reach, hi);
        if (reach >= 1.0) return true;
    }
    return reach >= 1.0;
}

// Coverage by the chain disks i..j inclusive.
inline bool segment_covered(Point p, Point q, const BsSequence& chain, std::size_t i, std::size_t j) {
    if (i > j || j >= chain.size()) throw ContractViolation("segment_covered: bad chain span");
    std::vector<Disk> disks;
    for (std::size_t k = i; k <= j; ++k) disks.push_back({chain[k].location, chain[k].radius});
    return segment_covered(p, q, disks);
}

struct TrajectorySolution {
    double gamma_star = 0.0;
    BsSequence bs_sequence;
    std::vector<Point> waypoints;
    double t_min = 0.0;
    double total_length = 0.0;
};

inline double polyline_length(const std::vector<Point>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += horizontal_distance(pts[i - 1], pts[i]);
    return len;
}

namespace detail {

// Shortest covered polyline from S to D through the given candidate points.
inline std::optional<std::vector<Point>> shortest_covered_path(Point S, Point D, const std::vector<Point>& candidates,
                                                               const std::vector<Disk>& disks) {
    std::vector<Point> pts{S, D};
    pts.insert(pts.end(), candidates.begin(), candidates.end());
    const std::size_t n = pts.size();
    std::vector<std::vector<GraphEdge>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (segment_covered(pts[i], pts[j], disks)) {
                const double w = horizontal_distance(pts[i], pts[j]);
                adj[i].push_back({j, w});
                adj[j].push_back({i, w});
            }
    auto path = dijkstra_path(adj, 0, 1);
    if (!path) return std::nullopt;
    std::vector<Point> out;
    for (std::size_t id : *path) out.push_back(pts[id]);
    return out;
}

} // namespace detail

// Corner points of the chain's disk union: pairwise circle intersections not
// strictly inside another disk of the chain. Consecutive-disk intersections
// are always among them unless buried in a third disk.
inline std::vector<Point> chain_corners(const std::vector<Disk>& disks) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < disks.size(); ++i)
        for (std::size_t j = i + 1; j < disks.size(); ++j)
            for (Point m : circle_intersections(disks[i].center, disks[i].radius, disks[j].center, disks[j].radius)) {
                bool buried = false;
                for (std::size_t k = 0; k < disks.size() && !buried; ++k)
                    buried = k != i && k != j && horizontal_distance(m, disks[k].center) < disks[k].radius - kCoverSlack;
                if (!buried) out.push_back(m);
            }
    return out;
}

// Shortest polyline from S to D inside the union of the chain disks, bending
// only at corners of the union; T_min = length / v.
inline TrajectorySolution min_time_trajectory(double gamma_star, const BsSequence& chain, Point S, Point D, double v) {
    if (chain.empty()) throw ContractViolation("min_time_trajectory: empty BS sequence");
    if (!(v > 0.0)) throw InvalidParameter("min_time_trajectory: speed must be positive");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (horizontal_distance(chain[i].location, chain[i + 1].location) > chain[i].radius + chain[i + 1].radius)
            throw ContractViolation("min_time_trajectory: consecutive disks do not overlap");
    const std::vector<Disk> disks = chain_disks(chain);
    if (!disks.front().contains(S, kCoverSlack) || !disks.back().contains(D, kCoverSlack))
        throw ContractViolation("min_time_trajectory: S or D outside the end disks");

    auto path = detail::shortest_covered_path(S, D, chain_corners(disks), disks);
    if (!path) throw NumericsError("min_time_trajectory: corner graph disconnected");
    TrajectorySolution sol;
    sol.gamma_star = gamma_star;
    sol.bs_sequence = chain;
    sol.waypoints = std::move(*path);
    sol.total_length = polyline_length(sol.waypoints);
    sol.t_min = sol.total_length / v;
    return sol;
}

// Baseline: waypoints restricted to `per_disk` evenly spaced points on each
// disk boundary. Nothing if that discretization cannot connect S to D.
inline std::optional<std::vector<Point>> boundary_quantized_path(const BsSequence& chain, Point S, Point D,
                                                                 int per_disk = 64) {
    const std::vector<Disk> disks = chain_disks(chain);
    std::vector<Point> candidates;
    for (const Disk& d : disks)
        for (int k = 0; k < per_disk; ++k) {
            const double a = 2.0 * pi * k / per_disk;
            candidates.push_back(d.center + d.radius * Point{std::cos(a), std::sin(a)});
        }
    return detail::shortest_covered_path(S, D, candidates, disks);
}

// True iff samples every `step` meters along the polyline all fall in the disk union.
inline bool polyline_inside(const std::vector<Point>& pts, const std::vector<Disk>& disks, double step = 1.0,
                            double slack = kCoverSlack) {
    auto inside = [&](Point p) {
        return std::any_of(disks.begin(), disks.end(), [&](const Disk& d) { return d.contains(p, slack); });
    };
    if (pts.size() == 1) return inside(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double len = horizontal_distance(pts[i - 1], pts[i]);
        const int n = std::max(1, int(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k)
            if (!inside(pts[i - 1] + (double(k) / n) * (pts[i] - pts[i - 1]))) return false;
    }
    return true;
}

inline Point trajectory_start(const NetworkConfig& cfg) { return {-0.5 * cfg.travel_distance, 0.0}; }
inline Point trajectory_end(const NetworkConfig& cfg) { return {0.5 * cfg.travel_distance, 0.0}; }

// One seeded trajectory instance: realization, Max-Min level and path.
struct TrajectoryInstance {
    NetworkRealization realization;
    std::optional<MaxMinResult> maxmin;
    std::optional<TrajectorySolution> solution;
};

template <class Model>
TrajectoryInstance solve_trajectory_instance(const NetworkConfig& cfg, const Model& model, std::uint64_t seed,
                                             std::uint64_t index) {
    TrajectoryInstance inst;
    RandomStream rng(seed, index);
    inst.realization = sample_realization(cfg, cfg.simulation_window(), rng);
    const Point S = trajectory_start(cfg), D = trajectory_end(cfg);
    try {
        inst.maxmin = max_min_sinr(inst.realization, S, D, model, cfg);
    } catch (const NoRouteError&) {
        return inst;
    }
    inst.solution = min_time_trajectory(inst.maxmin->gamma_star, inst.maxmin->sequence, S, D, cfg.speed);
    return inst;
}

} // namespace aerialnet
