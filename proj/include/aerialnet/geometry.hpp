#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aerialnet/errors.hpp"
#include "aerialnet/rng.hpp"
#include "aerialnet/units.hpp"

namespace aerialnet {

// Lengths are meters throughout.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

inline double horizontal_distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Line {x cos(phi) + y sin(phi) = rho}, phi in [0, pi).
struct LineRT {
    double rho = 0.0;
    double phi = 0.0;

    Point normal() const { return {std::cos(phi), std::sin(phi)}; }
    Point direction() const { return {-std::sin(phi), std::cos(phi)}; }
    Point foot() const { return rho * normal(); }
    Point at(double t) const { return foot() + t * direction(); }
    double coordinate(Point p) const { return dot(p, direction()); }
};

inline double point_line_distance(Point p, const LineRT& l) {
    return std::abs(p.x * std::cos(l.phi) + p.y * std::sin(l.phi) - l.rho);
}

struct Window {
    double half_side = 12500.0;

    double area() const { return 4.0 * half_side * half_side; }
    double circumradius() const { return half_side * std::sqrt(2.0); }
    bool contains(Point p) const { return std::abs(p.x) <= half_side && std::abs(p.y) <= half_side; }
};

struct Road {
    LineRT line;
    std::vector<Point> points;
};

struct NetworkRealization {
    std::vector<Point> tbs;
    std::vector<Road> roads;
    Window window;

    std::size_t dedicated_count() const {
        std::size_t n = 0;
        for (const auto& r : roads) n += r.points.size();
        return n;
    }
};

inline std::uint64_t sample_poisson(double mean, RandomStream& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

// density in points per m^2.
inline std::vector<Point> sample_ppp(double density, const Window& window, RandomStream& rng) {
    if (!(density >= 0.0)) throw InvalidParameter("sample_ppp: density must be non-negative");
    if (!(window.half_side > 0.0)) throw InvalidParameter("sample_ppp: window half_side must be positive");
    const std::uint64_t n = sample_poisson(density * window.area(), rng);
    std::vector<Point> pts;
    pts.reserve(n);
    const double h = window.half_side;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-h, h);
        const double y = rng.uniform(-h, h);
        pts.push_back({x, y});
    }
    return pts;
}

// line_density: lines per unit (rho, phi) measure on rho >= 0, phi in [0, 2 pi),
// so a disk of radius R is hit by Poisson(2 pi line_density R) lines.
// point_density: points per m along each line.
inline std::vector<Road> sample_plcp(double line_density, double point_density, const Window& window,
                                     RandomStream& rng) {
    if (!(line_density >= 0.0) || !(point_density >= 0.0))
        throw InvalidParameter("sample_plcp: densities must be non-negative");
    if (!(window.half_side > 0.0)) throw InvalidParameter("sample_plcp: window half_side must be positive");
    const double R = window.circumradius();
    const std::uint64_t n_lines = sample_poisson(2.0 * pi * line_density * R, rng);
    std::vector<Road> roads;
    roads.reserve(n_lines);
    for (std::uint64_t i = 0; i < n_lines; ++i) {
        Road road;
        road.line.rho = rng.uniform(-R, R);
        road.line.phi = rng.uniform(0.0, pi);
        const double half_chord = std::sqrt(std::max(0.0, R * R - road.line.rho * road.line.rho));
        const std::uint64_t n_pts = sample_poisson(point_density * 2.0 * half_chord, rng);
        for (std::uint64_t k = 0; k < n_pts; ++k) {
            const Point p = road.line.at(rng.uniform(-half_chord, half_chord));
            if (window.contains(p)) road.points.push_back(p);
        }
        roads.push_back(std::move(road));
    }
    return roads;
}

// Parameter interval of the line inside the window (empty if lo > hi).
inline std::pair<double, double> clip_line(const LineRT& l, const Window& w) {
    const Point f = l.foot(), d = l.direction();
    double lo = -INFINITY, hi = INFINITY;
    const double h = w.half_side;
    for (int axis = 0; axis < 2; ++axis) {
        const double o = axis == 0 ? f.x : f.y;
        const double v = axis == 0 ? d.x : d.y;
        if (std::abs(v) < 1e-300) {
            if (std::abs(o) > h) return {1.0, 0.0};
            continue;
        }
        double t1 = (-h - o) / v, t2 = (h - o) / v;
        if (t1 > t2) std::swap(t1, t2);
        lo = std::max(lo, t1);
        hi = std::min(hi, t2);
    }
    return {lo, hi};
}

} // namespace aerialnet
