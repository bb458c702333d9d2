#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "aerialnet/errors.hpp"
#include "aerialnet/units.hpp"

namespace aerialnet {

struct QuadPolicy {
    double rel_tol = 1e-6;
    double abs_tol = 1e-14;
    int max_depth = 40;
    double truncation_radius = 30000.0; // m
    std::vector<double> breakpoints;

    QuadPolicy with_rel_tol(double tol) const {
        QuadPolicy p = *this;
        p.rel_tol = tol;
        p.breakpoints.clear();
        return p;
    }
    QuadPolicy with_breakpoints(std::vector<double> points) const {
        QuadPolicy p = *this;
        p.breakpoints = std::move(points);
        return p;
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

struct Segment {
    double a, b;
    double value, error;
    int depth;
};

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208005271284, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

// 21-point Kronrod rule with the embedded 10-point Gauss rule; error
// heuristic as in QUADPACK's qk21.
template <class F>
Segment gk21(F& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = 0.0;
    double resk = fc * kWgk[10];
    double resabs = std::abs(resk);
    double fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double ah = std::abs(half);
    const double result = resk * half;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(result)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "non-finite integrand on [%.9g, %.9g]", a, b);
        throw NumericsError(buf);
    }
    return {a, b, result, err, depth};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod quadrature over [a, b], pre-split at every
// policy breakpoint inside the interval.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadPolicy& policy) {
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate(f, b, a, policy);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts{a};
    for (double x : policy.breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto by_error = [](const detail::Segment& l, const detail::Segment& r) { return l.error < r.error; };
    std::vector<detail::Segment> heap;
    std::vector<detail::Segment> frozen;
    double value = 0.0, error = 0.0;
    int evals = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(detail::gk21(f, cuts[i], cuts[i + 1], 0));
        evals += 21;
        value += heap.back().value;
        error += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), by_error);

    auto tolerance = [&] { return std::max(policy.abs_tol, policy.rel_tol * std::abs(value)); };
    constexpr std::size_t max_segments = 4000;
    while (error > tolerance() && !heap.empty() && heap.size() + frozen.size() < max_segments) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const detail::Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.depth >= policy.max_depth || mid <= worst.a || mid >= worst.b) {
            frozen.push_back(worst);
            continue;
        }
        const detail::Segment left = detail::gk21(f, worst.a, mid, worst.depth + 1);
        const detail::Segment right = detail::gk21(f, mid, worst.b, worst.depth + 1);
        evals += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }

    value = 0.0;
    error = 0.0;
    for (const auto& s : heap) value += s.value, error += s.error;
    for (const auto& s : frozen) value += s.value, error += s.error;
    if (error > tolerance()) {
        std::string trace;
        std::sort(frozen.begin(), frozen.end(), [](auto& l, auto& r) { return l.error > r.error; });
        for (std::size_t i = 0; i < frozen.size() && i < 3; ++i) {
            char buf[160];
            std::snprintf(buf, sizeof buf, " [%.9g, %.9g] err=%.3g depth=%d;", frozen[i].a, frozen[i].b,
                          frozen[i].error, frozen[i].depth);
            trace += buf;
        }
        char head[200];
        std::snprintf(head, sizeof head, "quadrature did not converge on [%.9g, %.9g]: value=%.12g error=%.3g tol=%.3g;",
                      a, b, value, error, tolerance());
        throw NumericsError(head + trace);
    }
    return {value, error, evals};
}

template <class F>
double integrate_value(F&& f, double a, double b, const QuadPolicy& policy) {
    return integrate(std::forward<F>(f), a, b, policy).value;
}

// Semi-infinite integral over [a, inf), truncated at the policy radius.
template <class F>
QuadResult integrate_to_truncation(F&& f, double a, const QuadPolicy& policy) {
    return integrate(std::forward<F>(f), a, std::max(a, policy.truncation_radius), policy);
}

// For slowly decaying tails: [a, a+scale] is integrated directly and the rest
// in the variable t = log(x - a), which makes power-law tails nearly flat.
template <class F>
QuadResult integrate_tail(F&& f, double a, double b, double scale, const QuadPolicy& policy) {
    if (b <= a) return {};
    const double split = a + scale;
    if (b <= 4.0 * scale + a) return integrate(f, a, b, policy);
    QuadResult head = integrate(f, a, split, policy);
    QuadPolicy mapped = policy;
    mapped.breakpoints.clear();
    for (double x : policy.breakpoints)
        if (x > split && x < b) mapped.breakpoints.push_back(std::log(x - a));
    auto g = [&](double t) {
        const double w = std::exp(t);
        return f(a + w) * w;
    };
    QuadResult tail = integrate(g, std::log(scale), std::log(b - a), mapped);
    return {head.value + tail.value, head.error + tail.error, head.evaluations + tail.evaluations};
}

// Five-point central difference.
template <class F>
double derivative(F&& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "bisect: [%.9g, %.9g] does not bracket a root (f=%.3g, %.3g)", lo, hi, flo, fhi);
        throw NumericsError(buf);
    }
    for (int i = 0; i < max_iter && std::abs(hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes);
// monotone data gives a monotone interpolant.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw InvalidParameter("Pchip: need at least two matching nodes");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw InvalidParameter("Pchip: abscissae must increase");
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_.assign(n, 0.0);
        if (n == 2) {
            m_[0] = m_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) continue;
            const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        m_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        m_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double operator()(double t) const {
        if (t <= x_.front()) return y_.front();
        if (t >= x_.back()) return y_.back();
        const std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin() - 1;
        const double h = x_[i + 1] - x_[i], s = (t - x_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * m_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
               (s3 - s2) * h * m_[i + 1];
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

private:
    static double end_slope(double h0, double h1, double d0, double d1) {
        double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(m) > std::abs(3 * d0)) m = 3 * d0;
        return m;
    }

    std::vector<double> x_, y_, m_;
};

struct GaussLegendre {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights; // sum to 2

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1) p0 = 1.0, p1 = x;
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

// Cached quadrature rule for theta ~ Uniform(0, pi/2): weights sum to one.
struct ThetaRule {
    std::vector<double> theta;
    std::vector<double> weight;
};

inline const ThetaRule& theta_rule(int n = 16) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<ThetaRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        if (n < 1) throw InvalidParameter("theta rule needs at least one node");
        GaussLegendre gl(n);
        slot = std::make_unique<ThetaRule>();
        for (int i = 0; i < n; ++i) {
            slot->theta.push_back(0.25 * pi * (gl.nodes[i] + 1.0));
            slot->weight.push_back(0.5 * gl.weights[i]);
        }
    }
    return *slot;
}

template <class G>
double expect_theta(G&& g, int nodes = 16) {
    const ThetaRule& rule = theta_rule(nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.theta.size(); ++i) sum += rule.weight[i] * g(rule.theta[i]);
    return sum;
}

// Rethrows a NumericsError with a label prepended.
template <class F>
auto with_context(const std::string& label, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericsError& e) {
        throw NumericsError(label + ": " + e.what());
    }
}

} // namespace aerialnet
