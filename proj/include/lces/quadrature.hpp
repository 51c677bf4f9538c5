#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

// Adaptive one- and two-dimensional quadrature on bounded intervals,
// built on the Gauss-Kronrod 7-15 pair with worst-segment-first refinement.

namespace lces::quad {

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double estimate_, double error_)
        : std::runtime_error(what), estimate(estimate_), error(error_) {}
    double estimate;
    double error;
};

namespace detail {

// Kronrod-15 abscissae (non-negative half) and weights; the embedded
// Gauss-7 rule uses nodes 0, 2, 4, 6 of this list.
inline constexpr double kXk15[8] = {
    0.0,
    0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
    0.9914553711208126};
inline constexpr double kWk15[8] = {
    0.2094821410847278,
    0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299785,
    0.0229353220105292};
inline constexpr double kWg7[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double vals[15];
    vals[7] = f(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kXk15[i];
        vals[7 - i] = f(mid - dx);
        vals[7 + i] = f(mid + dx);
    }
    double kron = kWk15[0] * vals[7];
    for (int i = 1; i < 8; ++i)
        kron += kWk15[i] * (vals[7 - i] + vals[7 + i]);
    double gauss = kWg7[0] * vals[7];
    for (int i = 1; i < 4; ++i)
        gauss += kWg7[i] * (vals[7 - 2 * i] + vals[7 + 2 * i]);
    kron *= half;
    gauss *= half;
    const double err = std::abs(kron - gauss);
    return Segment{a, b, kron, err};
}

} // namespace detail

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_segments = 5000;
    // Uniform seed mesh before adaptive refinement; guards against features
    // narrow enough to fall between the nodes of a single wide panel.
    int initial_segments = 8;
};

// Integrate f over [a, b]; throws QuadratureError when the tolerance is not
// reached within the segment budget.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (!(a < b))
        return 0.0;
    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double err = 0.0;
    const int seed = std::clamp(opt.initial_segments, 1, opt.max_segments);
    for (int i = 0; i < seed; ++i) {
        const double lo = a + (b - a) * i / seed;
        const double hi = i + 1 == seed ? b : a + (b - a) * (i + 1) / seed;
        detail::Segment s = detail::gauss_kronrod(f, lo, hi);
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int segments = seed;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (segments >= opt.max_segments)
            throw QuadratureError("integrate: tolerance not reached within segment budget",
                                  total, err);
        detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            // Interval no longer splittable in double precision: accept it.
            continue;
        }
        detail::Segment left = detail::gauss_kronrod(f, worst.a, mid);
        detail::Segment right = detail::gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++segments;
    }
    return total;
}

// Iterated 2-D integral over the rectangle [ax,bx] x [ay,by]: the outer
// adaptive pass runs over y, each evaluation integrating over x adaptively
// at a proportionally tightened tolerance.
template <class F>
double integrate_2d(F&& f, double ax, double bx, double ay, double by,
                    const QuadratureOptions& opt = {}) {
    if (!(ax < bx) || !(ay < by))
        return 0.0;
    QuadratureOptions inner = opt;
    inner.abs_tol = opt.abs_tol / (4.0 * (by - ay));
    inner.rel_tol = opt.rel_tol;
    QuadratureOptions outer = opt;
    outer.abs_tol = 0.5 * opt.abs_tol;
    auto slice = [&](double y) {
        return integrate([&](double x) { return f(x, y); }, ax, bx, inner);
    };
    return integrate(slice, ay, by, outer);
}

} // namespace lces::quad
