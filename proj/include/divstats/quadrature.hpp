#pragma once

// Globally adaptive Gauss-Kronrod (10/21) quadrature, QUADPACK-style error
// estimate. Semi-infinite ranges are mapped onto [0, 1) by t = lo + u/(1-u).

#include "divstats/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace divstats::specfun {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
            throw DomainError("QuadratureSpec requires abs_tol > 0, rel_tol > 0, max_subdivisions >= 1");
        }
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525168725, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights at kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod21(F& f, double lo, double hi, int& evaluations) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[10];
    double gauss = 0.0;
    double resabs = std::fabs(kronrod);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        kronrod += kWgk[j] * sum;
        resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    evaluations += 21;
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[10] * std::fabs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

    const double value = kronrod * half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(value) || !std::isfinite(err)) {
        throw DomainError("integrand is not finite on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return {lo, hi, value, err};
}

} // namespace detail

/// Integrates f over the consecutive pieces [p0,p1], [p1,p2], ... as one
/// globally adaptive problem. When `infinite_tail` is set, [p_last, inf) is
/// appended (mapped to a finite interval).
template <class F>
QuadratureResult integrate_breakpoints(F&& f, std::span<const double> points, const QuadratureSpec& spec,
                                       bool infinite_tail = false) {
    spec.validate();
    if (points.size() < 2 && !(infinite_tail && points.size() == 1)) {
        throw DomainError("integrate_breakpoints needs at least one interval");
    }
    QuadratureResult out;
    std::priority_queue<detail::Segment> heap;
    std::vector<detail::Segment> frozen;
    double total = 0.0;
    double total_err = 0.0;

    auto finite = [&](double t) { return f(t); };
    // Tail: t = a + s*u/(1-u), u in [0,1)
    const double tail_lo = points.back();
    const double tail_scale =
        points.size() >= 2 ? std::max(points.back() - points[points.size() - 2], 1e-300) : 1.0;
    auto tail = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double t = tail_lo + tail_scale * u / one_minus;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v * tail_scale / (one_minus * one_minus);
    };

    // Tail pieces live in u-space; keep them separate so the right integrand is used.
    std::priority_queue<detail::Segment> tail_heap;

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) throw DomainError("breakpoints must be strictly increasing");
        auto s = detail::gauss_kronrod21(finite, points[i], points[i + 1], out.evaluations);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }
    if (infinite_tail) {
        auto s = detail::gauss_kronrod21(tail, 0.0, 1.0, out.evaluations);
        total += s.value;
        total_err += s.error;
        tail_heap.push(s);
    }

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };
    while (total_err > tolerance()) {
        if (out.subdivisions >= spec.max_subdivisions) {
            throw ConvergenceError("adaptive quadrature hit max_subdivisions", total, total_err);
        }
        const bool use_tail = !tail_heap.empty() && (heap.empty() || tail_heap.top().error > heap.top().error);
        auto& q = use_tail ? tail_heap : heap;
        if (q.empty()) throw ConvergenceError("adaptive quadrature cannot subdivide further", total, total_err);
        const detail::Segment worst = q.top();
        q.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            frozen.push_back(worst);  // interval at floating-point resolution
            continue;
        }
        detail::Segment left{}, right{};
        if (use_tail) {
            left = detail::gauss_kronrod21(tail, worst.lo, mid, out.evaluations);
            right = detail::gauss_kronrod21(tail, mid, worst.hi, out.evaluations);
        } else {
            left = detail::gauss_kronrod21(finite, worst.lo, mid, out.evaluations);
            right = detail::gauss_kronrod21(finite, mid, worst.hi, out.evaluations);
        }
        ++out.subdivisions;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        q.push(left);
        q.push(right);
        if (out.subdivisions % 64 == 0) {
            // Re-sum to shed accumulated rounding in the running totals.
            double t = 0.0, e = 0.0;
            for (auto* h : {&heap, &tail_heap}) {
                auto copy = *h;
                while (!copy.empty()) {
                    t += copy.top().value;
                    e += copy.top().error;
                    copy.pop();
                }
            }
            for (const auto& s : frozen) {
                t += s.value;
                e += s.error;
            }
            total = t;
            total_err = e;
        }
    }
    out.value = total;
    out.error = total_err;
    return out;
}

/// Adaptive quadrature of f over [lo, hi]; hi may be +infinity.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!std::isfinite(lo)) throw DomainError("integrate_adaptive: lower limit must be finite");
    if (hi == lo) return {};
    if (std::isinf(hi) && hi > 0) {
        auto mapped = [&](double u) {
            if (u >= 1.0) return 0.0;
            const double one_minus = 1.0 - u;
            const double v = f(lo + u / one_minus);
            return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
        };
        const std::array<double, 2> unit = {0.0, 1.0};
        return integrate_breakpoints(mapped, unit, spec);
    }
    if (!(hi > lo)) {
        QuadratureResult r = integrate_adaptive(f, hi, lo, spec);
        r.value = -r.value;
        return r;
    }
    const std::array<double, 2> pts = {lo, hi};
    return integrate_breakpoints(f, pts, spec);
}

/// Geometric breakpoints lo + scale*2^k, k in [-octaves, octaves], starting at lo.
inline std::vector<double> geometric_breakpoints(double lo, double scale, int octaves = 40) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(2 * octaves + 2));
    pts.push_back(lo);
    for (int k = -octaves; k <= octaves; ++k) {
        const double p = lo + std::ldexp(scale, k);
        if (p > pts.back()) pts.push_back(p);
    }
    return pts;
}

/// Integral over [lo, inf) with breakpoints spread geometrically around `scale`.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double lo, double scale, const QuadratureSpec& spec = {},
                                         int octaves = 40) {
    const auto pts = geometric_breakpoints(lo, scale, octaves);
    return integrate_breakpoints(f, pts, spec, true);
}

/// Integral over [lo, hi] with geometric breakpoints around `scale` (clipped to hi).
template <class F>
QuadratureResult integrate_scaled(F&& f, double lo, double hi, double scale, const QuadratureSpec& spec = {},
                                  int octaves = 40) {
    if (!(hi > lo)) return {};
    auto pts = geometric_breakpoints(lo, scale, octaves);
    while (!pts.empty() && pts.back() >= hi) pts.pop_back();
    pts.push_back(hi);
    return integrate_breakpoints(f, pts, spec, false);
}

} // namespace divstats::specfun
