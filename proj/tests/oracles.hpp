#pragma once

// Reference implementations for the test suite. Nothing here calls into the
// library: integrals use a long-double tanh-sinh rule, densities are written
// out directly from their definitions.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using ld = long double;

/// Double-exponential quadrature of f over the finite interval [a, b].
/// Nodes never touch the endpoints, so integrable endpoint singularities are fine.
inline ld tanh_sinh(const std::function<ld(ld)>& f, ld a, ld b, ld rel = 1e-15L) {
    if (b == a) return 0.0L;
    const ld half = (b - a) / 2;
    const ld mid = (a + b) / 2;
    const ld pi2 = std::numbers::pi_v<ld> / 2;
    constexpr ld kTmax = 4.0L;
    // Contribution of the node pair at +-t (or the centre at t = 0).
    auto pair = [&](ld t) {
        const ld u = pi2 * std::sinh(t);
        const ld ch = std::cosh(u);
        const ld w = pi2 * std::cosh(t) / (ch * ch);
        if (t == 0) return w * f(mid);
        const ld gap = half * 2 / (std::exp(2 * u) + 1);  // half * (1 - tanh u)
        ld s = 0;
        if (gap != 0) {
            s += f(b - gap);
            s += f(a + gap);
        }
        return w * s;
    };
    ld h = 1;
    ld sum = pair(0);
    for (ld t = h; t <= kTmax; t += h) sum += pair(t);
    ld estimate = sum * h * half;
    for (int level = 1; level <= 12; ++level) {
        h /= 2;
        for (ld t = h; t <= kTmax; t += 2 * h) sum += pair(t);
        const ld next = sum * h * half;
        const ld diff = std::fabs(next - estimate);
        estimate = next;
        if (level >= 4 && diff <= rel * std::fabs(estimate)) break;
        if (level >= 4 && estimate == 0) break;
    }
    return estimate;
}

/// Sum of tanh_sinh over consecutive breakpoints.
inline ld integrate_pieces(const std::function<ld(ld)>& f, const std::vector<ld>& pts) {
    ld total = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += tanh_sinh(f, pts[i], pts[i + 1]);
    return total;
}

/// Integral over [lo, inf): geometric pieces lo + scale*2^k, k in [-20, 24], then a mapped tail.
inline ld integrate_to_infinity(const std::function<ld(ld)>& f, ld lo, ld scale) {
    std::vector<ld> pts{lo};
    for (int k = -20; k <= 24; ++k) pts.push_back(lo + std::ldexp(scale, k));
    const ld last = pts.back();
    // Integrands decay to zero, so overflow far out in the tail stands for zero.
    auto tail = [&](ld u) {
        const ld one_minus = 1 - u;
        const ld v = f(last + u / one_minus) / (one_minus * one_minus);
        return std::isfinite(v) ? v : 0.0L;
    };
    return integrate_pieces(f, pts) + tanh_sinh(tail, 0, 1);
}

/// P(m, x) = lower regularized incomplete gamma for integer m.
inline ld lower_gamma_p(int m, ld x) {
    if (x <= 0) return 0;
    if (x < m + 1) {
        ld term = 1;
        ld sum = 0;
        // x^m e^{-x} / m! * sum_k x^k / ((m+1)...(m+k))
        for (int k = 0; k < 10000; ++k) {
            sum += term;
            term *= x / (m + k + 1);
            if (term < 1e-22L * sum) break;
        }
        return sum * std::exp(m * std::log(x) - x - std::lgamma(static_cast<ld>(m) + 1));
    }
    ld term = 1;
    ld sum = 0;
    for (int j = 0; j < m; ++j) {
        if (j > 0) term *= x / j;
        sum += term;
    }
    return 1 - std::exp(-x) * sum;
}

inline ld nakagami_pdf(ld x, int m, ld omega) {
    if (x <= 0) return 0;
    return 2 * std::exp(m * std::log(m / omega) + (2 * m - 1) * std::log(x) - m * x * x / omega -
                        std::lgamma(static_cast<ld>(m)));
}

inline ld nakagami_cdf(ld x, int m, ld omega) { return lower_gamma_p(m, m * x * x / omega); }

/// Larger of two IID Nakagami envelopes.
inline ld selected_pdf(ld x, int m, ld omega) { return 2 * nakagami_cdf(x, m, omega) * nakagami_pdf(x, m, omega); }

/// Envelope of sqrt(sum of n Nakagami(m_I, omega_I)^2 powers + sigma2), y >= sigma.
inline ld interference_noise_pdf(ld y, int m_I, int n, ld omega_I, ld sigma2) {
    const ld p = y * y - sigma2;
    if (p <= 0) return 0;
    const int N = m_I * n;
    const ld b = m_I / omega_I;
    return 2 * y * std::exp(N * std::log(b) + (N - 1) * std::log(p) - b * p - std::lgamma(static_cast<ld>(N)));
}

struct Params {
    int m_S = 1;
    int m_I = 1;
    ld omega_S = 1;
    ld omega_I = 1;
    ld sigma2 = 1;
    int n = 1;
    ld f_m0 = 1;
    ld f_mi = 1;
};

/// Envelope-ratio density int_{sigma}^inf y f_x0(g y) f_y(y) dy.
inline ld ratio_pdf(ld g, const Params& p) {
    const ld sigma = std::sqrt(p.sigma2);
    auto f = [&](ld y) {
        return y * selected_pdf(g * y, p.m_S, p.omega_S) * interference_noise_pdf(y, p.m_I, p.n, p.omega_I, p.sigma2);
    };
    const ld scale = std::sqrt(p.n * p.omega_I);
    return integrate_to_infinity(f, sigma, scale);
}

/// P(x0 / y <= sqrt(z)) = int_{sigma}^inf F_x0(sqrt(z) y) f_y(y) dy, with F_x0 = F_branch^2.
inline ld ratio_cdf(ld z, const Params& p) {
    const ld sigma = std::sqrt(p.sigma2);
    const ld g = std::sqrt(z);
    auto f = [&](ld y) {
        const ld fb = nakagami_cdf(g * y, p.m_S, p.omega_S);
        return fb * fb * interference_noise_pdf(y, p.m_I, p.n, p.omega_I, p.sigma2);
    };
    const ld scale = std::sqrt(p.n * p.omega_I);
    return integrate_to_infinity(f, sigma, scale);
}

/// Rice LCR of the envelope ratio with Clarke derivative variances.
inline ld lcr_g(ld g, const Params& p) {
    const ld pi = std::numbers::pi_v<ld>;
    const ld var_x = pi * pi * p.f_m0 * p.f_m0 * p.omega_S / p.m_S;
    const ld var_w = pi * pi * p.f_mi * p.f_mi * p.omega_I / p.m_I;
    const ld sigma = std::sqrt(p.sigma2);
    auto f = [&](ld y) {
        return selected_pdf(g * y, p.m_S, p.omega_S) * interference_noise_pdf(y, p.m_I, p.n, p.omega_I, p.sigma2);
    };
    const ld scale = std::sqrt(p.n * p.omega_I);
    return std::sqrt((var_x + g * g * var_w) / (2 * pi)) * integrate_to_infinity(f, sigma, scale);
}

/// Relative difference |a - b| / |b| (absolute when b = 0).
inline double rel_diff(double a, double b) {
    if (b == 0.0) return std::fabs(a);
    return std::fabs(a - b) / std::fabs(b);
}

} // namespace oracle
