#pragma once

// Special functions used by the closed forms: gamma family, integer and
// half-integer order incomplete gamma, beta family (including the incomplete
// beta at a negative argument), Pochhammer and binomial coefficients.
//
// Functions that feed cancelling finite sums are templates on the real type
// so they can be instantiated with mp::Float.

#include "divstats/errors.hpp"
#include "divstats/numeric.hpp"
#include "divstats/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace divstats::specfun {

using numeric::Accum;
using numeric::ipow;

inline double gamma(double a) {
    if (!std::isfinite(a) || !(a > 0.0)) throw DomainError("gamma: argument must be positive and finite");
    return std::tgamma(a);
}

inline double beta(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(b > 0.0)) {
        throw DomainError("beta: arguments must be positive and finite");
    }
    if (a + b < 170.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

inline double pochhammer(double a, int j) {
    if (j < 0) throw DomainError("pochhammer: j must be nonnegative");
    double r = 1.0;
    for (int k = 0; k < j; ++k) r *= a + k;
    return r;
}

/// C(n, k) exactly, for results that fit in 64 bits.
inline std::uint64_t binomial_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) throw DomainError("binomial_u64: overflow");
    }
    return static_cast<std::uint64_t>(r);
}

/// C(n, k) as Real: exact integer arithmetic for n <= 64, floating point beyond.
template <class Real = double>
Real binomial(int n, int k) {
    if (n < 0 || k < 0) throw DomainError("binomial: arguments must be nonnegative");
    if (k > n) return Real(0);
    if (n <= 64) return Real(binomial_u64(static_cast<unsigned>(n), static_cast<unsigned>(k)));
    Real r(1);
    const int kk = std::min(k, n - k);
    for (int i = 1; i <= kk; ++i) r = r * Real(n - kk + i) / Real(i);
    return r;
}

enum class OrderKind { Integer, HalfInteger };

struct IncompleteGammaOrder {
    OrderKind kind;
    int steps;  // a = 1 + steps (Integer) or 1/2 + steps (HalfInteger)
};

/// Recognises the positive integer and half-integer orders (within 1e-9).
inline std::optional<IncompleteGammaOrder> classify_order(double a) {
    if (!std::isfinite(a) || !(a > 0.0)) return std::nullopt;
    const double r = std::round(a);
    if (std::fabs(a - r) <= 1e-9 && r >= 1.0) return IncompleteGammaOrder{OrderKind::Integer, static_cast<int>(r) - 1};
    const double h = std::round(a - 0.5);
    if (std::fabs(a - 0.5 - h) <= 1e-9 && h >= 0.0) {
        return IncompleteGammaOrder{OrderKind::HalfInteger, static_cast<int>(h)};
    }
    return std::nullopt;
}

/// Gamma at a positive integer or half-integer, built from factorial products.
template <class Real = double>
Real gamma_exact(IncompleteGammaOrder order) {
    Real r(1);
    if (order.kind == OrderKind::Integer) {
        for (int k = 2; k <= order.steps; ++k) r *= Real(k);
        return r;
    }
    using std::sqrt;
    r = sqrt(numeric::pi_v<Real>());
    for (int k = 0; k < order.steps; ++k) r *= Real(0.5) + Real(k);
    return r;
}

template <class Real = double>
Real gamma_exact(double a) {
    const auto order = classify_order(a);
    if (!order) throw DomainError("gamma_exact: order must be a positive integer or half-integer");
    return gamma_exact<Real>(*order);
}

namespace detail {

/// x^s e^{-x}, computed so that neither factor underflows on its own.
template <class Real>
Real power_times_exp(const Real& x, double s) {
    using std::exp;
    using std::log;
    if (x == Real(0)) return Real(s == 0.0 ? 1.0 : 0.0);
    return exp(Real(s) * log(x) - x);
}

} // namespace detail

/// Gamma(a0 + k, x) for k = 0..count-1 by upward recurrence
/// Gamma(s+1, x) = s Gamma(s, x) + x^s e^{-x}, starting from Gamma(1, x) = e^{-x}
/// or Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)).
template <class Real>
std::vector<Real> upper_incomplete_gamma_ladder(double a0, int count, const Real& x) {
    const auto order = classify_order(a0);
    if (!order) {
        throw DomainError("upper_incomplete_gamma: order " + std::to_string(a0) +
                          " is neither a positive integer nor a positive half-integer");
    }
    if (x < Real(0)) throw DomainError("upper_incomplete_gamma: x must be nonnegative");
    using std::erfc;
    using std::exp;
    using std::sqrt;
    const bool half = order->kind == OrderKind::HalfInteger;
    double s = half ? 0.5 : 1.0;
    Real value = half ? sqrt(numeric::pi_v<Real>()) * erfc(sqrt(x)) : exp(-x);
    [[maybe_unused]] Real power{};  // x^s e^{-x}, carried multiplicatively for MPFR types
    if constexpr (!std::is_same_v<Real, double>) power = detail::power_times_exp(x, s);

    std::vector<Real> out;
    out.reserve(static_cast<std::size_t>(count));
    const int total = order->steps + count;
    for (int step = 0; step < total; ++step) {
        if (step >= order->steps) out.push_back(value);
        if (step + 1 == total) break;
        if constexpr (std::is_same_v<Real, double>) {
            value = s * value + detail::power_times_exp(x, s);
        } else {
            value = Real(s) * value + power;
            power *= x;
        }
        s += 1.0;
    }
    return out;
}

/// Upper incomplete gamma Gamma(a, x) for positive integer or half-integer a.
template <class Real = double>
Real upper_incomplete_gamma(double a, const Real& x) {
    return upper_incomplete_gamma_ladder<Real>(a, 1, x).front();
}

inline double upper_incomplete_gamma(double a, double x) { return upper_incomplete_gamma<double>(a, x); }

template <class Real>
Real expint_e1(const Real& x) {
    if constexpr (std::is_same_v<Real, double>) {
        return -std::expint(-x);
    } else {
        return exponential_integral_e1(x);
    }
}

/// Gamma(s, x) for any integer s and x > 0. Orders s <= 0 start from
/// Gamma(0, x) = E1(x) and recur downward Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s.
template <class Real = double>
Real upper_incomplete_gamma_int(int s, const Real& x) {
    if (s >= 1) return upper_incomplete_gamma<Real>(static_cast<double>(s), x);
    if (!(x > Real(0))) throw DomainError("upper_incomplete_gamma_int: non-positive order needs x > 0");
    Real value = expint_e1<Real>(x);
    if (!numeric::is_finite(value)) throw DomainError("upper_incomplete_gamma_int: unsupported order");
    for (int k = -1; k >= s; --k) {
        value = (value - detail::power_times_exp(x, static_cast<double>(k))) / Real(k);
    }
    return value;
}

/// Gamma(m) e^{-u} sum_{j<m} u^j / j!  (finite series of Gamma(m, u), integer m).
inline double incomplete_gamma_series(int m, double u) {
    if (m < 1) throw DomainError("incomplete_gamma_series: m must be a positive integer");
    if (!(u >= 0.0)) throw DomainError("incomplete_gamma_series: u must be nonnegative");
    double sum = 0.0;
    if (u < 700.0) {
        double term = std::exp(-u);
        for (int j = 0; j < m; ++j) {
            if (j > 0) term *= u / j;
            sum += term;
        }
    } else {
        for (int j = 0; j < m; ++j) sum += std::exp(j * std::log(u) - u - std::lgamma(j + 1.0));
    }
    return gamma_exact<double>(static_cast<double>(m)) * sum;
}

/// P(m, x) = 1 - Gamma(m, x)/Gamma(m) for integer m, without cancellation near x = 0.
template <class Real = double>
Real regularized_lower_gamma_int(int m, const Real& x) {
    using std::exp;
    using std::fabs;
    if (m < 1) throw DomainError("regularized_lower_gamma_int: m must be a positive integer");
    if (x <= Real(0)) return Real(0);
    if (x < Real(m + 1)) {
        // e^{-x} sum_{j>=m} x^j / j!
        Real term = exp(-x);
        for (int j = 1; j <= m; ++j) term *= x / Real(j);
        Real sum(0);
        const double eps = numeric::epsilon<Real>();
        for (int j = m + 1; j < m + 100000; ++j) {
            sum += term;
            term *= x / Real(j);
            if (fabs(term) <= Real(eps) * fabs(sum)) break;
        }
        return sum + term;
    }
    Real term = exp(-x);
    Real sum(0);
    for (int j = 0; j < m; ++j) {
        if (j > 0) term *= x / Real(j);
        sum += term;
    }
    return Real(1) - sum;
}

/// I(z; a, b) = B_z(a, b) / B(a, b) by the Lentz continued fraction.
inline double regularized_beta(double z, double a, double b) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("regularized_beta: z must lie in [0, 1]");
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("regularized_beta: a and b must be positive");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;
    if (z > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_beta(1.0 - z, b, a);

    const double pa = std::pow(z, a);
    const double pb = std::pow(1.0 - z, b);
    double front;
    if (pa > 1e-290 && pb > 1e-290) {
        front = pa * pb / beta(a, b);
    } else {
        front = std::exp(a * std::log(z) + b * std::log1p(-z) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)));
    }

    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return front * h / a;
    }
    throw ConvergenceError("regularized_beta: continued fraction did not converge", front * h / a, INFINITY);
}

/// I(z; a, b) = z^a sum_{j<b} (a)_j (1-z)^j / j!, valid for positive integer b.
inline double regularized_beta_series(double z, double a, int b) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("regularized_beta_series: z must lie in [0, 1]");
    if (b < 1) throw DomainError("regularized_beta_series: b must be a positive integer");
    double term = 1.0;
    double sum = 0.0;
    const double w = 1.0 - z;
    for (int j = 0; j < b; ++j) {
        if (j > 0) term *= (a + j - 1) * w / j;
        sum += term;
    }
    return std::pow(z, a) * sum;
}

template <class Real>
struct SeriesOutcome {
    Accum<Real> sum;
    bool converged = true;
};

/// B(z; a, b) = int_0^z t^{a-1} (1-t)^{b-1} dt for z <= 0 and integer a >= 1,
/// via (z^a/a) 2F1(a, 1-b; a+1; z). For |z| >= 1/2, or whenever a+b is a
/// non-positive integer, the Pfaff-transformed series in w = z/(z-1),
/// (-w)^a sum_k (a+b)_k w^k / (k! (a+k)), is used; it terminates in the
/// latter case.
template <class Real>
SeriesOutcome<Real> incomplete_beta_neg_series(const Real& z, int a, double b, int max_terms = 10000) {
    using std::fabs;
    SeriesOutcome<Real> out;
    if (z == Real(0)) return out;
    const double apb = a + b;
    const bool terminating = apb <= 1e-9 && std::fabs(apb - std::round(apb)) <= 1e-9;
    const bool transformed = terminating || fabs(z) >= Real(0.5);
    const Real x = transformed ? z / (z - Real(1)) : z;
    const double p = terminating ? std::round(apb) : (transformed ? apb : 1.0 - b);
    const Real front = transformed ? ipow(Real(-1) * x, a) : ipow(z, a);
    const double eps = numeric::epsilon<Real>();

    Real coeff(1);  // (p)_k x^k / k!
    for (int k = 0; k < max_terms; ++k) {
        const Real term = front * coeff / Real(a + k);
        out.sum.add(term);
        coeff *= Real(p + k) * x / Real(k + 1);
        if (coeff == Real(0)) return out;  // terminated
        if (k > 0 && fabs(term) <= Real(eps) * fabs(out.sum.value)) return out;
    }
    out.converged = false;
    return out;
}

struct IncompleteBetaNegResult {
    double value = 0.0;
    bool quadrature_fallback = false;
};

inline IncompleteBetaNegResult incomplete_beta_neg_detailed(double z, int a, double b,
                                                            const QuadratureSpec& spec = {}) {
    if (!(z <= 0.0)) throw DomainError("incomplete_beta_neg: z must be non-positive (use regularized_beta)");
    if (a < 1) throw DomainError("incomplete_beta_neg: a must be a positive integer");
    if (!std::isfinite(b)) throw DomainError("incomplete_beta_neg: b must be finite");
    if (z == 0.0) return {};
    bool converged = true;
    const double value = numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        auto r = incomplete_beta_neg_series<Real>(Real(z), a, b);
        converged = r.converged;
        return r.sum;
    });
    if (converged) return {value, false};
    QuadratureSpec tight = spec;
    tight.abs_tol = std::min(spec.abs_tol, 1e-300);
    auto integrand = [&](double t) { return std::pow(t, a - 1) * std::pow(1.0 - t, b - 1.0); };
    return {integrate_adaptive(integrand, 0.0, z, tight).value, true};
}

inline double incomplete_beta_neg(double z, int a, double b) { return incomplete_beta_neg_detailed(z, a, b).value; }

} // namespace divstats::specfun
