#pragma once

// Precision plumbing shared by the closed-form evaluators.
//
// Several closed forms are alternating finite sums whose terms can exceed
// the result by many orders of magnitude. Each such form is written once as
// a kernel templated on the real type; evaluate_stably() runs it in double,
// measures the cancellation, and re-runs it in MPFR with enough bits when the
// double result cannot be trusted.

#include "divstats/errors.hpp"
#include "divstats/mpfloat.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <type_traits>

namespace divstats::numeric {

using mp::Float;

inline double to_double(double x) { return x; }
inline double to_double(const Float& x) { return x.to_double(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Float& x) { return isfinite(x); }

template <class Real>
Real pi_v() {
    if constexpr (std::is_same_v<Real, double>) {
        return std::numbers::pi;
    } else {
        return Float::pi();
    }
}

/// Unit roundoff of Real at the current working precision.
template <class Real>
double epsilon() {
    if constexpr (std::is_same_v<Real, double>) {
        return 0x1.0p-53;
    } else {
        return std::ldexp(1.0, -static_cast<int>(mp::working_precision()));
    }
}

template <class Real>
Real ipow(Real base, int k) {
    const bool invert = k < 0;
    unsigned e = invert ? static_cast<unsigned>(-k) : static_cast<unsigned>(k);
    Real result(1);
    while (e != 0) {
        if (e & 1U) result *= base;
        e >>= 1U;
        if (e != 0) base *= base;
    }
    if (invert) return Real(1) / result;
    return result;
}

/// Signed running sum plus the sum of absolute values of its terms.
template <class Real>
struct Accum {
    Real value{0};
    Real magnitude{0};

    void add(const Real& term) {
        using std::fabs;
        value += term;
        magnitude += fabs(term);
    }
    void add(const Accum& other, const Real& factor) {
        using std::fabs;
        value += factor * other.value;
        magnitude += fabs(factor) * other.magnitude;
    }
    Accum& scale(const Real& factor) {
        using std::fabs;
        value *= factor;
        magnitude *= fabs(factor);
        return *this;
    }
};

template <class Real>
using RealTag = std::type_identity<Real>;

/// Largest magnitude/|value| ratio accepted from the double pass.
inline constexpr double kMaxDoubleCancellation = 8.0;
inline constexpr long kMaxPrecisionBits = 1L << 17;

/// Evaluates `kernel(RealTag<Real>) -> Accum<Real>` to double accuracy.
template <class Kernel>
double evaluate_stably(Kernel&& kernel) {
    {
        const Accum<double> d = kernel(RealTag<double>{});
        const double v = std::fabs(d.value);
        if (std::isfinite(d.value) && std::isfinite(d.magnitude) && d.magnitude > 1e-290 &&
            v > 0.0 && d.magnitude <= kMaxDoubleCancellation * v) {
            return d.value;
        }
        // An all-zero double pass may be underflow; MPFR's exponent range decides.
    }
    long bits = 128;
    while (true) {
        mp::PrecisionScope scope(bits);
        const Accum<Float> r = kernel(RealTag<Float>{});
        if (!isfinite(r.value) || !isfinite(r.magnitude)) {
            throw ConvergenceError("non-finite intermediate in closed-form evaluation",
                                   r.value.to_double(), INFINITY);
        }
        const double log_mag = log2_abs(r.magnitude);
        if (std::isinf(log_mag)) return 0.0;  // every term is exactly zero
        const double log_val = log2_abs(r.value);
        const double lost = std::isinf(log_val) ? static_cast<double>(bits) : log_mag - log_val;
        if (static_cast<double>(bits) - lost >= 64.0) return r.value.to_double();
        // A loss at or beyond the working precision means the value is pure rounding
        // noise and says nothing about the true cancellation, so just double.
        const long next = lost >= static_cast<double>(bits)
                              ? bits * 2
                              : std::max(bits * 2, static_cast<long>(std::ceil(lost)) + 96);
        if (next > kMaxPrecisionBits) {
            throw ConvergenceError("cancellation exceeds the precision ceiling",
                                   r.value.to_double(), r.magnitude.to_double());
        }
        bits = next;
    }
}

} // namespace divstats::numeric
