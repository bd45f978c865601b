#pragma once

// Thin RAII value type over MPFR. Precision is taken from a thread-local
// working precision so that generic numeric templates can be instantiated
// with it exactly as with double.

// <cstdint> must precede <mpfr.h> to enable the intmax_t interfaces.
#include <cstdint>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>

namespace divstats::mp {

inline mpfr_prec_t& working_precision() {
    thread_local mpfr_prec_t bits = 128;
    return bits;
}

/// Sets the working precision (in bits) for the current thread until destroyed.
class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits) : saved_(working_precision()) {
        working_precision() = std::clamp<mpfr_prec_t>(bits, MPFR_PREC_MIN, MPFR_PREC_MAX);
    }
    ~PrecisionScope() { working_precision() = saved_; }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

class Float {
public:
    Float() { init(); mpfr_set_zero(v_, 1); }
    Float(double d) { init(); mpfr_set_d(v_, d, MPFR_RNDN); }  // NOLINT(implicit)
    template <class I, std::enable_if_t<std::is_integral_v<I> && std::is_signed_v<I>, int> = 0>
    Float(I i) { init(); mpfr_set_si(v_, static_cast<long>(i), MPFR_RNDN); }  // NOLINT
    template <class I, std::enable_if_t<std::is_integral_v<I> && std::is_unsigned_v<I>, int> = 0>
    Float(I i) { init(); mpfr_set_uj(v_, static_cast<std::uintmax_t>(i), MPFR_RNDN); }  // NOLINT

    Float(const Float& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Float(Float&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Float& operator=(const Float& o) {
        if (this != &o) {
            mpfr_set_prec(v_, std::max(mpfr_get_prec(v_), mpfr_get_prec(o.v_)));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Float& operator=(Float&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Float() { mpfr_clear(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }

    static Float pi() {
        Float r;
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    Float& operator+=(const Float& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Float& operator-=(const Float& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Float& operator*=(const Float& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Float& operator/=(const Float& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend Float operator+(Float a, const Float& b) { return a += b; }
    friend Float operator-(Float a, const Float& b) { return a -= b; }
    friend Float operator*(Float a, const Float& b) { return a *= b; }
    friend Float operator/(Float a, const Float& b) { return a /= b; }
    friend Float operator-(Float a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }

    friend bool operator==(const Float& a, const Float& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Float& a, const Float& b) { return !(a == b); }
    friend bool operator<(const Float& a, const Float& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Float& a, const Float& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Float& a, const Float& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Float& a, const Float& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

    friend Float exp(Float a) { mpfr_exp(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Float log(Float a) { mpfr_log(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Float sqrt(Float a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Float erfc(Float a) { mpfr_erfc(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Float abs(Float a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
    friend Float fabs(Float a) { return abs(std::move(a)); }
    friend Float pow(Float a, const Float& b) { mpfr_pow(a.v_, a.v_, b.v_, MPFR_RNDN); return a; }
    friend bool isfinite(const Float& a) { return mpfr_number_p(a.v_) != 0; }

    /// E1(x) = -Ei(-x) for x > 0.
    friend Float exponential_integral_e1(Float a) {
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        mpfr_eint(a.v_, a.v_, MPFR_RNDN);
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        return a;
    }

    /// log2 |a|, or -inf for zero.
    friend double log2_abs(const Float& a) {
        if (mpfr_zero_p(a.v_)) return -INFINITY;
        long exponent = 0;
        const double mant = mpfr_get_d_2exp(&exponent, a.v_, MPFR_RNDN);
        return std::log2(std::fabs(mant)) + static_cast<double>(exponent);
    }

private:
    void init() { mpfr_init2(v_, working_precision()); }

    mpfr_t v_;
};

} // namespace divstats::mp
