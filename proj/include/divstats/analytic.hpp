#pragma once

// Closed-form first- and second-order statistics of the dual selection
// combiner output: envelope and ratio densities, outage probability, level
// crossing rate and average fade duration, in the general (interference plus
// noise), interference-limited and noise-limited regimes.
//
// Notation used below: m = m_S, N = m_I n, x = g^2/mu = z/mu,
// c = sigma^2 m_I / Omega_I.

#include "divstats/errors.hpp"
#include "divstats/model.hpp"
#include "divstats/numeric.hpp"
#include "divstats/quadrature.hpp"
#include "divstats/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace divstats::analytic {

using numeric::Accum;
using numeric::ipow;
using specfun::QuadratureSpec;

// ---------------------------------------------------------------------------
// Envelope densities

inline double nakagami_pdf(double x, int m, double omega) {
    if (m < 1) throw DomainError("nakagami_pdf: m must be a positive integer");
    if (!(omega > 0.0)) throw DomainError("nakagami_pdf: omega must be positive");
    if (!(x >= 0.0)) throw DomainError("nakagami_pdf: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double u = m * x * x / omega;
    const double g = specfun::gamma_exact<double>(static_cast<double>(m));
    if (u < 700.0) {
        const double direct = std::pow(m / omega, m) * 2.0 * std::pow(x, 2 * m - 1) / g * std::exp(-u);
        if (std::isfinite(direct) && direct > 0.0) return direct;
    }
    // 2 u^m e^{-u} / (x Gamma(m))
    return 2.0 / x * std::exp(m * std::log(u) - u - std::lgamma(static_cast<double>(m)));
}

inline double nakagami_cdf(double x, int m, double omega) {
    if (m < 1) throw DomainError("nakagami_cdf: m must be a positive integer");
    if (!(omega > 0.0)) throw DomainError("nakagami_cdf: omega must be positive");
    if (!(x >= 0.0)) throw DomainError("nakagami_cdf: x must be nonnegative");
    return specfun::regularized_lower_gamma_int<double>(m, m * x * x / omega);
}

/// Density of x0 = max(x01, x02) for IID Nakagami(m_S, Omega_S) branches.
inline double selected_envelope_pdf(double x, const SystemConfig& cfg) {
    return 2.0 * nakagami_pdf(x, cfg.m_S, cfg.omega_S) * nakagami_cdf(x, cfg.m_S, cfg.omega_S);
}

/// Envelope of the summed interference in the selected branch: Nakagami(m_I n, n Omega_I).
inline double interference_envelope_pdf(double w, const SystemConfig& cfg) {
    if (!(cfg.omega_I > 0.0)) throw DomainError("interference_envelope_pdf: omega_I must be positive");
    return nakagami_pdf(w, cfg.m_I * cfg.n, cfg.n * cfg.omega_I);
}

/// Density of y = sqrt(w^2 + sigma^2), supported on y >= sigma.
inline double interference_plus_noise_pdf(double y, const SystemConfig& cfg) {
    if (!(cfg.omega_I > 0.0)) {
        throw DomainError("interference_plus_noise_pdf: omega_I = 0 is a point mass at sigma");
    }
    const double sigma = std::sqrt(cfg.sigma2);
    if (!(y >= sigma)) return 0.0;
    const int N = cfg.m_I * cfg.n;
    const double b = cfg.m_I / cfg.omega_I;
    const double v = (y - sigma) * (y + sigma);
    const double g = specfun::gamma_exact<double>(static_cast<double>(N));
    const double bv = b * v;
    if (bv < 700.0) {
        const double direct = std::pow(b, N) * 2.0 * y * std::pow(v, N - 1) / g * std::exp(-bv);
        if (std::isfinite(direct)) return direct;
    }
    return 2.0 * y * b * std::exp((N - 1) * std::log(bv) - bv - std::lgamma(static_cast<double>(N)));
}

// ---------------------------------------------------------------------------
// Closed-form kernels. Each returns the signed sum together with the sum of
// term magnitudes so numeric::evaluate_stably can pick the precision.

namespace detail {

struct Shape {
    int m;     // m_S
    int N;     // m_I n
    double mu;
    double c;
};

inline Shape shape_of(const SystemConfig& cfg) {
    const auto d = derive(cfg);
    return {cfg.m_S, cfg.m_I * cfg.n, d.mu, d.c};
}

inline void require(const SystemConfig& cfg, Regime wanted, const char* op) {
    const Regime r = derive(cfg).regime;
    if (r == wanted) return;
    std::string hint;
    switch (r) {
    case Regime::General: hint = "use the general (interference plus noise) form"; break;
    case Regime::InterferenceLimited: hint = "use the signal-to-interference form"; break;
    case Regime::NoiseLimited: hint = "use the noise-only form"; break;
    }
    throw RegimeError(std::string(op) + ": config is in the " + to_string(r) + " regime; " + hint);
}

/// x^{m-1/2}
template <class Real>
Real half_power(const Real& x, int m) {
    using std::sqrt;
    return ipow(x, m - 1) * sqrt(x);
}

/// Shared body of the ratio density (offset = 1) and the LCR sum (offset = 1/2):
///   sum_{i=1}^{N} C(N-1, i-1) (-c)^{N-i} [ Gamma(m+i-1+offset, c X1) / X1^{m+i-1+offset}
///       - X2^{-(m+i-1+offset)} sum_{j<m} r^j/j! Gamma(m+i+j-1+offset, c X2) ]
/// with X1 = 1+x, X2 = 1+2x, r = x/X2. Returns the bare sum.
template <class Real>
Accum<Real> general_bracket_sum(const Real& x, const Real& c, int m, int N, bool half_orders) {
    using std::sqrt;
    const Real X1 = Real(1) + x;
    const Real X2 = Real(1) + Real(2) * x;
    const Real r = x / X2;
    const double first_order = half_orders ? m + 0.5 : m + 1.0;  // order at i = 1, j = 0
    const auto g1 = specfun::upper_incomplete_gamma_ladder<Real>(first_order, N, c * X1);
    const auto g2 = specfun::upper_incomplete_gamma_ladder<Real>(first_order, N + m - 1, c * X2);
    const Real root1 = half_orders ? sqrt(X1) : Real(1);
    const Real root2 = half_orders ? sqrt(X2) : Real(1);

    std::vector<Real> rj(static_cast<std::size_t>(m));
    rj[0] = Real(1);
    for (int j = 1; j < m; ++j) rj[j] = rj[j - 1] * r / Real(j);

    Accum<Real> acc;
    const Real minus_c = Real(-1) * c;
    for (int i = 1; i <= N; ++i) {
        const Real coef = specfun::binomial<Real>(N - 1, i - 1) * ipow(minus_c, N - i);
        if (coef == Real(0)) continue;
        // Integer part of the exponent is m+i (offset 1) or m+i-1 (offset 1/2).
        const int p = half_orders ? m + i - 1 : m + i;
        acc.add(coef * g1[i - 1] / (ipow(X1, p) * root1));
        const Real inv2 = coef / (ipow(X2, p) * root2);
        for (int j = 0; j < m; ++j) acc.add(Real(-1) * inv2 * rj[j] * g2[i - 1 + j]);
    }
    return acc;
}

/// Interference-limited bracket with full gammas:
///   Gamma(p)/X1^p - X2^{-p} sum_{j<m} Gamma(p+j)/j! r^j
template <class Real>
Accum<Real> limit_bracket_sum(const Real& x, int m, double p) {
    using std::sqrt;
    const Real X1 = Real(1) + x;
    const Real X2 = Real(1) + Real(2) * x;
    const Real r = x / X2;
    const bool half = p != std::floor(p);
    const int ip = static_cast<int>(std::floor(p));
    const Real X1p = ipow(X1, ip) * (half ? sqrt(X1) : Real(1));
    const Real X2p = ipow(X2, ip) * (half ? sqrt(X2) : Real(1));
    Real gpj = specfun::gamma_exact<Real>(p);  // Gamma(p + j)
    Accum<Real> acc;
    acc.add(gpj / X1p);
    Real term = gpj;
    for (int j = 0; j < m; ++j) {
        if (j > 0) term *= (Real(p) + Real(j - 1)) * r / Real(j);
        acc.add(Real(-1) * term / X2p);
    }
    return acc;
}

template <class Real>
Real gamma_product(int m, int N) {
    return specfun::gamma_exact<Real>(static_cast<double>(m)) * specfun::gamma_exact<Real>(static_cast<double>(N));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Envelope-ratio and SINR densities

/// Closed-form density of g = x0/y in the general regime (finite double sum).
inline double envelope_ratio_pdf(double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::General, "envelope_ratio_pdf");
    if (!(g >= 0.0)) throw DomainError("envelope_ratio_pdf: g must be nonnegative");
    if (g == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = g * g / s.mu;
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        using std::exp;
        using std::sqrt;
        const Real xr(x);
        const Real cr(s.c);
        auto acc = detail::general_bracket_sum<Real>(xr, cr, s.m, s.N, false);
        const Real front = Real(4) / sqrt(Real(s.mu)) * detail::half_power(xr, s.m) * exp(cr) /
                           detail::gamma_product<Real>(s.m, s.N);
        return acc.scale(front);
    });
}

/// Interference-limited density of g_I = x0/w via the regularized beta function.
inline double sir_envelope_ratio_pdf(double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::InterferenceLimited, "sir_envelope_ratio_pdf");
    if (!(g >= 0.0)) throw DomainError("sir_envelope_ratio_pdf: g must be nonnegative");
    if (g == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = g * g / s.mu;
    const double powers = std::pow(x / (1.0 + x), s.m - 0.5) * std::pow(1.0 + x, -(s.N + 0.5));
    const double ib = specfun::regularized_beta(1.0 / (2.0 + 1.0 / x), s.m, s.m + s.N);
    return 4.0 / std::sqrt(s.mu) / specfun::beta(s.m, s.N) * powers * ib;
}

/// The same density written as the sigma -> 0 limit of the general sum
/// (only the i = N term survives and the incomplete gammas become complete).
inline double sir_envelope_ratio_pdf_series(double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::InterferenceLimited, "sir_envelope_ratio_pdf_series");
    if (!(g >= 0.0)) throw DomainError("sir_envelope_ratio_pdf_series: g must be nonnegative");
    if (g == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = g * g / s.mu;
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        using std::sqrt;
        const Real xr(x);
        auto acc = detail::limit_bracket_sum<Real>(xr, s.m, s.m + s.N);
        const Real front =
            Real(4) / sqrt(Real(s.mu)) * detail::half_power(xr, s.m) / detail::gamma_product<Real>(s.m, s.N);
        return acc.scale(front);
    });
}

/// Density of g = x0/sigma without interference.
inline double snr_envelope_ratio_pdf(double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::NoiseLimited, "snr_envelope_ratio_pdf");
    if (!(g >= 0.0)) throw DomainError("snr_envelope_ratio_pdf: g must be nonnegative");
    const double sigma = std::sqrt(cfg.sigma2);
    return sigma * selected_envelope_pdf(sigma * g, cfg);
}

/// Envelope-ratio density in whichever regime the config is in.
inline double ratio_pdf(double g, const SystemConfig& cfg) {
    switch (derive(cfg).regime) {
    case Regime::General: return envelope_ratio_pdf(g, cfg);
    case Regime::InterferenceLimited: return sir_envelope_ratio_pdf(g, cfg);
    case Regime::NoiseLimited: return snr_envelope_ratio_pdf(g, cfg);
    }
    return 0.0;
}

/// f_z(z) = f_g(sqrt z) / (2 sqrt z); zero at z = 0 since f_g(g) = O(g^{4 m_S - 1}).
inline double sinr_pdf(double z, const SystemConfig& cfg) {
    if (!(z >= 0.0)) throw DomainError("sinr_pdf: z must be nonnegative");
    validate(cfg);
    if (z == 0.0) return 0.0;
    const double g = std::sqrt(z);
    return ratio_pdf(g, cfg) / (2.0 * g);
}

// ---------------------------------------------------------------------------
// Outage probability

/// Closed-form right side of
///   int_0^{zmu} t^{a-1} (1+t)^{-b} e^{-ct} dt
///     = (-1)^a e^c c^{b-1} sum_{k<a} C(a-1,k) (-c)^{-k} [Gamma(k+1-b, c(1+zmu)) - Gamma(k+1-b, c)].
inline double series_integral_identity(int a, int b, double c, double zmu) {
    if (a < 1 || b < 1) throw DomainError("series_integral_identity: a and b must be positive integers");
    if (!(c > 0.0) || !(zmu > 0.0)) throw DomainError("series_integral_identity: c and zmu must be positive");
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        using std::exp;
        const Real cr(c);
        const Real hi = cr * (Real(1) + Real(zmu));
        Accum<Real> acc;
        for (int k = 0; k < a; ++k) {
            const int order = k + 1 - b;
            const Real coef = specfun::binomial<Real>(a - 1, k) * ipow(Real(-1) * cr, -k);
            acc.add(coef * specfun::upper_incomplete_gamma_int<Real>(order, hi));
            acc.add(Real(-1) * coef * specfun::upper_incomplete_gamma_int<Real>(order, cr));
        }
        const Real front = ipow(Real(-1), a) * exp(cr) * ipow(cr, b - 1);
        return acc.scale(front);
    });
}

struct CdfResult {
    double value = 0.0;
    bool quadrature_fallback = false;
};

/// Interference-limited SIR CDF from incomplete beta functions at negative arguments.
inline CdfResult sir_cdf_detailed(double z, const SystemConfig& cfg, const QuadratureSpec& spec = {}) {
    detail::require(cfg, Regime::InterferenceLimited, "sir_cdf");
    if (!(z >= 0.0)) throw DomainError("sir_cdf: z must be nonnegative");
    if (z == 0.0) return {};
    const auto s = detail::shape_of(cfg);
    const double x = z / s.mu;
    bool converged = true;
    double value = 0.0;
    try {
        value = numeric::evaluate_stably([&](auto tag) {
            using Real = typename decltype(tag)::type;
            converged = true;
            // B(m, N) = (m-1)! (N-1)! / (m+N-1)!
            const Real beta_mn =
                detail::gamma_product<Real>(s.m, s.N) / specfun::gamma_exact<Real>(static_cast<double>(s.m + s.N));
            Accum<Real> acc;
            auto first = specfun::incomplete_beta_neg_series<Real>(Real(-x), s.m, 1.0 - s.m - s.N);
            converged = converged && first.converged;
            acc.add(first.sum, Real(2) * ipow(Real(-1), s.m) / beta_mn);
            const Real half_neg(-0.5);
            const Real outer = ipow(half_neg, s.m - 1) / beta_mn;
            for (int j = 0; j < s.m; ++j) {
                auto term = specfun::incomplete_beta_neg_series<Real>(Real(-2.0 * x), s.m + j, 1.0 - s.m - s.N - j);
                converged = converged && term.converged;
                const Real coef = outer * specfun::binomial<Real>(s.m + s.N + j - 1, j) * ipow(half_neg, j);
                acc.add(term.sum, coef);
            }
            return acc;
        });
    } catch (const ConvergenceError&) {
        converged = false;
    }
    if (converged) return {std::clamp(value, 0.0, 1.0), false};
    QuadratureSpec tight = spec;
    tight.abs_tol = std::min(spec.abs_tol, 1e-300);
    auto f = [&](double g) { return sir_envelope_ratio_pdf(g, cfg); };
    const double q = specfun::integrate_scaled(f, 0.0, std::sqrt(z), std::sqrt(s.mu), tight, 30).value;
    return {std::clamp(q, 0.0, 1.0), true};
}

inline double sir_cdf(double z, const SystemConfig& cfg) { return sir_cdf_detailed(z, cfg).value; }

/// Outage probability F_z(z) = P(SINR < z), routed by regime: quadrature of the
/// closed-form ratio density (general), the beta-function CDF
/// (interference-limited) or the squared Nakagami CDF (noise-limited).
inline double outage_probability(double z, const SystemConfig& cfg, const QuadratureSpec& spec = {}) {
    if (!(z >= 0.0)) throw DomainError("outage_probability: z must be nonnegative");
    const auto d = derive(cfg);
    if (z == 0.0) return 0.0;
    switch (d.regime) {
    case Regime::InterferenceLimited: return sir_cdf_detailed(z, cfg, spec).value;
    case Regime::NoiseLimited: {
        const double branch = nakagami_cdf(std::sqrt(cfg.sigma2 * z), cfg.m_S, cfg.omega_S);
        return branch * branch;
    }
    case Regime::General: break;
    }
    auto f = [&](double g) { return envelope_ratio_pdf(g, cfg); };
    const double q = specfun::integrate_scaled(f, 0.0, std::sqrt(z), std::sqrt(d.mu), spec, 30).value;
    return std::clamp(q, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Level crossing rate

/// A density on [support_lo, inf); `scale` is a typical magnitude of the variable.
struct Density {
    std::function<double(double)> pdf;
    double support_lo = 0.0;
    double scale = 1.0;
};

/// A degenerate distribution (noise-only interference-plus-noise envelope).
struct PointMass {
    double location = 0.0;
};

using InterferenceDensity = std::variant<Density, PointMass>;

inline Density selected_envelope_density(const SystemConfig& cfg) {
    validate(cfg);
    return {[cfg](double x) { return selected_envelope_pdf(x, cfg); }, 0.0, std::sqrt(cfg.omega_S)};
}

inline InterferenceDensity interference_density(const SystemConfig& cfg) {
    const auto d = derive(cfg);
    const double sigma = std::sqrt(cfg.sigma2);
    switch (d.regime) {
    case Regime::NoiseLimited: return PointMass{sigma};
    case Regime::InterferenceLimited:
        return Density{[cfg](double w) { return interference_envelope_pdf(w, cfg); }, 0.0,
                       std::sqrt(cfg.n * cfg.omega_I)};
    case Regime::General: break;
    }
    return Density{[cfg](double y) { return interference_plus_noise_pdf(y, cfg); }, sigma,
                   std::sqrt(cfg.n * cfg.omega_I + cfg.sigma2)};
}

/// N_g(g) = sqrt((var_dx0 + g^2 var_dwi) / (2 pi)) * int f_x0(g y) f_y(y) dy,
/// evaluated by adaptive quadrature (or exactly for a point-mass f_y).
inline double lcr_general(double g, const Density& fx0, const InterferenceDensity& fy, double var_dx0,
                          double var_dwi, const QuadratureSpec& spec = {}) {
    if (!(g >= 0.0)) throw DomainError("lcr_general: g must be nonnegative");
    if (!(var_dx0 >= 0.0) || !(var_dwi >= 0.0)) throw DomainError("lcr_general: variances must be nonnegative");
    const double front = std::sqrt((var_dx0 + g * g * var_dwi) / (2.0 * std::numbers::pi));
    if (const auto* point = std::get_if<PointMass>(&fy)) return front * fx0.pdf(g * point->location);
    const auto& dens = std::get<Density>(fy);
    if (g == 0.0) return front * fx0.pdf(0.0);

    // Breakpoints: octaves around both the interference scale and the y at which
    // f_x0(g y) peaks, so narrow integrands are not stepped over.
    const double s1 = dens.scale;
    const double s2 = fx0.scale / g;
    const double lo_scale = std::min(s1, s2) * std::ldexp(1.0, -30);
    const double hi_scale = std::max(s1, s2) * std::ldexp(1.0, 30);
    std::vector<double> pts{dens.support_lo};
    for (double s = lo_scale; s <= hi_scale; s *= 2.0) {
        const double p = dens.support_lo + s;
        if (p > pts.back()) pts.push_back(p);
    }
    auto integrand = [&](double y) { return fx0.pdf(g * y) * dens.pdf(y); };
    return front * specfun::integrate_breakpoints(integrand, pts, spec, true).value;
}

/// Noise-only LCR: sigma_x0' / sqrt(2 pi) * f_x0(sigma g).
inline double lcr_awgn_only(double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::NoiseLimited, "lcr_awgn_only");
    if (!(g >= 0.0)) throw DomainError("lcr_awgn_only: g must be nonnegative");
    const auto d = derive(cfg);
    const double sigma = std::sqrt(cfg.sigma2);
    return std::sqrt(d.var_dx0 / (2.0 * std::numbers::pi)) * selected_envelope_pdf(sigma * g, cfg);
}

/// Closed-form LCR of the SINR in the general regime (half-integer incomplete gammas).
inline double lcr_sinr(double z, const SystemConfig& cfg) {
    detail::require(cfg, Regime::General, "lcr_sinr");
    if (!(z >= 0.0)) throw DomainError("lcr_sinr: z must be nonnegative");
    if (z == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = z / s.mu;
    const double doppler = std::sqrt(cfg.f_m0 * cfg.f_m0 + cfg.f_mi * cfg.f_mi * x);
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        using std::exp;
        using std::sqrt;
        const Real xr(x);
        const Real cr(s.c);
        auto acc = detail::general_bracket_sum<Real>(xr, cr, s.m, s.N, true);
        const Real front = sqrt(Real(8) * numeric::pi_v<Real>()) * Real(doppler) * detail::half_power(xr, s.m) *
                           exp(cr) / detail::gamma_product<Real>(s.m, s.N);
        return acc.scale(front);
    });
}

/// One term Psi_i(g), i = 0..N-1, of the LCR expansion:
///   int_sigma^inf (m_I/Omega_I)^N 2 y^{2i+1} / Gamma(N) e^{-m_I y^2/Omega_I} f_x0(g y) dy
/// in closed form. sqrt((var_dx0 + g^2 var_dwi)/(2 pi)) sum_i C(N-1,i) (-sigma^2)^{N-1-i} e^c Psi_i
/// reproduces the general LCR.
inline double lcr_psi_term(int i, double g, const SystemConfig& cfg) {
    detail::require(cfg, Regime::General, "lcr_psi_term");
    const auto s = detail::shape_of(cfg);
    if (i < 0 || i >= s.N) throw DomainError("lcr_psi_term: i must lie in [0, m_I n)");
    if (!(g >= 0.0)) throw DomainError("lcr_psi_term: g must be nonnegative");
    if (g == 0.0) return 0.0;
    const double x = g * g / s.mu;
    const double b = cfg.m_I / cfg.omega_I;
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        using std::sqrt;
        const Real xr(x);
        const Real cr(s.c);
        const Real X1 = Real(1) + xr;
        const Real X2 = Real(1) + Real(2) * xr;
        const Real r = xr / X2;
        const double order = s.m + i + 0.5;
        const Real g1 = specfun::upper_incomplete_gamma<Real>(order, cr * X1);
        const auto g2 = specfun::upper_incomplete_gamma_ladder<Real>(order, s.m, cr * X2);
        Accum<Real> acc;
        acc.add(g1 / (ipow(X1, s.m + i) * sqrt(X1)));
        const Real inv2 = Real(1) / (ipow(X2, s.m + i) * sqrt(X2));
        Real rj(1);
        for (int j = 0; j < s.m; ++j) {
            if (j > 0) rj *= r / Real(j);
            acc.add(Real(-1) * inv2 * rj * g2[j]);
        }
        const Real front = sqrt(Real(cfg.m_S) / Real(cfg.omega_S)) * Real(4) * detail::half_power(xr, s.m) /
                           detail::gamma_product<Real>(s.m, s.N) * ipow(Real(b), s.N - i - 1);
        return acc.scale(front);
    });
}

/// Closed-form LCR of the SIR (interference-limited).
inline double lcr_sir(double z, const SystemConfig& cfg) {
    detail::require(cfg, Regime::InterferenceLimited, "lcr_sir");
    if (!(z >= 0.0)) throw DomainError("lcr_sir: z must be nonnegative");
    if (z == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = z / s.mu;
    const double p = s.m + s.N - 0.5;
    const double gamma_ratio = specfun::gamma_exact<double>(p) / detail::gamma_product<double>(s.m, s.N);
    const double doppler = std::sqrt(cfg.f_m0 * cfg.f_m0 + cfg.f_mi * cfg.f_mi * x);
    const double powers = std::pow(x / (1.0 + x), s.m - 0.5) * std::pow(1.0 + x, -static_cast<double>(s.N));
    const double ib = specfun::regularized_beta(1.0 / (2.0 + 1.0 / x), s.m, p);
    return std::sqrt(8.0 * std::numbers::pi) * doppler * gamma_ratio * powers * ib;
}

/// The SIR LCR specialised to equal Doppler spreads (uses f_m0 for both).
inline double lcr_sir_equal_doppler(double z, const SystemConfig& cfg) {
    detail::require(cfg, Regime::InterferenceLimited, "lcr_sir_equal_doppler");
    if (!(z >= 0.0)) throw DomainError("lcr_sir_equal_doppler: z must be nonnegative");
    if (z == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const double x = z / s.mu;
    const double p = s.m + s.N - 0.5;
    const double gamma_ratio = specfun::gamma_exact<double>(p) / detail::gamma_product<double>(s.m, s.N);
    const double powers = std::pow(x / (1.0 + x), s.m - 0.5) * std::pow(1.0 + x, -(s.N - 0.5));
    const double ib = specfun::regularized_beta(1.0 / (2.0 + 1.0 / x), s.m, p);
    return std::sqrt(8.0 * std::numbers::pi) * cfg.f_m0 * gamma_ratio * powers * ib;
}

/// The SIR LCR as the sigma -> 0 limit of the Psi-term expansion.
inline double lcr_sir_series(double z, const SystemConfig& cfg) {
    detail::require(cfg, Regime::InterferenceLimited, "lcr_sir_series");
    if (!(z >= 0.0)) throw DomainError("lcr_sir_series: z must be nonnegative");
    if (z == 0.0) return 0.0;
    const auto s = detail::shape_of(cfg);
    const auto d = derive(cfg);
    const double x = z / s.mu;
    const double rate = std::sqrt(8.0 * (d.var_dx0 + z * d.var_dwi) * cfg.m_S / (std::numbers::pi * cfg.omega_S));
    return numeric::evaluate_stably([&](auto tag) {
        using Real = typename decltype(tag)::type;
        const Real xr(x);
        auto acc = detail::limit_bracket_sum<Real>(xr, s.m, s.m + s.N - 0.5);
        const Real front = Real(rate) * detail::half_power(xr, s.m) / detail::gamma_product<Real>(s.m, s.N);
        return acc.scale(front);
    });
}

/// LCR of the output SINR at threshold z in whichever regime the config is in.
inline double lcr(double z, const SystemConfig& cfg) {
    switch (derive(cfg).regime) {
    case Regime::General: return lcr_sinr(z, cfg);
    case Regime::InterferenceLimited: return lcr_sir(z, cfg);
    case Regime::NoiseLimited:
        if (!(z >= 0.0)) throw DomainError("lcr: z must be nonnegative");
        return lcr_awgn_only(std::sqrt(z), cfg);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Average fade duration

enum class AfdStatus {
    Regular,
    ZeroThreshold,   ///< z = 0: the 0/0 limit, which is 0
    LcrUnderflow,    ///< N underflowed while F > 0: +inf
    BothUnderflow,   ///< F and N both underflowed deep in the lower tail: 0
};

struct FadeDuration {
    double value = 0.0;
    AfdStatus status = AfdStatus::Regular;
};

inline FadeDuration fade_duration_from(double cdf, double rate) {
    if (rate > 0.0) return {cdf / rate, AfdStatus::Regular};
    if (cdf > 0.0) return {std::numeric_limits<double>::infinity(), AfdStatus::LcrUnderflow};
    return {0.0, AfdStatus::BothUnderflow};
}

/// T_z(z) = F_z(z) / N_z(z).
inline FadeDuration afd(double z, const SystemConfig& cfg, const QuadratureSpec& spec = {}) {
    if (!(z >= 0.0)) throw DomainError("afd: z must be nonnegative");
    validate(cfg);
    if (z == 0.0) return {0.0, AfdStatus::ZeroThreshold};
    return fade_duration_from(outage_probability(z, cfg, spec), lcr(z, cfg));
}

/// All three statistics at one SINR threshold.
struct PointStats {
    double z = 0.0;
    double op = 0.0;
    double lcr = 0.0;
    FadeDuration afd;
};

inline PointStats evaluate_point(double z, const SystemConfig& cfg, const QuadratureSpec& spec = {}) {
    if (!(z >= 0.0)) throw DomainError("evaluate_point: z must be nonnegative");
    PointStats p;
    p.z = z;
    if (z == 0.0) {
        validate(cfg);
        p.afd = {0.0, AfdStatus::ZeroThreshold};
        return p;
    }
    p.op = outage_probability(z, cfg, spec);
    p.lcr = lcr(z, cfg);
    p.afd = fade_duration_from(p.op, p.lcr);
    return p;
}

} // namespace divstats::analytic
