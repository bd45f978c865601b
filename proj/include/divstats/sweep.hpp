#pragma once

// Threshold and interferer-count sweeps over the closed-form statistics.

#include "divstats/analytic.hpp"
#include "divstats/errors.hpp"
#include "divstats/model.hpp"
#include "divstats/parallel.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace divstats::analytic {

enum class Statistic { OutageProb, LCR, AFD, PDF };
enum class Normalization { Raw, DopplerNormalized };
enum class ThresholdDomain { Z, G };

inline const char* to_string(Statistic s) {
    switch (s) {
    case Statistic::OutageProb: return "op";
    case Statistic::LCR: return "lcr";
    case Statistic::AFD: return "afd";
    case Statistic::PDF: return "pdf";
    }
    return "unknown";
}

struct PointDiagnostic {
    std::size_t index = 0;
    double threshold = 0.0;
    std::string message;
};

/// A sampled statistic. Failed points hold NaN and are listed in `gaps`.
struct StatCurve {
    std::vector<double> thresholds;
    std::vector<double> values;
    Statistic statistic = Statistic::OutageProb;
    Normalization normalization = Normalization::Raw;
    ThresholdDomain domain = ThresholdDomain::Z;
    std::vector<PointDiagnostic> gaps;
};

/// lo:hi:points, linear or logarithmic, endpoints included.
struct Grid {
    double lo = 1e-3;
    double hi = 1e3;
    int points = 121;
    bool log = true;

    void validate() const {
        std::vector<std::string> v;
        if (points < 1) v.emplace_back("grid needs at least one point");
        if (!std::isfinite(lo) || !std::isfinite(hi)) v.emplace_back("grid bounds must be finite");
        if (points > 1 && !(hi > lo)) v.emplace_back("grid upper bound must exceed the lower bound");
        if (points == 1 && hi != lo) v.emplace_back("a one-point grid needs lo = hi");
        if (lo < 0.0) v.emplace_back("grid bounds must be nonnegative");
        if (log && !(lo > 0.0)) v.emplace_back("logarithmic grid needs a positive lower bound");
        if (!v.empty()) throw ValidationError(std::move(v));
    }

    std::vector<double> values() const {
        validate();
        std::vector<double> out(static_cast<std::size_t>(points));
        if (points == 1) {
            out[0] = lo;
            return out;
        }
        for (int i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / (points - 1);
            out[i] = log ? std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))) : lo + t * (hi - lo);
        }
        out.front() = lo;
        out.back() = hi;
        return out;
    }
};

/// Logarithmic z/mu grid over [1e-3, 1e3] with 121 points.
inline Grid default_grid() { return {}; }

inline double normalize_value(double v, Statistic s, Normalization norm, const SystemConfig& cfg) {
    if (norm == Normalization::Raw) return v;
    switch (s) {
    case Statistic::LCR: return v / cfg.f_m0;
    case Statistic::AFD: return v * cfg.f_m0;
    default: return v;
    }
}

inline double evaluate_statistic(double z, Statistic s, const SystemConfig& cfg, const QuadratureSpec& spec) {
    switch (s) {
    case Statistic::OutageProb: return outage_probability(z, cfg, spec);
    case Statistic::LCR: return lcr(z, cfg);
    case Statistic::AFD: return afd(z, cfg, spec).value;
    case Statistic::PDF: return sinr_pdf(z, cfg);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Evaluates one statistic at each SINR threshold (z domain). Points run
/// concurrently on up to `jobs` threads; each result lands at its own index.
inline StatCurve sweep(const SystemConfig& cfg, const std::vector<double>& thresholds, Statistic statistic,
                       Normalization normalization = Normalization::Raw, int jobs = 1,
                       const QuadratureSpec& spec = {}) {
    validate(cfg);
    spec.validate();
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0)) throw ValidationError({"thresholds must be nonnegative"});
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
            throw ValidationError({"thresholds must be strictly increasing"});
        }
    }
    StatCurve curve;
    curve.thresholds = thresholds;
    curve.statistic = statistic;
    curve.normalization = normalization;
    curve.values.assign(thresholds.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::optional<std::string>> errors(thresholds.size());
    parallel::for_each_index(thresholds.size(), jobs, [&](std::size_t i) {
        try {
            const double v = evaluate_statistic(thresholds[i], statistic, cfg, spec);
            curve.values[i] = normalize_value(v, statistic, normalization, cfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i]) curve.gaps.push_back({i, thresholds[i], *errors[i]});
    }
    return curve;
}

/// First index attaining the maximum finite value, if any.
inline std::optional<std::size_t> argmax_first(const std::vector<double>& values) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) continue;
        if (!best || values[i] > values[*best]) best = i;
    }
    return best;
}

/// th0: the threshold at which an LCR curve peaks (first grid index on ties).
inline std::optional<double> lcr_peak_threshold(const StatCurve& curve) {
    if (curve.statistic != Statistic::LCR) throw DomainError("lcr_peak_threshold: curve is not an LCR curve");
    const auto i = argmax_first(curve.values);
    if (!i) return std::nullopt;
    return curve.thresholds[*i];
}

/// OP, LCR and AFD at one grid point, or the error that prevented evaluation.
struct SweepRow {
    double axis = 0.0;  ///< z/mu, or n for interferer sweeps
    double z = 0.0;
    PointStats stats;
    std::optional<std::string> error;
};

/// All three statistics on a z/mu grid.
inline std::vector<SweepRow> sweep_thresholds(const SystemConfig& cfg, const std::vector<double>& z_over_mu,
                                              int jobs = 1, const QuadratureSpec& spec = {}) {
    const double scale = threshold_scale(cfg);
    std::vector<SweepRow> rows(z_over_mu.size());
    parallel::for_each_index(rows.size(), jobs, [&](std::size_t i) {
        rows[i].axis = z_over_mu[i];
        rows[i].z = z_over_mu[i] * scale;
        try {
            rows[i].stats = evaluate_point(rows[i].z, cfg, spec);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

/// All three statistics at a fixed z/mu for each interferer count in `ns`.
inline std::vector<SweepRow> sweep_interferers(const SystemConfig& cfg, const std::vector<int>& ns, double z_over_mu,
                                               int jobs = 1, const QuadratureSpec& spec = {}) {
    std::vector<SweepRow> rows(ns.size());
    parallel::for_each_index(rows.size(), jobs, [&](std::size_t i) {
        rows[i].axis = ns[i];
        try {
            SystemConfig c = cfg;
            c.n = ns[i];
            rows[i].z = z_over_mu * threshold_scale(c);
            rows[i].stats = evaluate_point(rows[i].z, c, spec);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

} // namespace divstats::analytic
