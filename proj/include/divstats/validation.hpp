#pragma once

// Analytic vs Monte Carlo comparison.

#include "divstats/analytic.hpp"
#include "divstats/montecarlo.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace divstats::montecarlo {

inline constexpr double kRelTolerance = 0.05;
inline constexpr double kSigmaTolerance = 3.0;
inline constexpr double kMinCountedOp = 0.01;
inline constexpr double kMaxCountedOp = 0.99;
inline constexpr std::uint64_t kMinUpcrossings = 10;

struct Check {
    double analytic = 0.0;
    double empirical = 0.0;
    double stderr_ = 0.0;
    bool pass = false;
};

/// |empirical - analytic| <= max(3 se, 5% of analytic).
inline Check compare(double analytic, double empirical, double se) {
    Check c{analytic, empirical, se, false};
    const double tol = std::max(kSigmaTolerance * (std::isfinite(se) ? se : 0.0), kRelTolerance * std::fabs(analytic));
    c.pass = std::isfinite(empirical) && std::isfinite(analytic) && std::fabs(empirical - analytic) <= tol;
    return c;
}

struct ValidationRow {
    double z = 0.0;
    double z_over_mu = 0.0;
    EmpiricalStats empirical;
    Check op;
    Check lcr;
    Check afd;
    bool counted = false;  ///< op_hat within [0.01, 0.99]

    bool pass() const { return op.pass && lcr.pass && afd.pass; }
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    int counted = 0;
    int failed = 0;
    bool insufficient = false;
    std::string note;

    bool all_pass() const { return !insufficient && failed == 0; }
};

/// Simulates `cfg` and compares empirical OP, LCR and AFD with the closed
/// forms at each normalized threshold z/scale (scale = threshold_scale(cfg)).
inline ValidationReport validate_against_analytic(const SystemConfig& cfg, const SimulationConfig& sim,
                                                  const std::vector<double>& z_over_scale, int jobs = 1) {
    const double scale = threshold_scale(cfg);
    std::vector<double> g(z_over_scale.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = z_to_g(z_over_scale[i] * scale);
    const auto emp = simulate_and_measure(cfg, sim, g, jobs);
    std::vector<analytic::PointStats> ana(g.size());
    parallel::for_each_index(g.size(), jobs,
                             [&](std::size_t i) { ana[i] = analytic::evaluate_point(g_to_z(g[i]), cfg); });

    ValidationReport rep;
    for (std::size_t i = 0; i < g.size(); ++i) {
        ValidationRow row;
        row.z = g_to_z(g[i]);
        row.z_over_mu = z_over_scale[i];
        row.empirical = emp[i];
        row.op = compare(ana[i].op, emp[i].op_hat, emp[i].stderr_op);
        row.lcr = compare(ana[i].lcr, emp[i].lcr_smooth_hat, emp[i].stderr_lcr_smooth);
        row.afd = compare(ana[i].afd.value, emp[i].afd_smooth_hat, emp[i].stderr_afd_smooth);
        row.counted = emp[i].total_time > 0.0 && emp[i].op_hat >= kMinCountedOp && emp[i].op_hat <= kMaxCountedOp;
        if (row.counted) {
            ++rep.counted;
            if (!row.pass()) ++rep.failed;
            if (emp[i].smooth_upcrossings < kMinUpcrossings && !rep.insufficient) {
                rep.insufficient = true;
                rep.note = "fewer than " + std::to_string(kMinUpcrossings) + " upcrossings at a counted threshold";
            }
        }
        rep.rows.push_back(row);
    }
    if (rep.counted == 0) {
        rep.insufficient = true;
        rep.note = "no threshold has an empirical OP within [0.01, 0.99]";
    }
    return rep;
}

} // namespace divstats::montecarlo
