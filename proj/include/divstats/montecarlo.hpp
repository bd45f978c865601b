#pragma once

// Sum-of-sinusoids simulation of the dual selection combiner and empirical
// OP / LCR / AFD measurement on the simulated ratio process g(t).

#include "divstats/errors.hpp"
#include "divstats/model.hpp"
#include "divstats/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace divstats::montecarlo {

struct SimulationConfig {
    std::optional<double> sample_rate;  ///< Hz; defaults to 64 max(f_m0, f_mi)
    double duration = 0.0;              ///< measured seconds in total, split over segments
    int num_sinusoids = 64;             ///< per Gaussian process
    std::uint64_t seed = 1;
    std::optional<double> warmup;       ///< seconds discarded per segment; defaults to 5 / f_m0
    int segments = 20;                  ///< independent sub-runs; standard errors come from their spread
    bool swap_branch_streams = false;   ///< exchange the seed streams of branches 1 and 2
};

inline constexpr double kMinRateFactor = 32.0;
inline constexpr double kDefaultRateFactor = 64.0;
inline constexpr int kMinSinusoids = 32;
inline constexpr double kMaxSamples = 1e8;

inline double effective_rate(const SimulationConfig& sim, const SystemConfig& cfg) {
    return sim.sample_rate.value_or(kDefaultRateFactor * std::max(cfg.f_m0, cfg.f_mi));
}

inline double effective_warmup(const SimulationConfig& sim, const SystemConfig& cfg) {
    return sim.warmup.value_or(5.0 / cfg.f_m0);
}

inline void validate(const SimulationConfig& sim, const SystemConfig& cfg) {
    divstats::validate(cfg);
    std::vector<std::string> v;
    const double rate = effective_rate(sim, cfg);
    if (!std::isfinite(rate) || !(rate >= kMinRateFactor * std::max(cfg.f_m0, cfg.f_mi))) {
        v.emplace_back("sample_rate must be at least 32 max(f_m0, f_mi)");
    }
    if (!std::isfinite(sim.duration) || !(sim.duration > 0.0)) v.emplace_back("duration must be positive");
    if (sim.num_sinusoids < kMinSinusoids) v.emplace_back("num_sinusoids must be at least 32");
    const double warm = effective_warmup(sim, cfg);
    if (!std::isfinite(warm) || !(warm >= 0.0)) v.emplace_back("warmup must be nonnegative");
    if (sim.segments < 1) v.emplace_back("segments must be positive");
    if (!v.empty()) throw ValidationError(std::move(v));
    if (sim.duration * rate > kMaxSamples) {
        throw ConfigurationError("duration * sample_rate exceeds the 1e8 sample bound");
    }
}

// ---------------------------------------------------------------------------
// Random streams

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Identifies one Gaussian process within a run.
struct StreamId {
    std::uint64_t segment = 0;
    std::uint64_t source = 0;     ///< 0 for the desired signal, 1 + i for interferer i
    std::uint64_t branch = 0;     ///< 0 or 1
    std::uint64_t component = 0;  ///< 0 .. 2m-1
};

class Stream {
public:
    Stream(std::uint64_t seed, const StreamId& id) {
        std::uint64_t h = splitmix64(seed);
        for (std::uint64_t part : {id.segment, id.source, id.branch, id.component}) h = splitmix64(h ^ part);
        rng_.seed(h);
    }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Process synthesis

/// Unit-variance Gaussian process with Clarke spectrum:
///   G(t) = sqrt(2/L) sum_l cos(2 pi f_m cos(theta_l) t + phi_l),  t = t0 + k / rate.
inline std::vector<double> gen_gaussian_process(double f_m, std::size_t length, double rate, int num_sinusoids,
                                                Stream& stream, double t0 = 0.0) {
    if (!(f_m > 0.0) || !(rate > 0.0) || num_sinusoids < 1) {
        throw DomainError("gen_gaussian_process: f_m, rate and num_sinusoids must be positive");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto L = static_cast<std::size_t>(num_sinusoids);
    std::vector<double> omega(L);
    std::vector<double> phase(L);
    for (std::size_t l = 0; l < L; ++l) {
        omega[l] = two_pi * f_m * std::cos(two_pi * stream.uniform());
        phase[l] = two_pi * stream.uniform();
    }
    const double amp = std::sqrt(2.0 / num_sinusoids);
    std::vector<double> out(length, 0.0);
    // Phasors advanced by one-sample rotations; re-anchored exactly every block
    // so rounding drift stays negligible.
    constexpr std::size_t kBlock = 1024;
    std::vector<std::complex<double>> z(L);
    std::vector<std::complex<double>> step(L);
    for (std::size_t l = 0; l < L; ++l) step[l] = std::polar(1.0, omega[l] / rate);
    for (std::size_t start = 0; start < length; start += kBlock) {
        const double t = t0 + static_cast<double>(start) / rate;
        for (std::size_t l = 0; l < L; ++l) z[l] = std::polar(1.0, omega[l] * t + phase[l]);
        const std::size_t stop = std::min(length, start + kBlock);
        for (std::size_t k = start; k < stop; ++k) {
            double acc = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                acc += z[l].real();
                z[l] *= step[l];
            }
            out[k] = amp * acc;
        }
    }
    return out;
}

/// Envelope sqrt(sum_{p<2m} G_p^2 omega / (2m)) with Nakagami(m, omega) marginal.
/// Component p uses the stream `base` with component index p.
inline std::vector<double> gen_nakagami_envelope(int m, double omega, double f_m, std::size_t length, double rate,
                                                 int num_sinusoids, std::uint64_t seed, StreamId base,
                                                 double t0 = 0.0) {
    if (m < 1) throw DomainError("gen_nakagami_envelope: m must be a positive integer");
    if (!(omega > 0.0)) throw DomainError("gen_nakagami_envelope: omega must be positive");
    std::vector<double> power(length, 0.0);
    for (int p = 0; p < 2 * m; ++p) {
        base.component = static_cast<std::uint64_t>(p);
        Stream stream(seed, base);
        const auto g = gen_gaussian_process(f_m, length, rate, num_sinusoids, stream, t0);
        for (std::size_t k = 0; k < length; ++k) power[k] += g[k] * g[k];
    }
    const double scale = omega / (2.0 * m);
    for (auto& v : power) v = std::sqrt(v * scale);
    return power;
}

// ---------------------------------------------------------------------------
// Traces

struct FadingTrace {
    double time_step = 0.0;
    double start_time = 0.0;
    std::array<std::vector<double>, 2> desired;                   ///< x_01(t), x_02(t)
    std::vector<std::array<std::vector<double>, 2>> interferers;  ///< w_ik(t), one entry per interferer
    std::array<std::vector<double>, 2> branch_ratio;              ///< x_0k(t) / y_k(t) for both branches
    std::vector<double> selected_ratio;                           ///< g(t) = x_0(t) / y(t)
    std::vector<std::uint8_t> selected_branch;                    ///< 0 for branch 1, 1 for branch 2

    std::size_t size() const { return selected_ratio.size(); }
};

namespace detail {

inline FadingTrace simulate_segment(const SystemConfig& cfg, const SimulationConfig& sim, std::uint64_t segment,
                                    std::size_t length) {
    const double rate = effective_rate(sim, cfg);
    const double t0 = effective_warmup(sim, cfg);
    FadingTrace tr;
    tr.time_step = 1.0 / rate;
    tr.start_time = t0;
    auto stream_branch = [&](int k) { return static_cast<std::uint64_t>(sim.swap_branch_streams ? 1 - k : k); };
    for (int k = 0; k < 2; ++k) {
        tr.desired[k] = gen_nakagami_envelope(cfg.m_S, cfg.omega_S, cfg.f_m0, length, rate, sim.num_sinusoids,
                                              sim.seed, {segment, 0, stream_branch(k), 0}, t0);
    }
    if (cfg.omega_I > 0.0) {
        tr.interferers.resize(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i) {
            for (int k = 0; k < 2; ++k) {
                tr.interferers[i][k] =
                    gen_nakagami_envelope(cfg.m_I, cfg.omega_I, cfg.f_mi, length, rate, sim.num_sinusoids, sim.seed,
                                          {segment, static_cast<std::uint64_t>(1 + i), stream_branch(k), 0}, t0);
            }
        }
    }
    for (int k = 0; k < 2; ++k) {
        tr.branch_ratio[k].resize(length);
        for (std::size_t t = 0; t < length; ++t) {
            double y2 = cfg.sigma2;
            for (const auto& w : tr.interferers) y2 += w[k][t] * w[k][t];
            tr.branch_ratio[k][t] = tr.desired[k][t] / std::sqrt(y2);
        }
    }
    tr.selected_ratio.resize(length);
    tr.selected_branch.resize(length);
    for (std::size_t t = 0; t < length; ++t) {
        const std::uint8_t k = tr.desired[1][t] > tr.desired[0][t] ? 1 : 0;
        tr.selected_branch[t] = k;
        tr.selected_ratio[t] = tr.branch_ratio[k][t];
    }
    return tr;
}

} // namespace detail

/// One continuous trace of sim.duration seconds (after discarding the warmup).
inline FadingTrace simulate(const SystemConfig& cfg, const SimulationConfig& sim) {
    validate(sim, cfg);
    const auto length = static_cast<std::size_t>(std::llround(sim.duration * effective_rate(sim, cfg)));
    return detail::simulate_segment(cfg, sim, 0, length);
}

// ---------------------------------------------------------------------------
// Measurement
//
// Selection switches make g(t) jump, because y(t) changes to the other
// branch's interference. Two crossing counts are kept: `upcrossings` counts
// every sample pair with g_i < th <= g_{i+1}; `smooth_upcrossings` counts only
// crossings made by continuous motion of the selected branch ratio (the
// quantity Rice's formula describes), following each branch's ratio up to the
// interpolated switching instant.

/// Raw counts for one threshold over one stretch of trace.
struct CrossingTally {
    double threshold = 0.0;
    std::uint64_t upcrossings = 0;
    std::uint64_t smooth_upcrossings = 0;
    double total_time = 0.0;
    double below_time = 0.0;
};

struct EmpiricalStats {
    double threshold = 0.0;  ///< g domain
    std::uint64_t upcrossings = 0;
    std::uint64_t smooth_upcrossings = 0;
    double total_time = 0.0;
    double below_time = 0.0;
    double lcr_hat = 0.0;
    double op_hat = 0.0;
    double afd_hat = 0.0;
    double lcr_smooth_hat = 0.0;
    double afd_smooth_hat = 0.0;
    double stderr_lcr = std::numeric_limits<double>::quiet_NaN();
    double stderr_op = std::numeric_limits<double>::quiet_NaN();
    double stderr_afd = std::numeric_limits<double>::quiet_NaN();
    double stderr_lcr_smooth = std::numeric_limits<double>::quiet_NaN();
    double stderr_afd_smooth = std::numeric_limits<double>::quiet_NaN();
    int batches = 0;
};

inline double z_to_g(double z) { return std::sqrt(z); }
inline double g_to_z(double g) { return g * g; }

namespace detail {

/// Time below th (as a fraction of the step) of the segment from a to b.
inline double fraction_below(double a, double b, double th) {
    if (a < th) return b < th ? 1.0 : (th - a) / (b - a);
    return b < th ? (th - b) / (a - b) : 0.0;
}

inline bool upcross(double a, double b, double th) { return a < th && th <= b; }

} // namespace detail

/// Tallies the intervals between samples first..last of a trace at one
/// threshold. Time below th is linearly interpolated between samples.
inline CrossingTally tally(const FadingTrace& tr, std::size_t first, std::size_t last, double threshold) {
    const auto& g = tr.selected_ratio;
    const bool branches = tr.branch_ratio[0].size() == g.size() && tr.branch_ratio[1].size() == g.size() &&
                          tr.selected_branch.size() == g.size() && tr.desired[0].size() == g.size() &&
                          tr.desired[1].size() == g.size();
    const double dt = tr.time_step;
    CrossingTally t;
    t.threshold = threshold;
    for (std::size_t i = first; i < last; ++i) {
        const double a = g[i];
        const double b = g[i + 1];
        t.total_time += dt;
        t.below_time += dt * detail::fraction_below(a, b, threshold);
        if (detail::upcross(a, b, threshold)) ++t.upcrossings;
        if (!branches || tr.selected_branch[i] == tr.selected_branch[i + 1]) {
            if (detail::upcross(a, b, threshold)) ++t.smooth_upcrossings;
            continue;
        }
        // Switch inside the interval: locate it where x01 - x02 changes sign.
        const int ka = tr.selected_branch[i];
        const int kb = tr.selected_branch[i + 1];
        const double d0 = tr.desired[0][i] - tr.desired[1][i];
        const double d1 = tr.desired[0][i + 1] - tr.desired[1][i + 1];
        const double s = d0 == d1 ? 0.5 : std::clamp(d0 / (d0 - d1), 0.0, 1.0);
        const auto& ra = tr.branch_ratio[ka];
        const auto& rb = tr.branch_ratio[kb];
        const double a_end = ra[i] + s * (ra[i + 1] - ra[i]);
        const double b_start = rb[i] + s * (rb[i + 1] - rb[i]);
        if (detail::upcross(ra[i], a_end, threshold)) ++t.smooth_upcrossings;
        if (detail::upcross(b_start, rb[i + 1], threshold)) ++t.smooth_upcrossings;
    }
    return t;
}

/// Combines per-batch tallies (all at the same threshold). Point estimates are
/// ratios of summed counts and times; standard errors use the linearized
/// ratio estimator across batches.
inline EmpiricalStats summarize(const std::vector<CrossingTally>& batches) {
    if (batches.empty()) throw DomainError("summarize: no batches");
    EmpiricalStats s;
    s.threshold = batches.front().threshold;
    s.batches = static_cast<int>(batches.size());
    for (const auto& b : batches) {
        s.upcrossings += b.upcrossings;
        s.smooth_upcrossings += b.smooth_upcrossings;
        s.total_time += b.total_time;
        s.below_time += b.below_time;
    }
    if (!(s.total_time > 0.0)) throw DomainError("summarize: zero-length trace");
    auto fade = [&](std::uint64_t ups) {
        if (ups > 0) return s.below_time / static_cast<double>(ups);
        return s.below_time > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    s.op_hat = s.below_time / s.total_time;
    s.lcr_hat = static_cast<double>(s.upcrossings) / s.total_time;
    s.lcr_smooth_hat = static_cast<double>(s.smooth_upcrossings) / s.total_time;
    s.afd_hat = fade(s.upcrossings);
    s.afd_smooth_hat = fade(s.smooth_upcrossings);
    const std::size_t n = batches.size();
    if (n < 2) return s;
    // se(sum A / sum D) = sqrt(n/(n-1) sum (A_b - R D_b)^2) / sum D
    auto ratio_se = [&](auto num, auto den, double ratio) {
        double ss = 0.0;
        double dsum = 0.0;
        for (const auto& b : batches) {
            const double r = num(b) - ratio * den(b);
            ss += r * r;
            dsum += den(b);
        }
        return std::sqrt(ss * static_cast<double>(n) / static_cast<double>(n - 1)) / dsum;
    };
    auto below = [](const CrossingTally& b) { return b.below_time; };
    auto time = [](const CrossingTally& b) { return b.total_time; };
    auto ups = [](const CrossingTally& b) { return static_cast<double>(b.upcrossings); };
    auto smooth = [](const CrossingTally& b) { return static_cast<double>(b.smooth_upcrossings); };
    s.stderr_op = ratio_se(below, time, s.op_hat);
    s.stderr_lcr = ratio_se(ups, time, s.lcr_hat);
    s.stderr_lcr_smooth = ratio_se(smooth, time, s.lcr_smooth_hat);
    if (s.upcrossings > 0) s.stderr_afd = ratio_se(below, ups, s.afd_hat);
    if (s.smooth_upcrossings > 0) s.stderr_afd_smooth = ratio_se(below, smooth, s.afd_smooth_hat);
    return s;
}

/// Empirical statistics of trace.selected_ratio at g-domain thresholds. The
/// trace is cut into `batches` contiguous pieces for the standard errors.
inline std::vector<EmpiricalStats> measure(const FadingTrace& trace, const std::vector<double>& thresholds,
                                           int batches = 10) {
    if (trace.size() < 2) throw DomainError("measure: trace needs at least two samples");
    if (batches < 1) throw DomainError("measure: batches must be positive");
    const std::size_t intervals = trace.size() - 1;
    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(batches), intervals);
    std::vector<EmpiricalStats> out;
    out.reserve(thresholds.size());
    for (double th : thresholds) {
        std::vector<CrossingTally> parts;
        for (std::size_t b = 0; b < nb; ++b) {
            parts.push_back(tally(trace, b * intervals / nb, (b + 1) * intervals / nb, th));
        }
        out.push_back(summarize(parts));
    }
    return out;
}

/// Simulates sim.segments independent segments (seed sub-streams 0..S-1),
/// sharing sim.duration equally, and measures all thresholds (g domain) on
/// each. Segments run on up to `jobs` threads; aggregation is by index.
inline std::vector<EmpiricalStats> simulate_and_measure(const SystemConfig& cfg, const SimulationConfig& sim,
                                                        const std::vector<double>& thresholds, int jobs = 1) {
    validate(sim, cfg);
    const double rate = effective_rate(sim, cfg);
    const auto per_segment =
        static_cast<std::size_t>(std::llround(sim.duration * rate / static_cast<double>(sim.segments)));
    const std::size_t S = static_cast<std::size_t>(sim.segments);
    std::vector<EmpiricalStats> out;
    out.reserve(thresholds.size());
    if (per_segment < 2) {
        // Too short to contain an interval: empty statistics.
        for (double th : thresholds) {
            EmpiricalStats e;
            e.threshold = th;
            e.batches = static_cast<int>(S);
            out.push_back(e);
        }
        return out;
    }
    std::vector<std::vector<CrossingTally>> tallies(S);
    parallel::for_each_index(S, jobs, [&](std::size_t s) {
        const auto tr = detail::simulate_segment(cfg, sim, s, per_segment);
        tallies[s].reserve(thresholds.size());
        for (double th : thresholds) tallies[s].push_back(tally(tr, 0, tr.size() - 1, th));
    });
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        std::vector<CrossingTally> col;
        col.reserve(S);
        for (std::size_t s = 0; s < S; ++s) col.push_back(tallies[s][j]);
        out.push_back(summarize(col));
    }
    return out;
}

} // namespace divstats::montecarlo
