#pragma once

// Physical link parameters of the dual-branch selection combiner and the
// quantities derived from them.

#include "divstats/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace divstats {

struct SystemConfig {
    int m_S = 1;          ///< desired-signal Nakagami severity
    int m_I = 1;          ///< interferer Nakagami severity
    double omega_S = 1.0; ///< average desired fading power per branch
    double omega_I = 1.0; ///< average power per interferer per branch
    double sigma2 = 1.0;  ///< AWGN power
    int n = 1;            ///< number of cochannel interferers
    double f_m0 = 1.0;    ///< maximum Doppler of the desired signal [Hz]
    double f_mi = 1.0;    ///< maximum Doppler of the interferers [Hz]

    bool operator==(const SystemConfig&) const = default;
};

enum class Regime { General, InterferenceLimited, NoiseLimited };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::General: return "general";
    case Regime::InterferenceLimited: return "interference_limited";
    case Regime::NoiseLimited: return "noise_limited";
    }
    return "unknown";
}

struct DerivedParams {
    double mu = 0.0;      ///< Omega_S m_I / (Omega_I m_S); +inf without interference
    double c = 0.0;       ///< sigma^2 m_I / Omega_I; +inf without interference
    double var_dx0 = 0.0; ///< (pi f_m0)^2 Omega_S / m_S
    double var_dwi = 0.0; ///< (pi f_mi)^2 Omega_I / m_I
    Regime regime = Regime::General;
};

/// sigma2 below this fraction of omega_I is treated as interference-limited.
inline constexpr double kDegeneracyRatio = 1e-12;
/// Upper bound on m_I * n (length of the finite series).
inline constexpr int kMaxInterferenceOrder = 64;

inline std::vector<std::string> validation_errors(const SystemConfig& cfg) {
    std::vector<std::string> v;
    if (cfg.m_S < 1) v.emplace_back("m_S must be a positive integer");
    if (cfg.m_I < 1) v.emplace_back("m_I must be a positive integer");
    if (cfg.n < 1) v.emplace_back("n must be a positive integer");
    if (!std::isfinite(cfg.omega_S) || !(cfg.omega_S > 0.0)) v.emplace_back("omega_S must be positive");
    if (!std::isfinite(cfg.omega_I) || !(cfg.omega_I >= 0.0)) v.emplace_back("omega_I must be nonnegative");
    if (!std::isfinite(cfg.sigma2) || !(cfg.sigma2 >= 0.0)) v.emplace_back("sigma2 must be nonnegative");
    if (cfg.omega_I == 0.0 && cfg.sigma2 == 0.0) v.emplace_back("omega_I and sigma2 cannot both be zero");
    if (!std::isfinite(cfg.f_m0) || !(cfg.f_m0 > 0.0)) v.emplace_back("f_m0 must be positive");
    if (!std::isfinite(cfg.f_mi) || !(cfg.f_mi > 0.0)) v.emplace_back("f_mi must be positive");
    if (cfg.m_I >= 1 && cfg.n >= 1 && static_cast<long>(cfg.m_I) * cfg.n > kMaxInterferenceOrder) {
        v.emplace_back("m_I * n must not exceed " + std::to_string(kMaxInterferenceOrder));
    }
    return v;
}

inline void validate(const SystemConfig& cfg) {
    auto v = validation_errors(cfg);
    if (!v.empty()) throw ValidationError(std::move(v));
}

inline Regime classify_regime(const SystemConfig& cfg) {
    if (cfg.omega_I == 0.0) return Regime::NoiseLimited;
    if (cfg.sigma2 < kDegeneracyRatio * cfg.omega_I) return Regime::InterferenceLimited;
    return Regime::General;
}

inline DerivedParams derive(const SystemConfig& cfg) {
    validate(cfg);
    constexpr double pi = std::numbers::pi;
    DerivedParams d;
    d.regime = classify_regime(cfg);
    d.var_dx0 = (pi * cfg.f_m0) * (pi * cfg.f_m0) * cfg.omega_S / cfg.m_S;
    if (d.regime == Regime::NoiseLimited) {
        d.mu = std::numeric_limits<double>::infinity();
        d.c = std::numeric_limits<double>::infinity();
        d.var_dwi = 0.0;
        return d;
    }
    d.mu = (cfg.omega_S * cfg.m_I) / (cfg.omega_I * cfg.m_S);
    d.c = cfg.sigma2 * cfg.m_I / cfg.omega_I;
    d.var_dwi = (pi * cfg.f_mi) * (pi * cfg.f_mi) * cfg.omega_I / cfg.m_I;
    return d;
}

/// Rescales powers so that sigma2 = 1 (omega_S -> SNR, omega_I -> INR).
inline SystemConfig normalize_to_unit_noise(const SystemConfig& cfg) {
    validate(cfg);
    if (!(cfg.sigma2 > 0.0)) throw DomainError("normalize_to_unit_noise: sigma2 must be positive");
    if (cfg.sigma2 == 1.0) return cfg;
    SystemConfig out = cfg;
    out.omega_S = cfg.omega_S / cfg.sigma2;
    out.omega_I = cfg.omega_I / cfg.sigma2;
    out.sigma2 = 1.0;
    return out;
}

/// Scale that makes thresholds dimensionless: mu with interference,
/// the mean branch SNR omega_S / sigma2 without it.
inline double threshold_scale(const SystemConfig& cfg) {
    const auto d = derive(cfg);
    return d.regime == Regime::NoiseLimited ? cfg.omega_S / cfg.sigma2 : d.mu;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline void to_json(nlohmann::json& j, const SystemConfig& c) {
    j = nlohmann::json{{"m_S", c.m_S},         {"m_I", c.m_I},   {"omega_S", c.omega_S},
                       {"omega_I", c.omega_I}, {"sigma2", c.sigma2}, {"n", c.n},
                       {"f_m0", c.f_m0},       {"f_mi", c.f_mi}};
}

/// Missing keys keep the values already in `c`; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, SystemConfig& c) {
    if (!j.is_object()) throw ValidationError({"config JSON must be an object"});
    std::vector<std::string> bad;
    auto integer = [](const nlohmann::json& v) {
        if (!v.is_number_integer()) throw nlohmann::json::type_error::create(302, "integer expected", nullptr);
        return v.get<int>();
    };
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "m_S") c.m_S = integer(value);
            else if (key == "m_I") c.m_I = integer(value);
            else if (key == "omega_S") c.omega_S = value.get<double>();
            else if (key == "omega_I") c.omega_I = value.get<double>();
            else if (key == "sigma2") c.sigma2 = value.get<double>();
            else if (key == "n") c.n = integer(value);
            else if (key == "f_m0") c.f_m0 = value.get<double>();
            else if (key == "f_mi") c.f_mi = value.get<double>();
            else bad.push_back("unknown config field '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            bad.push_back("config field '" + key + "' has the wrong type");
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

} // namespace divstats
