#include "divstats/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using divstats::Regime;
using divstats::SystemConfig;

TEST(Derive, DirectSubstitution) {
    SystemConfig c;
    c.omega_S = 4.0;
    c.omega_I = 2.0;
    c.sigma2 = 1.0;
    const auto d = divstats::derive(c);
    EXPECT_DOUBLE_EQ(d.mu, 2.0);
    EXPECT_DOUBLE_EQ(d.c, 0.5);
    EXPECT_EQ(d.regime, Regime::General);
}

TEST(Derive, DerivativeVariances) {
    SystemConfig c;
    c.m_S = 2;
    c.m_I = 2;
    c.f_m0 = 100.0;
    c.f_mi = 30.0;
    const auto d = divstats::derive(c);
    const double pi = std::numbers::pi;
    EXPECT_NEAR(d.var_dx0, (100.0 * pi) * (100.0 * pi) / 2.0, 1e-9);
    EXPECT_NEAR(d.var_dx0, 49348.02, 0.01);
    EXPECT_NEAR(d.var_dwi, (30.0 * pi) * (30.0 * pi) / 2.0, 1e-9);
}

TEST(Derive, RegimeClassification) {
    SystemConfig c;
    c.omega_I = 0.0;
    auto d = divstats::derive(c);
    EXPECT_EQ(d.regime, Regime::NoiseLimited);
    EXPECT_EQ(d.var_dwi, 0.0);
    EXPECT_TRUE(std::isinf(d.mu));

    c.omega_I = 1.0;
    c.sigma2 = 0.0;
    EXPECT_EQ(divstats::derive(c).regime, Regime::InterferenceLimited);
    c.sigma2 = 0.99e-12;
    EXPECT_EQ(divstats::derive(c).regime, Regime::InterferenceLimited);
    c.sigma2 = 1e-12;
    EXPECT_EQ(divstats::derive(c).regime, Regime::General);
}

TEST(Validate, ListsEveryViolation) {
    SystemConfig c;
    c.m_S = 0;
    c.n = 0;
    c.omega_S = -1.0;
    c.f_m0 = 0.0;
    try {
        divstats::validate(c);
        FAIL() << "expected ValidationError";
    } catch (const divstats::ValidationError& e) {
        EXPECT_EQ(e.violations().size(), 4u);
    }
}

TEST(Validate, RejectsNoInterferenceAndNoNoise) {
    SystemConfig c;
    c.omega_I = 0.0;
    c.sigma2 = 0.0;
    EXPECT_THROW(divstats::validate(c), divstats::ValidationError);
}

TEST(Validate, CapsInterferenceOrder) {
    SystemConfig c;
    c.m_I = 8;
    c.n = 8;
    EXPECT_NO_THROW(divstats::validate(c));
    c.n = 9;
    EXPECT_THROW(divstats::validate(c), divstats::ValidationError);
}

TEST(NormalizeToUnitNoise, RescalesPowers) {
    SystemConfig c;
    c.omega_S = 20.0;
    c.omega_I = 4.0;
    c.sigma2 = 2.0;
    const auto u = divstats::normalize_to_unit_noise(c);
    EXPECT_DOUBLE_EQ(u.omega_S, 10.0);
    EXPECT_DOUBLE_EQ(u.omega_I, 2.0);
    EXPECT_DOUBLE_EQ(u.sigma2, 1.0);
    EXPECT_DOUBLE_EQ(divstats::derive(u).mu, divstats::derive(c).mu);
    EXPECT_DOUBLE_EQ(divstats::derive(u).c, divstats::derive(c).c);
}

TEST(NormalizeToUnitNoise, IdentityAtUnitNoise) {
    SystemConfig c;
    c.omega_S = 3.0;
    EXPECT_EQ(divstats::normalize_to_unit_noise(c), c);
}

TEST(NormalizeToUnitNoise, PreservesMu) {
    SystemConfig c;
    c.omega_S = 5.0;
    c.omega_I = 5.0;
    c.sigma2 = 0.5;
    EXPECT_DOUBLE_EQ(divstats::derive(c).mu, 1.0);
    EXPECT_DOUBLE_EQ(divstats::derive(divstats::normalize_to_unit_noise(c)).mu, 1.0);
}

TEST(NormalizeToUnitNoise, RejectsZeroNoise) {
    SystemConfig c;
    c.sigma2 = 0.0;
    EXPECT_THROW(divstats::normalize_to_unit_noise(c), divstats::DomainError);
}

TEST(ScaleInvariance, DerivedParametersUnchanged) {
    SystemConfig c;
    c.m_S = 2;
    c.m_I = 3;
    c.omega_S = 7.0;
    c.omega_I = 1.5;
    c.sigma2 = 0.3;
    const auto d0 = divstats::derive(c);
    for (double k : {1e-6, 0.37, 2.0, 1e5}) {
        SystemConfig s = c;
        s.omega_S *= k;
        s.omega_I *= k;
        s.sigma2 *= k;
        const auto d = divstats::derive(s);
        EXPECT_NEAR(d.mu, d0.mu, 1e-14 * d0.mu);
        EXPECT_NEAR(d.c, d0.c, 1e-14 * d0.c);
    }
}

TEST(AggregationInvariance, DerivedParametersUnchanged) {
    SystemConfig a;
    a.m_I = 1;
    a.n = 6;
    a.omega_I = 2.0;
    a.omega_S = 5.0;
    for (int k : {2, 3, 6}) {
        SystemConfig b = a;
        b.m_I = a.m_I * k;
        b.n = a.n / k;
        b.omega_I = a.omega_I * k;
        const auto da = divstats::derive(a);
        const auto db = divstats::derive(b);
        EXPECT_EQ(a.m_I * a.n, b.m_I * b.n);
        EXPECT_DOUBLE_EQ(da.mu, db.mu);
        EXPECT_DOUBLE_EQ(da.c, db.c);
        EXPECT_DOUBLE_EQ(da.var_dwi, db.var_dwi);
    }
}

TEST(ThresholdScale, MuOrMeanSnr) {
    SystemConfig c;
    c.omega_S = 8.0;
    c.omega_I = 2.0;
    EXPECT_DOUBLE_EQ(divstats::threshold_scale(c), 4.0);
    c.omega_I = 0.0;
    c.sigma2 = 2.0;
    EXPECT_DOUBLE_EQ(divstats::threshold_scale(c), 4.0);
}

TEST(Decibels, RoundTrip) {
    for (double db : {-30.0, -3.0, 0.0, 7.5, 20.0, 45.0}) {
        EXPECT_NEAR(divstats::linear_to_db(divstats::db_to_linear(db)), db, 1e-12);
    }
    EXPECT_DOUBLE_EQ(divstats::db_to_linear(10.0), 10.0);
}

TEST(Json, RoundTripAndPartialMerge) {
    SystemConfig c;
    c.m_S = 3;
    c.omega_S = 12.5;
    c.n = 4;
    c.f_mi = 7.0;
    nlohmann::json j = c;
    EXPECT_EQ(j.get<SystemConfig>(), c);

    SystemConfig base;
    base.sigma2 = 0.25;
    divstats::from_json(nlohmann::json::parse(R"({"m_I": 2, "omega_I": 3.0})"), base);
    EXPECT_EQ(base.m_I, 2);
    EXPECT_DOUBLE_EQ(base.omega_I, 3.0);
    EXPECT_DOUBLE_EQ(base.sigma2, 0.25);
}

TEST(Json, RejectsUnknownAndMistypedFields) {
    SystemConfig c;
    EXPECT_THROW(divstats::from_json(nlohmann::json::parse(R"({"bogus": 1})"), c), divstats::ValidationError);
    EXPECT_THROW(divstats::from_json(nlohmann::json::parse(R"({"m_S": 1.5})"), c), divstats::ValidationError);
    EXPECT_THROW(divstats::from_json(nlohmann::json::parse(R"({"omega_S": "x"})"), c), divstats::ValidationError);
    EXPECT_THROW(divstats::from_json(nlohmann::json::parse("[1, 2]"), c), divstats::ValidationError);
}
