#include "gravdiff/feasibility.hpp"
#include "gravdiff/spectra.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gravdiff;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(ReferenceDesign, FrozenOracles) {
    const FeasibilityReport r = table1_report(table1_params());
    EXPECT_LT(rel(r.m, 2.5559997829606553), 1e-12);
    EXPECT_LT(rel(r.omega_G, 0.0012281660311211997), 1e-12);
    EXPECT_LT(rel(r.Gamma_G, 0.00062849658333333322), 1e-12);
    EXPECT_LT(rel(r.Gamma_th, 0.065460169603603208), 1e-12);
    EXPECT_LT(rel(r.Q_required, 2083071613736.5334), 1e-12);
    EXPECT_LT(rel(r.QoverT_required, 208307161373653.34), 1e-12);
    EXPECT_LT(rel(r.t_int, 151311.875), 1e-9);
}

TEST(ReferenceDesign, QuotedValuesWithinTolerance) {
    const FeasibilityReport r = table1_report(table1_params());
    EXPECT_LT(rel(r.m, 2.55), 0.01);
    EXPECT_LT(rel(r.QoverT_required, 2e14), 0.10);
    EXPECT_LT(rel(r.Q_required, 2e12), 0.10);
    EXPECT_LT(rel(r.Gamma_G_mHz(), 0.6), 0.10);
    EXPECT_LT(rel(r.t_int_days(), 2.0), 0.15);
    EXPECT_LT(rel(r.omega_G_mHz(), 1.1), 0.15);
}

TEST(ReferenceDesign, ReportIsInternallyConsistent) {
    const FeasibilityParams p = table1_params();
    const FeasibilityReport r = table1_report(p);
    EXPECT_DOUBLE_EQ(r.Gamma_th, p.kB * p.T / (p.hbar * p.Q));
    EXPECT_DOUBLE_EQ(r.t_int, p.N * p.N / (p.r * p.r * r.Gamma_total));
    EXPECT_DOUBLE_EQ(r.Gamma_total, r.Gamma_th + r.Gamma_G);
    EXPECT_NEAR(r.d, 0.06, 1e-15);
}

TEST(ReferenceDesign, VerdictAndRoundingGap) {
    const FeasibilityReport r = table1_report(table1_params());
    EXPECT_EQ(r.verdict, "feasible-in-principle");
    EXPECT_FALSE(r.strict_satisfied);
    EXPECT_GT(r.relaxed_margin, -kRoundingBand);
    EXPECT_LT(r.q_gap_orders, 0.05);
}

TEST(ReferenceDesign, CurrentTechnologyIsOrdersAway) {
    FeasibilityParams p = table1_params();
    p.Q = 1e6;
    const FeasibilityReport cold = table1_report(p);
    EXPECT_EQ(cold.verdict, "infeasible");
    EXPECT_NEAR(cold.q_gap_orders, 4.3, 0.1);
    p.T = 1.0;
    const FeasibilityReport warm = table1_report(p);
    EXPECT_EQ(warm.verdict, "infeasible");
    EXPECT_NEAR(warm.q_gap_orders, 6.3, 0.1);
    EXPECT_GE(warm.q_gap_orders, 4.0);
}

TEST(HeatingRates, Limits) {
    FeasibilityParams p = table1_params();
    const double g0 = gravitational_heating_rate(p);
    p.Omega *= 2;
    EXPECT_NEAR(gravitational_heating_rate(p), g0 / 2, 1e-15 * g0);
    p = table1_params();
    p.beta = 1e6;
    EXPECT_LT(gravitational_heating_rate(p), 1e-18 * g0);
    p = table1_params();
    p.Q = 2e12;
    EXPECT_NEAR(thermal_heating_rate(p) * 1e3, 0.65, 0.065);
    p.Q = 1e300;
    EXPECT_LT(thermal_heating_rate(p), 1e-280);
}

TEST(IntegrationTime, Scalings) {
    FeasibilityParams p = table1_params();
    const double Gamma = 0.01;
    const double t1 = required_integration_time(p, Gamma);
    p.N = 2;
    EXPECT_NEAR(required_integration_time(p, Gamma), 4 * t1, 1e-12 * t1);
    p.N = 3;
    p.r = 1.0;
    EXPECT_NEAR(required_integration_time(p, Gamma), 9 / Gamma, 1e-12);
    p.r = 0.0;
    EXPECT_THROW(required_integration_time(p, Gamma), DomainError);
    p.r = 0.5;
    p.N = -1;
    EXPECT_THROW(required_integration_time(p, Gamma), DomainError);
    p.N = 1;
    EXPECT_THROW(required_integration_time(p, 0.0), DomainError);
}

TEST(IntegrationTime, BoundaryReducesToOneOverRGammaG) {
    FeasibilityParams p = table1_params();
    const FeasibilityReport base = table1_report(p);
    p.Q = base.Q_required_relaxed;  // Gamma_G = r Gamma_th
    const FeasibilityReport r = table1_report(p);
    EXPECT_NEAR(r.Gamma_G, p.r * r.Gamma_th, 1e-12 * r.Gamma_G);
    EXPECT_NEAR(r.t_int * (1 + p.r), 1.0 / (p.r * r.Gamma_G), 1e-9 * r.t_int);
    EXPECT_LT(rel(1.0 / (p.r * base.Gamma_G), 159109.85), 1e-6);
    EXPECT_TRUE(r.strict_satisfied);
}

TEST(Params, Validation) {
    FeasibilityParams p = table1_params();
    p.beta = 0.99;
    EXPECT_THROW(table1_report(p), DomainError);
    p = table1_params();
    p.rho = 0.0;
    EXPECT_THROW(table1_report(p), DomainError);
    p = table1_params();
    p.r = 1.5;
    EXPECT_THROW(table1_report(p), DomainError);
    p = table1_params();
    p.N = -0.1;
    EXPECT_THROW(table1_report(p), DomainError);
}

TEST(Properties, ScaleInvariantInRadius) {
    const FeasibilityReport base = table1_report(table1_params());
    for (double s = 0.1; s <= 10.0; s *= 1.5) {
        FeasibilityParams p = table1_params();
        p.R *= s;
        const FeasibilityReport r = table1_report(p);
        EXPECT_NEAR(r.rate_margin, base.rate_margin, 1e-12 * std::abs(base.rate_margin));
        EXPECT_NEAR(r.relaxed_margin, base.relaxed_margin, 1e-12);
        EXPECT_NEAR(r.force_noise_margin, base.force_noise_margin, 1e-9 * std::abs(base.force_noise_margin));
    }
}

TEST(Properties, Monotonicity) {
    gdtest::Gen g(101);
    auto draw = [&] {
        FeasibilityParams p;
        p.Omega = g.log_uniform(1e-5, 1e-2);
        p.rho = g.uniform(1e3, 2.3e4);
        p.R = g.log_uniform(1e-3, 1e-1);
        p.beta = g.uniform(1.0, 5.0);
        p.T = g.log_uniform(1e-3, 300.0);
        p.Q = g.log_uniform(1e4, 1e14);
        return p;
    };
    for (int i = 0; i < 500; ++i) {
        const FeasibilityParams p = draw();
        const FeasibilityReport r0 = table1_report(p);
        const double f = g.uniform(1.01, 3.0);
        FeasibilityParams q = p;
        q.beta *= f;
        EXPECT_LE(table1_report(q).rate_margin, r0.rate_margin);
        EXPECT_LE(table1_report(q).force_noise_margin, r0.force_noise_margin);
        q = p;
        q.T *= f;
        EXPECT_LE(table1_report(q).rate_margin, r0.rate_margin);
        EXPECT_LE(table1_report(q).force_noise_margin, r0.force_noise_margin);
        q = p;
        q.rho *= f;
        EXPECT_GE(table1_report(q).rate_margin, r0.rate_margin);
        EXPECT_GE(table1_report(q).force_noise_margin, r0.force_noise_margin);
        q = p;
        q.Q *= f;
        EXPECT_GE(table1_report(q).rate_margin, r0.rate_margin);
        EXPECT_GE(table1_report(q).force_noise_margin, r0.force_noise_margin);
    }
}

TEST(Properties, DetectionConditionAgreesWithBudget) {
    gdtest::Gen g(102);
    int feasible = 0;
    for (int i = 0; i < 1000; ++i) {
        FeasibilityParams p;
        p.Omega = g.log_uniform(1e-5, 1e-1);
        p.rho = g.uniform(1e3, 2.3e4);
        p.R = g.log_uniform(1e-3, 1e-1);
        p.beta = g.uniform(1.0, 3.0);
        p.T = g.log_uniform(1e-3, 10.0);
        p.Q = g.log_uniform(1e8, 1e16);
        const FeasibilityReport r = table1_report(p);
        const DetectionReport d = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
        const bool budget = r.rate_margin >= -kVerdictSlack;
        ASSERT_EQ(budget, d.satisfied) << i;
        ASSERT_EQ(budget, d.exact_satisfied) << i;
        feasible += budget;
    }
    EXPECT_GT(feasible, 100);
    EXPECT_LT(feasible, 900);
}

TEST(Properties, TimeRescalingKeepsMarginsAndScalesRates) {
    const FeasibilityParams p = table1_params();
    const FeasibilityReport r = table1_report(p);
    const double s = 1e4;
    const FeasibilityReport q = table1_report(rescale_time(p, s));
    EXPECT_NEAR(q.rate_margin, r.rate_margin, 1e-12 * std::abs(r.rate_margin));
    EXPECT_NEAR(q.Gamma_G / r.Gamma_G, s, 1e-9 * s);
    EXPECT_NEAR(q.Gamma_th / r.Gamma_th, s, 1e-9 * s);
    EXPECT_NEAR(q.t_int * s / r.t_int, 1.0, 1e-9);
    EXPECT_THROW(rescale_time(p, -1.0), DomainError);
}
