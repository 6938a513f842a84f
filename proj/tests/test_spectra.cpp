#include "gravdiff/feasibility.hpp"
#include "gravdiff/separability_bounds.hpp"
#include "gravdiff/spectra.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace gravdiff;

namespace {

PhysicalSetup damped_setup(double eta, double T) {
    PhysicalSetup s = gdtest::rescaled_setup();
    s.eta = eta;
    s.T = T;
    return s;
}

/// Exchange-symmetric PSD gamma with gamma14 == gamma23.
DiffusionMatrix symmetric_gamma(gdtest::Gen& g) {
    Mat4 b = gdtest::random_psd4(g, 0.05);
    Mat4 swap = Mat4::Zero();
    swap(0, 1) = swap(1, 0) = swap(2, 3) = swap(3, 2) = 1.0;
    Mat4 s = 0.5 * (b + swap * b * swap);
    // gamma14 == gamma23 in addition to the exchange symmetry
    const double c = 0.5 * (s(0, 3) + s(1, 2));
    const double d = s(0, 3) - c;
    s(0, 3) = s(3, 0) = s(1, 2) = s(2, 1) = c;
    s += std::abs(d) * Mat4::Identity();
    return DiffusionMatrix(s);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST(FixedSource, VacuumLimit) {
    const PhysicalSetup s = damped_setup(0.01, 0.0);
    const LinearizedSystem sys = linearize(s);
    const std::vector<double> grid = positive_grid(0.2, 3.0, 50);
    const NoiseSpectrum sp = dns_fixed_source(s, sys, DiffusionMatrix::zero(), grid);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double w = grid[i];
        const std::complex<double> den(sys.m1 * (sys.Omega1 * sys.Omega1 - w * w) + sys.K, -sys.m1 * s.eta * w);
        const double expected = s.hbar * s.hbar / std::norm(den) * 2 * s.eta * sys.m1 * w / s.hbar;
        EXPECT_LT(rel(sp.total[i], expected), 1e-13);
        EXPECT_EQ(sp.grav_position[i], 0.0);
        EXPECT_EQ(sp.grav_momentum[i], 0.0);
    }
}

TEST(FixedSource, ResonanceDenominator) {
    const PhysicalSetup s = damped_setup(0.01, 0.0);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix gamma(Vec4(0.2, 0.2, 0.0, 0.0).asDiagonal());
    const double w[] = {sys.Omega1};
    const NoiseSpectrum sp = dns_fixed_source(s, sys, gamma, w);
    const double m = sys.m1;
    const double den = sys.K * sys.K + m * m * s.eta * s.eta * sys.Omega1 * sys.Omega1;
    EXPECT_LT(rel(sp.grav_position[0], s.hbar * s.hbar * 0.2 / den), 1e-13);
}

TEST(FixedSource, ComponentsSumToTotal) {
    gdtest::Gen g(41);
    for (int i = 0; i < 100; ++i) {
        const PhysicalSetup s = damped_setup(g.uniform(0.001, 0.2), g.uniform(0.0, 5.0));
        const LinearizedSystem sys = linearize(s);
        const std::vector<double> grid = positive_grid(0.1, 3.0, 64);
        const NoiseSpectrum sp = dns_fixed_source(s, sys, DiffusionMatrix(gdtest::random_psd4(g)), grid);
        for (std::size_t k = 0; k < sp.size(); ++k) {
            const double sum = sp.grav_position[k] + sp.grav_momentum[k] + sp.thermal[k] + sp.cross[k];
            ASSERT_LE(std::abs(sum - sp.total[k]), 1e-12 * std::abs(sp.total[k]));
        }
    }
}

TEST(FixedSource, ClassicalLimit) {
    const PhysicalSetup s = damped_setup(0.01, 1000.0);
    const LinearizedSystem sys = linearize(s);
    const std::vector<double> grid = positive_grid(0.5, 1.5, 40);
    const NoiseSpectrum sp = dns_fixed_source(s, sys, DiffusionMatrix::zero(), grid);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double w = grid[i];
        ASSERT_LT(s.hbar * w / (2 * s.kB * s.T), 0.01);
        const std::complex<double> den(sys.m1 * (sys.Omega1 * sys.Omega1 - w * w) + sys.K, -sys.m1 * s.eta * w);
        const double classical =
            s.hbar * s.hbar / std::norm(den) * 2 * s.eta * sys.m1 * s.kB * s.T / (s.hbar * s.hbar);
        EXPECT_LT(rel(sp.thermal[i], classical), 0.01);
    }
}

TEST(FixedSource, PositiveForPsdGamma) {
    gdtest::Gen g(42);
    for (int i = 0; i < 2000; ++i) {
        const PhysicalSetup s = damped_setup(g.log_uniform(1e-3, 2.0), g.coin() ? 0.0 : g.uniform(0, 3));
        const LinearizedSystem sys = linearize(s);
        const std::vector<double> grid = positive_grid(0.05, 4.0, 40, true);
        const NoiseSpectrum sp = dns_fixed_source(s, sys, DiffusionMatrix(gdtest::random_psd4(g)), grid);
        for (double v : sp.total) ASSERT_GE(v, 0.0);
    }
}

TEST(FixedSource, ResonanceDominanceAtHighQ) {
    for (double Q : {1e3, 1e4, 1e5}) {
        PhysicalSetup s = damped_setup(0.0, 0.5);
        const LinearizedSystem sys0 = linearize(s);
        const double wres = fixed_source_resonance(sys0);
        s.eta = wres / Q;
        const LinearizedSystem sys = linearize(s);
        const DiffusionMatrix gamma = minimal_diffusion(s, Allocation::Mixed, sys.Omega1);
        const double w[] = {wres, 1.1 * wres, 0.9 * wres};
        const NoiseSpectrum sp = dns_fixed_source(s, sys, gamma, w);
        EXPECT_GE(sp.total[0], 100 * sp.total[1]) << Q;
        EXPECT_GE(sp.total[0], 100 * sp.total[2]) << Q;
    }
}

TEST(FixedSource, ZeroFrequencyHandling) {
    const PhysicalSetup s = damped_setup(0.01, 2.0);
    const LinearizedSystem sys = linearize(s);
    const double w[] = {0.0, 0.5};
    const NoiseSpectrum sp = dns_fixed_source(s, sys, DiffusionMatrix::zero(), w);
    ASSERT_EQ(sp.zero_substituted.size(), 1u);
    EXPECT_EQ(sp.zero_substituted[0], 0u);
    const double den = std::pow(sys.m1 * sys.Omega1 * sys.Omega1 + sys.K, 2);
    EXPECT_LT(rel(sp.total[0], s.hbar * s.hbar / den * 2 * s.eta * sys.m1 * s.kB * s.T / (s.hbar * s.hbar)), 1e-13);
    SpectrumOptions reject;
    reject.zero = ZeroFrequency::Reject;
    EXPECT_THROW(dns_fixed_source(s, sys, DiffusionMatrix::zero(), w, reject), DomainError);
    const double bad[] = {std::nan("")};
    EXPECT_THROW(dns_fixed_source(s, sys, DiffusionMatrix::zero(), bad), DomainError);
    EXPECT_THROW(dns_fixed_source(s, sys, DiffusionMatrix::zero(Units::Dimensionless), w), DomainError);
}

TEST(SymmetricPair, InterferenceLineVanishesOnResonance) {
    gdtest::Gen g(43);
    for (int i = 0; i < 200; ++i) {
        const PhysicalSetup s = damped_setup(g.uniform(0.001, 0.1), g.uniform(0.0, 3.0));
        const LinearizedSystem sys = linearize(s);
        const DiffusionMatrix gamma = symmetric_gamma(g);
        const double w[] = {sys.Omega1};
        const NoiseSpectrum sp = dns_symmetric_pair(s, sys, gamma, w);
        const double m = sys.m1;
        const double den = sys.K * sys.K + m * m * s.eta * s.eta * sys.Omega1 * sys.Omega1;
        const double local_cross = -2 * s.eta * m * gamma(0, 2) * s.hbar * s.hbar / den;
        ASSERT_NEAR(sp.cross[0], local_cross, 1e-11 * sp.total[0]);
    }
}

TEST(SymmetricPair, ClosedFormOnResonance) {
    gdtest::Gen g(44);
    for (int i = 0; i < 200; ++i) {
        const PhysicalSetup s = damped_setup(g.uniform(0.001, 0.1), g.uniform(0.01, 3.0));
        const LinearizedSystem sys = linearize(s);
        const DiffusionMatrix gamma = symmetric_gamma(g);
        const double O = sys.Omega1;
        const double w[] = {O};
        const NoiseSpectrum sp = dns_symmetric_pair(s, sys, gamma, w);
        const double m = sys.m1, eta = s.eta, hb = s.hbar;
        const double coth = 1.0 / std::tanh(hb * O / (2 * s.kB * s.T));
        const double closed = hb * hb / (sys.K * sys.K + m * m * eta * eta * O * O) *
                              (gamma(0, 0) + m * m * (eta * eta + O * O) * gamma(2, 2) - 2 * m * eta * gamma(0, 2) +
                               eta * m * O / hb * (1 + coth));
        ASSERT_LT(rel(sp.total[0], closed), 1e-12);
    }
}

TEST(SymmetricPair, UncoupledReducesToSingleOscillator) {
    gdtest::Gen g(45);
    PhysicalSetup s = damped_setup(0.02, 1.5);
    s.G = 0.0;
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix gamma = symmetric_gamma(g);
    const std::vector<double> grid = positive_grid(0.3, 2.0, 100);
    const NoiseSpectrum pair = dns_symmetric_pair(s, sys, gamma, grid);
    const NoiseSpectrum single = dns_fixed_source(s, sys, gamma, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LT(rel(pair.total[i], single.total[i]), 1e-13);
}

TEST(SymmetricPair, EvenInFrequency) {
    gdtest::Gen g(46);
    const PhysicalSetup s = damped_setup(0.05, 0.7);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix gamma = symmetric_gamma(g);
    const std::vector<double> grid = two_sided_grid(3.0, 200);
    SpectrumOptions sym;
    sym.kernel = ThermalKernel::Symmetrized;
    const NoiseSpectrum even = dns_symmetric_pair(s, sys, gamma, grid, sym);
    const NoiseSpectrum printed = dns_symmetric_pair(s, sys, gamma, grid);
    for (std::size_t i = 0; i < grid.size() / 2; ++i) {
        const std::size_t j = grid.size() - 1 - i;
        ASSERT_DOUBLE_EQ(grid[i], -grid[j]);
        EXPECT_LT(rel(even.total[i], even.total[j]), 1e-12);
        EXPECT_LT(rel(printed.grav_position[i], printed.grav_position[j]), 1e-12);
        EXPECT_LT(rel(printed.grav_momentum[i], printed.grav_momentum[j]), 1e-12);
        EXPECT_NEAR(printed.cross[i], printed.cross[j], 1e-12 * printed.total[j]);
    }
}

TEST(SymmetricPair, PositiveForSymmetricPsdGamma) {
    gdtest::Gen g(47);
    for (int i = 0; i < 500; ++i) {
        const PhysicalSetup s = damped_setup(g.log_uniform(1e-3, 0.5), g.uniform(0, 3));
        const LinearizedSystem sys = linearize(s);
        const std::vector<double> grid = positive_grid(0.05, 4.0, 40, true);
        const NoiseSpectrum sp = dns_symmetric_pair(s, sys, symmetric_gamma(g), grid);
        for (double v : sp.total) ASSERT_GE(v, 0.0);
    }
}

TEST(SymmetricPair, SymmetryErrors) {
    PhysicalSetup s = damped_setup(0.01, 1.0);
    const double w[] = {1.0};
    Mat4 bad = Mat4::Identity();
    bad(1, 1) = 2.0;
    EXPECT_THROW(dns_symmetric_pair(s, linearize(s), DiffusionMatrix(bad), w), SymmetryError);
    Mat4 cross = Mat4::Identity();
    cross(0, 3) = cross(3, 0) = 0.3;
    EXPECT_THROW(dns_symmetric_pair(s, linearize(s), DiffusionMatrix(cross), w), SymmetryError);
    s.omega2 = 1.2;
    EXPECT_THROW(dns_symmetric_pair(s, linearize(s), DiffusionMatrix::zero(), w), SymmetryError);
    s = damped_setup(0.01, 1.0);
    s.m2 = 1.5;
    s.G = 0.01;
    EXPECT_THROW(dns_symmetric_pair(s, linearize(s), DiffusionMatrix::zero(), w), SymmetryError);
}

TEST(Detection, GravitationalFrequencyOracle) {
    const FeasibilityParams p = table1_params();
    const DetectionReport r = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
    EXPECT_NEAR(r.omega_G / 0.0012281660311211997, 1.0, 1e-12);
}

TEST(Detection, MaximumHeatingRateAtBoundary) {
    // Gamma where the scaled margin vanishes: pi omega_G^2 / (12 beta^3 Omega)
    FeasibilityParams p = table1_params();
    const double Gamma_max = 0.00062849658333333322;
    p.Q = p.kB * p.T / (p.hbar * Gamma_max);
    const DetectionReport r = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
    EXPECT_NEAR(r.Gamma / Gamma_max, 1.0, 1e-9);
    EXPECT_NEAR(r.margin, 0.0, 1e-9);
    EXPECT_NEAR(r.Gamma * 1e3, 0.6, 0.06);
}

TEST(Detection, ScaleInvariantInRadius) {
    const FeasibilityParams p = table1_params();
    const DetectionReport base = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
    for (double f : {0.1, 0.5, 2.0, 10.0}) {
        FeasibilityParams q = p;
        q.R *= f;
        const DetectionReport r = detection_condition(table1_setup(q), q.Omega, q.beta, q.rho);
        EXPECT_NEAR(r.margin, base.margin, 1e-12);
        EXPECT_NEAR(r.exact_margin / r.exact_rhs, base.exact_margin / base.exact_rhs, 1e-12);
    }
}

TEST(Detection, ClassicalFormMatchesExactAtHighTemperature) {
    const FeasibilityParams p = table1_params();
    const DetectionReport r = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
    EXPECT_NEAR(r.exact_lhs / r.exact_rhs, r.scaled_lhs / r.scaled_rhs, 1e-6 * r.scaled_lhs / r.scaled_rhs);
}

TEST(Detection, Errors) {
    const FeasibilityParams p = table1_params();
    const PhysicalSetup s = table1_setup(p);
    EXPECT_THROW(detection_condition(s, p.Omega, 0.9, p.rho), DomainError);
    EXPECT_THROW(detection_condition(s, p.Omega, 1.0, 0.0), DomainError);
    EXPECT_THROW(detection_condition(s, 0.0, 1.0, p.rho), DomainError);
}

TEST(Grids, ExcludeZero) {
    for (std::size_t n : {2u, 10u, 2048u}) {
        const std::vector<double> g = two_sided_grid(5.0, n);
        EXPECT_EQ(g.size(), n);
        for (double w : g) EXPECT_NE(w, 0.0);
    }
    const std::vector<double> lg = positive_grid(1e-3, 1e3, 7, true);
    EXPECT_NEAR(lg[3], 1.0, 1e-12);
    EXPECT_THROW(positive_grid(0.0, 1.0, 3), DomainError);
    EXPECT_THROW(two_sided_grid(1.0, 3), DomainError);
}
