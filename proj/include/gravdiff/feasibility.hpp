#pragma once

// Heating-rate budget of a torsion-pendulum style test. All rates are angular
// [1/s]; the "mHz" columns are 1e3 times the same number.

#include "gravdiff/constants.hpp"
#include "gravdiff/core_model.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/spectra.hpp"

#include <cmath>
#include <string>

namespace gravdiff {

struct FeasibilityParams {
    double Omega = 2.0 * pi * 1e-4;  // rad/s
    double rho = 2.26e4;             // kg/m^3
    double R = 0.03;                 // m
    double beta = 1.0;               // d / 2R
    double T = 0.01;                 // K
    double Q = 2e10;
    double N = 1.0;                  // detector noise, quanta
    double r = 0.01;                 // resolvable fraction of thermal noise
    double G = codata::G;
    double hbar = codata::hbar;
    double kB = codata::kB;

    double mass() const { return 4.0 * pi / 3.0 * rho * R * R * R; }
    double separation() const { return 2.0 * R * beta; }

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive");
        };
        pos(Omega, "Omega");
        pos(rho, "rho");
        pos(R, "R");
        pos(T, "T");
        pos(Q, "Q");
        pos(G, "G");
        pos(hbar, "hbar");
        pos(kB, "kB");
        if (!(beta >= 1.0)) throw DomainError("beta must be >= 1");
        if (!(N >= 0.0)) throw DomainError("N must be non-negative");
        if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0, 1]");
    }
};

inline FeasibilityParams table1_params() { return FeasibilityParams{}; }

inline double gravitational_frequency(const FeasibilityParams& p) { return std::sqrt(p.G * p.rho); }

/// Gamma_G = pi omega_G^2 / (12 beta^3 Omega)
inline double gravitational_heating_rate(const FeasibilityParams& p) {
    const double wg = gravitational_frequency(p);
    return pi * wg * wg / (12.0 * p.beta * p.beta * p.beta * p.Omega);
}

/// Gamma_th = eta n_T = kB T / (hbar Q)
inline double thermal_heating_rate(const FeasibilityParams& p) { return p.kB * p.T / (p.hbar * p.Q); }

/// t = N^2 / (r^2 Gamma_total). With Gamma_G = r Gamma_th and N = 1 this is
/// 1 / (r Gamma_G) up to the factor 1 / (1 + r).
inline double required_integration_time(const FeasibilityParams& p, double Gamma_total) {
    if (!(p.r > 0.0 && p.r <= 1.0)) throw DomainError("r must lie in (0, 1]");
    if (!(p.N >= 0.0)) throw DomainError("N must be non-negative");
    if (!(Gamma_total > 0.0)) throw DomainError("Gamma_total must be positive");
    return p.N * p.N / (p.r * p.r * Gamma_total);
}

/// Two-oscillator setup realizing the parameters: equal masses m, separation
/// 2 R beta, bare trap frequency chosen so the renormalized one is Omega.
inline PhysicalSetup table1_setup(const FeasibilityParams& p) {
    p.validate();
    PhysicalSetup s;
    s.m1 = s.m2 = p.mass();
    s.d = p.separation();
    s.G = p.G;
    s.hbar = p.hbar;
    s.kB = p.kB;
    const double shift = 2.0 * p.G * p.mass() / (s.d * s.d * s.d);
    s.omega1 = s.omega2 = std::sqrt(p.Omega * p.Omega + shift);
    s.T = p.T;
    s.eta = p.Omega / p.Q;
    return s;
}

inline constexpr double kVerdictSlack = 1e-9;
/// Table inputs carry one significant figure; a relaxed-condition miss
/// inside this band is still reported as feasible in principle.
inline constexpr double kRoundingBand = 0.10;

struct FeasibilityReport {
    double m = 0.0;                  // kg
    double d = 0.0;                  // m
    double omega_G = 0.0;            // 1/s
    double Gamma_G = 0.0;            // 1/s, also the largest admissible Gamma_th
    double Gamma_th = 0.0;           // 1/s
    double Gamma_total = 0.0;
    double Q_required = 0.0;         // Gamma_th <= Gamma_G at the given T
    double QoverT_required = 0.0;    // 1/K
    double Q_required_relaxed = 0.0; // r Gamma_th <= Gamma_G
    double t_int = 0.0;              // s
    double force_noise_margin = 0.0;        // (rhs - lhs) / rhs of the exact force-noise comparison
    double rate_margin = 0.0;        // 1 - Gamma_th / Gamma_G
    double relaxed_margin = 0.0;     // 1 - r Gamma_th / Gamma_G
    bool strict_satisfied = false;   // relaxed condition with 1e-9 slack
    double q_gap_orders = 0.0;       // log10(Q_required_relaxed / Q), > 0 means Q is short
    std::string verdict;

    double omega_G_mHz() const { return 1e3 * omega_G; }
    double Gamma_G_mHz() const { return 1e3 * Gamma_G; }
    double Gamma_th_mHz() const { return 1e3 * Gamma_th; }
    double t_int_days() const { return t_int / 86400.0; }
};

inline FeasibilityReport table1_report(const FeasibilityParams& p) {
    p.validate();
    FeasibilityReport rep;
    rep.m = p.mass();
    rep.d = p.separation();
    rep.omega_G = gravitational_frequency(p);
    rep.Gamma_G = gravitational_heating_rate(p);
    rep.Gamma_th = thermal_heating_rate(p);
    rep.Gamma_total = rep.Gamma_th + rep.Gamma_G;
    rep.Q_required = p.kB * p.T / (p.hbar * rep.Gamma_G);
    rep.QoverT_required = p.kB / (p.hbar * rep.Gamma_G);
    rep.Q_required_relaxed = p.r * rep.Q_required;
    rep.t_int = required_integration_time(p, rep.Gamma_total);

    const DetectionReport det = detection_condition(table1_setup(p), p.Omega, p.beta, p.rho);
    rep.force_noise_margin = det.exact_margin / det.exact_rhs;
    rep.rate_margin = 1.0 - rep.Gamma_th / rep.Gamma_G;
    rep.relaxed_margin = 1.0 - p.r * rep.Gamma_th / rep.Gamma_G;
    rep.strict_satisfied = rep.relaxed_margin >= -kVerdictSlack;
    rep.q_gap_orders = std::log10(rep.Q_required_relaxed / p.Q);
    rep.verdict = rep.relaxed_margin >= -kRoundingBand ? "feasible-in-principle" : "infeasible";
    return rep;
}

/// Time rescaling t -> t / s: Omega and T scale by s, G by s^2. Every margin
/// is unchanged; rates scale by s.
inline FeasibilityParams rescale_time(FeasibilityParams p, double factor) {
    if (!(factor > 0.0)) throw DomainError("rescale factor must be positive");
    p.Omega *= factor;
    p.T *= factor;
    p.G *= factor * factor;
    return p;
}

} // namespace gravdiff
