#pragma once

// Closed-form displacement noise spectra (two-sided, S(w) = int C(tau) e^{i w tau} dtau)
// of a monitored oscillator driven by the gravitational white noises
// E[w_i(t) w_j(t')] = gamma_ij delta(t - t') and a thermal bath.

#include "gravdiff/constants.hpp"
#include "gravdiff/core_model.hpp"
#include "gravdiff/errors.hpp"

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace gravdiff {

enum class ThermalKernel {
    Printed,      // w (1 + coth(hbar w / 2 kB T)), includes the vacuum term
    Symmetrized,  // w coth(hbar w / 2 kB T), even in w
};

enum class ZeroFrequency {
    Substitute,  // use the finite w -> 0 limit 2 kB T / hbar and flag the bin
    Reject,      // throw DomainError
};

struct SpectrumOptions {
    ThermalKernel kernel = ThermalKernel::Printed;
    ZeroFrequency zero = ZeroFrequency::Substitute;
};

/// Sampled spectrum [m^2 s]. Analytic spectra fill every component;
/// estimated spectra only fill `total` (has_components() is false).
struct NoiseSpectrum {
    std::vector<double> omega;
    std::vector<double> total;
    std::vector<double> grav_position;
    std::vector<double> grav_momentum;
    std::vector<double> thermal;
    std::vector<double> cross;
    /// Grid indices where the w = 0 limit was substituted.
    std::vector<std::size_t> zero_substituted;

    std::size_t size() const { return omega.size(); }
    bool has_components() const { return thermal.size() == omega.size() && !omega.empty(); }

    void resize(std::size_t n, bool with_components) {
        omega.assign(n, 0.0);
        total.assign(n, 0.0);
        const std::size_t c = with_components ? n : 0;
        grav_position.assign(c, 0.0);
        grav_momentum.assign(c, 0.0);
        thermal.assign(c, 0.0);
        cross.assign(c, 0.0);
    }
};

/// Thermal force term in units of gamma11: (eta m w / hbar) * kernel(w).
/// Sets `substituted` when the w = 0 limit was used.
inline double thermal_force_term(double w, double eta, double m, const PhysicalSetup& s, const SpectrumOptions& opt,
                                 bool& substituted) {
    substituted = false;
    if (!std::isfinite(w)) throw DomainError("frequency must be finite");
    const double pref = eta * m / s.hbar;
    if (s.T == 0.0) {
        // coth -> sign(w)
        if (opt.kernel == ThermalKernel::Symmetrized) return pref * std::abs(w);
        return w > 0.0 ? 2.0 * pref * w : 0.0;
    }
    if (w == 0.0) {
        if (opt.zero == ZeroFrequency::Reject)
            throw DomainError("w = 0 with T > 0: coth is singular; exclude 0 from the grid");
        substituted = true;
        return pref * 2.0 * s.kB * s.T / s.hbar;
    }
    const double x = s.hbar * w / (2.0 * s.kB * s.T);
    const double coth = 1.0 / std::tanh(x);
    const double kernel = opt.kernel == ThermalKernel::Printed ? w * (1.0 + coth) : w * coth;
    return pref * kernel;
}

/// Resonance of the monitored oscillator when its partner is held fixed:
/// the static coupling stiffens the trap, w_res^2 = Omega^2 + K/m.
inline double fixed_source_resonance(const LinearizedSystem& sys) {
    return std::sqrt(sys.Omega1 * sys.Omega1 + sys.K / sys.m1);
}

/// One mass fixed and acting only as a source. Monitors oscillator 1:
///
///   S(w) = hbar^2 / |m(O^2 - w^2 - i eta w) + K|^2
///          [g11 + m^2 w^2 g33 + (eta m w/hbar)(1 + coth) + m^2 eta^2 g33 - 2 m eta g13]
inline NoiseSpectrum dns_fixed_source(const PhysicalSetup& setup, const LinearizedSystem& sys,
                                      const DiffusionMatrix& gamma, std::span<const double> grid,
                                      const SpectrumOptions& opt = {}) {
    if (gamma.units() != Units::SI) throw DomainError("spectra expect an SI diffusion matrix");
    const double m = sys.m1;
    const double O = sys.Omega1;
    const double eta = setup.eta;
    const double hb2 = setup.hbar * setup.hbar;
    const double g11 = gamma(0, 0), g33 = gamma(2, 2), g13 = gamma(0, 2);

    NoiseSpectrum out;
    out.resize(grid.size(), true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        const std::complex<double> den = m * std::complex<double>(O * O - w * w, -eta * w) + sys.K;
        const double pref = hb2 / std::norm(den);
        bool sub = false;
        const double th = thermal_force_term(w, eta, m, setup, opt, sub);
        if (sub) out.zero_substituted.push_back(i);
        out.omega[i] = w;
        out.grav_position[i] = pref * g11;
        out.grav_momentum[i] = pref * m * m * (w * w + eta * eta) * g33;
        out.thermal[i] = pref * th;
        out.cross[i] = pref * (-2.0 * m * eta * g13);
        out.total[i] = out.grav_position[i] + out.grav_momentum[i] + out.thermal[i] + out.cross[i];
    }
    return out;
}

/// Response matrix A_x(w) = chi(w) [[a, -K], [-K, a]], a = m(O^2 - w^2 - i eta w),
/// chi = (a^2 - K^2)^-1, of the symmetric pair: x = A_x B_x.
struct PairResponse {
    std::complex<double> a11;
    std::complex<double> a12;
};

inline PairResponse pair_response(double w, double m, double O, double eta, double K) {
    const std::complex<double> a = m * std::complex<double>(O * O - w * w, -eta * w);
    const std::complex<double> chi = 1.0 / (a * a - K * K);
    return {chi * a, -chi * K};
}

/// Symmetric pair (equal masses, frequencies, damping, exchange-symmetric
/// gamma), both oscillators free, oscillator 1 monitored. Thermal forces on
/// the two oscillators are independent.
inline NoiseSpectrum dns_symmetric_pair(const PhysicalSetup& setup, const LinearizedSystem& sys,
                                        const DiffusionMatrix& gamma, std::span<const double> grid,
                                        const SpectrumOptions& opt = {}) {
    if (gamma.units() != Units::SI) throw DomainError("spectra expect an SI diffusion matrix");
    auto rel_eq = [](double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; };
    const double mscale = std::max(sys.m1, sys.m2);
    if (!rel_eq(sys.m1, sys.m2, mscale)) throw SymmetryError("symmetric pair requires equal masses");
    if (!rel_eq(sys.Omega1, sys.Omega2, std::max(sys.Omega1, sys.Omega2)))
        throw SymmetryError("symmetric pair requires equal renormalized frequencies");
    const Mat4& g = gamma.matrix();
    const double gscale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    if (!rel_eq(g(0, 0), g(1, 1), gscale) || !rel_eq(g(2, 2), g(3, 3), gscale) ||
        !rel_eq(g(0, 2), g(1, 3), gscale) || !rel_eq(g(0, 3), g(1, 2), gscale))
        throw SymmetryError("gamma is not exchange symmetric (1<->2, 3<->4)");

    const double m = sys.m1;
    const double O = sys.Omega1;
    const double eta = setup.eta;
    const double hb2 = setup.hbar * setup.hbar;

    NoiseSpectrum out;
    out.resize(grid.size(), true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        const PairResponse r = pair_response(w, m, O, eta, sys.K);
        const double n11 = std::norm(r.a11);
        const double n12 = std::norm(r.a12);
        bool sub = false;
        const double th = thermal_force_term(w, eta, m, setup, opt, sub);
        if (sub) out.zero_substituted.push_back(i);

        const std::complex<double> em(eta, -w);  // (eta - i w)
        const std::complex<double> ep(eta, w);   // (eta + i w)
        // E[B1 B2*] / hbar^2 for the gravitational noises.
        const std::complex<double> corr = g(0, 1) - em * m * g(1, 2) - ep * m * g(0, 3) + (eta * eta + w * w) * m * m * g(2, 3);
        const double line3 = 2.0 * hb2 * std::real(r.a11 * std::conj(r.a12) * corr);

        out.omega[i] = w;
        out.grav_position[i] = hb2 * (n11 * g(0, 0) + n12 * g(1, 1));
        out.grav_momentum[i] = hb2 * (eta * eta + w * w) * m * m * (n11 * g(2, 2) + n12 * g(3, 3));
        out.thermal[i] = hb2 * (n11 + n12) * th;
        out.cross[i] = hb2 * (-2.0 * eta * m) * (n11 * g(0, 2) + n12 * g(1, 3)) + line3;
        out.total[i] = out.grav_position[i] + out.grav_momentum[i] + out.thermal[i] + out.cross[i];
    }
    return out;
}

/// Comparison of thermal and gravitational force noise on resonance, in
/// the exact form and in the scale-invariant classical-limit form
///   (12/pi) beta^3 Omega Gamma <= omega_G^2,  Gamma = eta kB T / (hbar Omega).
struct DetectionReport {
    double omega_G = 0.0;       // sqrt(G rho) [1/s]
    double Gamma = 0.0;         // thermal phonon heating rate [1/s]
    double exact_lhs = 0.0;     // eta m Omega coth(hbar Omega / 2 kB T) / hbar
    double exact_rhs = 0.0;     // G m^2 / (hbar d^3)
    double exact_margin = 0.0;  // rhs - lhs
    bool exact_satisfied = false;
    double scaled_lhs = 0.0;    // (12/pi) beta^3 Omega Gamma
    double scaled_rhs = 0.0;    // omega_G^2
    double margin = 0.0;        // 1 - scaled_lhs / scaled_rhs, scale invariant
    bool satisfied = false;
};

inline DetectionReport detection_condition(const PhysicalSetup& setup, double Omega, double beta, double rho) {
    if (!(beta >= 1.0)) throw DomainError("beta must be >= 1");
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    if (!(Omega > 0.0)) throw DomainError("Omega must be positive");
    const double slack = 1e-9;
    DetectionReport r;
    const double m = setup.m1;
    r.omega_G = std::sqrt(setup.G * rho);
    r.Gamma = setup.eta * setup.kB * setup.T / (setup.hbar * Omega);

    const double coth = setup.T == 0.0 ? 1.0 : 1.0 / std::tanh(setup.hbar * Omega / (2.0 * setup.kB * setup.T));
    r.exact_lhs = setup.eta * m * Omega * coth / setup.hbar;
    r.exact_rhs = setup.G * m * m / (setup.hbar * setup.d * setup.d * setup.d);
    r.exact_margin = r.exact_rhs - r.exact_lhs;
    r.exact_satisfied = r.exact_margin >= -slack * r.exact_rhs;

    r.scaled_lhs = 12.0 / pi * beta * beta * beta * Omega * r.Gamma;
    r.scaled_rhs = r.omega_G * r.omega_G;
    r.margin = 1.0 - r.scaled_lhs / r.scaled_rhs;
    r.satisfied = r.margin >= -slack;
    return r;
}

/// n points evenly spaced on [lo, hi]; lo must be positive so w = 0 is excluded.
inline std::vector<double> positive_grid(double lo, double hi, std::size_t n, bool logarithmic = false) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw DomainError("positive_grid needs 0 < lo <= hi and n > 0");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = logarithmic ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    return g;
}

/// n cell-centred points on (-hi, hi); symmetric about and never equal to 0 for even n.
inline std::vector<double> two_sided_grid(double hi, std::size_t n) {
    if (!(hi > 0.0) || n == 0 || n % 2 != 0) throw DomainError("two_sided_grid needs hi > 0 and even n");
    std::vector<double> g(n);
    const double step = 2.0 * hi / static_cast<double>(n);
    // Mirror the positive half so the grid is exactly symmetric.
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) {
        const double w = (static_cast<double>(k) + 0.5) * step;
        g[half + k] = w;
        g[half - 1 - k] = -w;
    }
    return g;
}

} // namespace gravdiff
