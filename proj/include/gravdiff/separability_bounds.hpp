#pragma once

// Necessary conditions on the diffusion matrix for the dynamics not to
// entangle the product ground state, from the short-time expansion of the
// PPT condition along z0 = (a, -b, i a, i b):
//
//   alpha_resolved  Tr g + 2(g12 - g34) cos a - 2(g14 + g23) sin a >= 2 k sin a
//   trace           Tr g - 2(g14 + g23)                             >= 2 k
//   weak            Tr g                                            >= k
//   dimensional     O2 G11 + O1 G22 + m^2 O1 O2 (O1 G33 + O2 G44)    >= 2 G m^2 sqrt(O1 O2) / (hbar d^3)
//   final           G11 + m^2 w^2 G33                               >= G m^2 / (hbar d^3)
//
// with g = gamma_bar (dimensionless), G = gamma (SI), k = K / (m sqrt(O1 O2)).
// Every report is oriented as lhs >= rhs, margin = lhs - rhs.

#include "gravdiff/core_model.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/hash.hpp"
#include "gravdiff/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

namespace gravdiff {

enum class BoundId { AlphaResolved, Trace, Weak, Dimensional, Final, TightestAlpha };

inline std::string to_string(BoundId id) {
    switch (id) {
    case BoundId::AlphaResolved: return "alpha_resolved";
    case BoundId::Trace: return "trace";
    case BoundId::Weak: return "weak";
    case BoundId::Dimensional: return "dimensional";
    case BoundId::Final: return "final";
    case BoundId::TightestAlpha: return "tightest_alpha";
    }
    return "unknown";
}

/// Relative slack on bound satisfaction.
inline constexpr double kBoundRelTolerance = 1e-9;

struct BoundReport {
    BoundId id = BoundId::Trace;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tol = 0.0;
    bool satisfied = false;
    std::string inputs_hash;
};

inline BoundReport make_report(BoundId id, double lhs, double rhs, std::string inputs_hash) {
    BoundReport r;
    r.id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.tol = kBoundRelTolerance * std::max(std::abs(rhs), std::abs(lhs));
    r.satisfied = r.margin >= -r.tol;
    r.inputs_hash = std::move(inputs_hash);
    return r;
}

namespace detail {

inline void require_dimensionless(const DiffusionMatrix& g) {
    if (g.units() != Units::Dimensionless) throw DomainError("bound expects a dimensionless diffusion matrix");
}

inline void require_si(const DiffusionMatrix& g) {
    if (g.units() != Units::SI) throw DomainError("bound expects an SI diffusion matrix");
}

inline bool rel_equal(double a, double b, double rel = 1e-9) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * scale;
}

inline std::string hash_of(const Mat4& g, std::initializer_list<double> extra) {
    Fnv1a h;
    h.update(std::span<const double>(g.data(), 16));
    for (double v : extra) h.update(v);
    return h.hex();
}

inline void require_equal_masses(double m1, double m2) {
    if (!rel_equal(m1, m2)) throw SymmetryError("bound derived for equal masses only");
}

inline void require_symmetric_diffusion(const DiffusionMatrix& g) {
    // Scale for the "zero" comparison: the largest diagonal entry in each block.
    const double sx = std::max(std::abs(g(0, 0)), std::abs(g(1, 1)));
    const double sp = std::max(std::abs(g(2, 2)), std::abs(g(3, 3)));
    if (std::abs(g(0, 0) - g(1, 1)) > 1e-9 * sx) throw SymmetryError("gamma11 != gamma22");
    if (std::abs(g(2, 2) - g(3, 3)) > 1e-9 * sp) throw SymmetryError("gamma33 != gamma44");
}

} // namespace detail

/// Condition along z0 for a given phase difference alpha = arg(a) - arg(b).
inline BoundReport alpha_bound(const DiffusionMatrix& gamma_bar, const DimensionlessModel& model, double alpha) {
    detail::require_dimensionless(gamma_bar);
    const Mat4& g = gamma_bar.matrix();
    const double lhs = g.trace() + 2.0 * (g(0, 1) - g(2, 3)) * std::cos(alpha) - 2.0 * (g(0, 3) + g(1, 2)) * std::sin(alpha);
    const double rhs = 2.0 * model.coupling * std::sin(alpha);
    return make_report(BoundId::AlphaResolved, lhs, rhs, detail::hash_of(g, {model.coupling, alpha}));
}

/// The alpha-resolved condition at the phase maximizing the interaction
/// side (sin alpha = 1).
inline BoundReport strongest_bound(const DiffusionMatrix& gamma_bar, const DimensionlessModel& model) {
    detail::require_dimensionless(gamma_bar);
    const Mat4& g = gamma_bar.matrix();
    const double lhs = g.trace() - 2.0 * (g(0, 3) + g(1, 2));
    const double rhs = 2.0 * model.coupling;
    return make_report(BoundId::Trace, lhs, rhs, detail::hash_of(g, {model.coupling}));
}

/// Worst case of the alpha-resolved condition over all alpha:
/// Tr g >= 2 sqrt((g12 - g34)^2 + (g14 + g23 + k)^2). Coincides with
/// strongest_bound when g12 == g34 and g14 + g23 + k >= 0.
inline BoundReport tightest_alpha_bound(const DiffusionMatrix& gamma_bar, const DimensionlessModel& model) {
    detail::require_dimensionless(gamma_bar);
    const Mat4& g = gamma_bar.matrix();
    const double a = g(0, 1) - g(2, 3);
    const double b = g(0, 3) + g(1, 2) + model.coupling;
    return make_report(BoundId::TightestAlpha, g.trace(), 2.0 * std::hypot(a, b), detail::hash_of(g, {model.coupling}));
}

/// Tr gamma_bar >= k; follows from strongest_bound via |g_ij| <= (g_ii + g_jj)/2.
inline BoundReport weak_bound(const DiffusionMatrix& gamma_bar, const DimensionlessModel& model) {
    detail::require_dimensionless(gamma_bar);
    const Mat4& g = gamma_bar.matrix();
    return make_report(BoundId::Weak, g.trace(), model.coupling, detail::hash_of(g, {model.coupling}));
}

enum class DimensionalForm {
    Consistent,    // with the m^2 factor on the momentum terms
    PaperLiteral,  // as printed, without m^2 (dimensionally inconsistent)
};

/// The weak bound rewritten in SI entries of gamma (equal masses).
inline BoundReport dimensional_bound(const DiffusionMatrix& gamma, const LinearizedSystem& sys,
                                     DimensionalForm form = DimensionalForm::Consistent) {
    detail::require_si(gamma);
    detail::require_equal_masses(sys.m1, sys.m2);
    const Mat4& g = gamma.matrix();
    const double m = sys.m1;
    const double o1 = sys.Omega1;
    const double o2 = sys.Omega2;
    const double mom_factor = form == DimensionalForm::Consistent ? m * m : 1.0;
    const double lhs = o2 * g(0, 0) + o1 * g(1, 1) + mom_factor * o1 * o2 * (o1 * g(2, 2) + o2 * g(3, 3));
    // 2 G m^2 sqrt(O1 O2) / (hbar d^3) = K sqrt(O1 O2) / hbar
    const double rhs = sys.K * std::sqrt(o1 * o2) / sys.hbar;
    return make_report(BoundId::Dimensional, lhs, rhs,
                       detail::hash_of(g, {o1, o2, sys.K, m, form == DimensionalForm::Consistent ? 0.0 : 1.0}));
}

/// Right-hand side G m^2 / (hbar d^3) of the final bound (equal masses).
inline double final_bound_rhs(const PhysicalSetup& setup) {
    const double d3 = setup.d * setup.d * setup.d;
    return setup.G * setup.m1 * setup.m1 / (setup.hbar * d3);
}

/// gamma11 + m^2 w^2 gamma33 >= G m^2 / (hbar d^3).
///
/// With `omega` given, gamma is assumed frequency independent and the bound
/// is evaluated at that frequency. Without it, the symmetric-setup route is
/// used: w is the common renormalized resonance Omega of the setup.
inline BoundReport final_bound(const DiffusionMatrix& gamma, const PhysicalSetup& setup,
                               std::optional<double> omega = std::nullopt) {
    detail::require_si(gamma);
    detail::require_equal_masses(setup.m1, setup.m2);
    detail::require_symmetric_diffusion(gamma);
    double w = 0.0;
    if (omega) {
        if (!(*omega > 0.0)) throw DomainError("final_bound frequency must be positive");
        w = *omega;
    } else {
        if (!detail::rel_equal(setup.omega1, setup.omega2))
            throw SymmetryError("symmetric-setup route requires omega1 == omega2");
        w = linearize(setup).Omega1;
    }
    const Mat4& g = gamma.matrix();
    const double m = setup.m1;
    const double lhs = g(0, 0) + m * m * w * w * g(2, 2);
    return make_report(BoundId::Final, lhs, final_bound_rhs(setup), detail::hash_of(g, {m, w, setup.d, setup.G}));
}

enum class Allocation { PositionOnly, MomentumOnly, Mixed };

inline std::string to_string(Allocation a) {
    switch (a) {
    case Allocation::PositionOnly: return "position-only";
    case Allocation::MomentumOnly: return "momentum-only";
    case Allocation::Mixed: return "mixed";
    }
    return "unknown";
}

/// Symmetric diffusion matrix saturating the final bound.
///
/// - PositionOnly: diag(g, g, 0, 0), g = G m^2 / (hbar d^3).
/// - MomentumOnly: diag(0, 0, g/(m w)^2, g/(m w)^2).
/// - Mixed: equal split gamma11 = m^2 w^2 gamma33 = g/2 with
///   gamma14 = gamma23 = -sqrt(gamma11 gamma33). In dimensionless form at
///   Omega = w this also saturates strongest_bound; the pure allocations
///   satisfy only the weak bound.
inline DiffusionMatrix minimal_diffusion(const PhysicalSetup& setup, Allocation mode, std::optional<double> omega = {}) {
    setup.validate();
    detail::require_equal_masses(setup.m1, setup.m2);
    const double g = final_bound_rhs(setup);
    const double m = setup.m1;
    Mat4 gamma = Mat4::Zero();
    if (mode == Allocation::PositionOnly) {
        gamma(0, 0) = gamma(1, 1) = g;
        return DiffusionMatrix(gamma, Units::SI);
    }
    if (!omega || !(*omega > 0.0)) throw DomainError("momentum-only and mixed allocations need a positive frequency");
    const double mw = m * *omega;
    if (mode == Allocation::MomentumOnly) {
        gamma(2, 2) = gamma(3, 3) = g / (mw * mw);
        return DiffusionMatrix(gamma, Units::SI);
    }
    const double gx = 0.5 * g;
    const double gp = 0.5 * g / (mw * mw);
    const double c = -std::sqrt(gx * gp);
    gamma(0, 0) = gamma(1, 1) = gx;
    gamma(2, 2) = gamma(3, 3) = gp;
    gamma(0, 3) = gamma(3, 0) = c;
    gamma(1, 2) = gamma(2, 1) = c;
    return DiffusionMatrix(gamma, Units::SI);
}

/// Center-of-mass diffusion coefficient sum_ij Gamma_ij over the position
/// block of an N-body diffusion matrix ordered (x_1..x_N, p_1..p_N).
/// For PSD input 0 <= gamma_CM <= N Tr[Gamma_pos] (= 2 Tr for N = 2).
inline double com_reduction(const Eigen::MatrixXd& gamma_n, std::span<const double> masses) {
    if (gamma_n.rows() != gamma_n.cols() || gamma_n.rows() % 2 != 0 || gamma_n.rows() == 0)
        throw DomainError("com_reduction expects a square 2N x 2N matrix");
    const Eigen::Index n = gamma_n.rows() / 2;
    if (static_cast<Eigen::Index>(masses.size()) != n) throw DomainError("com_reduction: need one mass per particle");
    for (double m : masses)
        if (!(m > 0.0)) throw DomainError("com_reduction: masses must be positive");
    const Eigen::MatrixXd pos = gamma_n.topLeftCorner(n, n);
    const double scale = pos.cwiseAbs().maxCoeff();
    if (scale > 0.0 && symmetry_defect(pos) > 1e-12 * scale) throw PSDError("position block not symmetric");
    if (!is_psd(pos, 1e-10)) throw PSDError("position block not positive semidefinite");
    const double gamma_cm = pos.sum();
    const double upper = static_cast<double>(n) * pos.trace();
    const double tol = 1e-10 * std::max(scale, 1e-300) * static_cast<double>(n * n);
    if (gamma_cm < -tol || gamma_cm > upper + tol) throw PSDError("center-of-mass coefficient outside [0, N Tr]");
    return std::clamp(gamma_cm, 0.0, upper);
}

} // namespace gravdiff
