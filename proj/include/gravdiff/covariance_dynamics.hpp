#pragma once

// Gaussian-state dynamics under the linear diffusive master equation in
// dimensionless quadratures:
//
//   dV/dt = J H V - V H J - J gamma_bar J,     d<c>/dt = J H <c>
//
// plus the uncertainty relation V + (i/2) J >= 0 and the PPT test
// V + (i/2) Lambda J Lambda >= 0 with Lambda = diag(1, 1, 1, -1).

#include "gravdiff/core_model.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/linalg.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace gravdiff {

/// Absolute eigenvalue tolerance in dimensionless units.
inline constexpr double kEigenTolerance = 1e-10;

struct EigenCheck {
    bool valid = false;
    double min_eig = 0.0;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<GaussianState> states;
    std::vector<double> ppt_min_eig;
    std::vector<double> unc_min_eig;

    std::size_t size() const { return times.size(); }
};

/// Minimum eigenvalue of V + (i/2) J for a dimensionless covariance.
inline double uncertainty_min_eig(const Mat4& v) { return min_eigenvalue_hermitian(v, symplectic_form(), 0.5); }

/// Minimum eigenvalue of V + (i/2) Lambda J Lambda. `mode` selects which
/// party is reflected; both choices give identical spectra.
inline double ppt_min_eig(const Mat4& v, int mode = 2) {
    const Mat4 lambda = mode == 1 ? partial_reflector_mode1() : partial_reflector();
    return min_eigenvalue_hermitian(v, lambda * symplectic_form() * lambda, 0.5);
}

inline EigenCheck uncertainty_valid(const GaussianState& state) {
    if (state.units != Units::Dimensionless) throw DomainError("uncertainty_valid expects dimensionless quadratures");
    const double e = uncertainty_min_eig(state.V);
    return {e >= -kEigenTolerance, e};
}

/// PPT test. A negative min_eig certifies entanglement; for one mode per
/// party the test is also sufficient for Gaussian states.
inline EigenCheck ppt_separable(const GaussianState& state) {
    if (state.units != Units::Dimensionless) throw DomainError("ppt_separable expects dimensionless quadratures");
    const double e = ppt_min_eig(state.V);
    return {e >= -kEigenTolerance, e};
}

/// Right-hand side of the covariance equation.
inline Mat4 covariance_rate(const Mat4& v, const DimensionlessModel& model) {
    const Mat4 j = symplectic_form();
    return j * model.H * v - v * model.H * j - j * model.gamma_bar.matrix() * j;
}

/// Largest admissible step: 1% of the shortest bare period.
inline double max_covariance_step(const DimensionlessModel& model) {
    return 0.01 * 2.0 * pi / std::max(model.Omega1, model.Omega2);
}

namespace detail {

struct MomentState {
    Vec4 mean;
    Mat4 V;
};

inline MomentState rk4_step(const MomentState& s, const DimensionlessModel& model, const Mat4& drift, double h) {
    auto f = [&](const MomentState& y) { return MomentState{drift * y.mean, covariance_rate(y.V, model)}; };
    auto axpy = [](const MomentState& y, double a, const MomentState& k) {
        return MomentState{y.mean + a * k.mean, y.V + a * k.V};
    };
    const MomentState k1 = f(s);
    const MomentState k2 = f(axpy(s, 0.5 * h, k1));
    const MomentState k3 = f(axpy(s, 0.5 * h, k2));
    const MomentState k4 = f(axpy(s, h, k3));
    MomentState out{s.mean + (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean),
                    s.V + (h / 6.0) * (k1.V + 2.0 * k2.V + 2.0 * k3.V + k4.V)};
    out.V = symmetrized(out.V);
    return out;
}

inline void check_inputs(const GaussianState& v0, const DimensionlessModel& model, double t_end, double dt) {
    if (v0.units != Units::Dimensionless) throw DomainError("evolution runs in dimensionless quadratures; convert first");
    if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
    if (dt > max_covariance_step(model) * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " exceeds 0.01 * 2pi / max(Omega) = " << max_covariance_step(model);
        throw StepSizeError(msg.str());
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and non-negative");
    const double scale = v0.V.cwiseAbs().maxCoeff();
    if (symmetry_defect(v0.V) > 1e-12 * std::max(scale, 1.0)) throw NonPhysicalInput("initial covariance not symmetric");
    const double e = uncertainty_min_eig(v0.V);
    if (e < -kEigenTolerance) {
        std::ostringstream msg;
        msg << "initial covariance violates V + (i/2) J >= 0 (min eigenvalue " << e << ")";
        throw NonPhysicalInput(msg.str());
    }
}

} // namespace detail

/// Fixed-step RK4 integration of mean and covariance. The step count is
/// ceil(t_end / dt); the effective step t_end / n never exceeds dt.
/// `record_stride` keeps every n-th step (the final time is always kept).
inline EvolutionResult evolve_covariance(const GaussianState& v0, const DimensionlessModel& model, double t_end,
                                         double dt, std::size_t record_stride = 1) {
    detail::check_inputs(v0, model, t_end, dt);
    if (record_stride == 0) record_stride = 1;
    const std::size_t n = t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double h = n == 0 ? 0.0 : t_end / static_cast<double>(n);
    const Mat4 drift = drift_matrix(model);

    EvolutionResult out;
    auto record = [&](double t, const detail::MomentState& s) {
        out.times.push_back(t);
        out.states.push_back(GaussianState{s.mean, s.V, Units::Dimensionless});
        out.ppt_min_eig.push_back(ppt_min_eig(s.V));
        out.unc_min_eig.push_back(uncertainty_min_eig(s.V));
    };

    detail::MomentState s{v0.mean, symmetrized(v0.V)};
    record(0.0, s);
    for (std::size_t k = 1; k <= n; ++k) {
        s = detail::rk4_step(s, model, drift, h);
        if (k % record_stride == 0 || k == n) record(static_cast<double>(k) * h, s);
    }
    return out;
}

/// First time the PPT minimum eigenvalue drops below -kEigenTolerance,
/// located by a step scan and bisection to dt/100 (at most 40 halvings).
inline std::optional<double> entanglement_onset(const GaussianState& v0, const DimensionlessModel& model, double t_max,
                                                double dt) {
    detail::check_inputs(v0, model, t_max, dt);
    const Mat4 drift = drift_matrix(model);
    detail::MomentState s{v0.mean, symmetrized(v0.V)};
    if (ppt_min_eig(s.V) < -kEigenTolerance) return 0.0;

    const std::size_t n = t_max == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    const double h = n == 0 ? 0.0 : t_max / static_cast<double>(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const detail::MomentState next = detail::rk4_step(s, model, drift, h);
        if (ppt_min_eig(next.V) < -kEigenTolerance) {
            const double t0 = static_cast<double>(k - 1) * h;
            double lo = 0.0;
            double hi = h;
            for (int it = 0; it < 40 && hi - lo > dt / 100.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                const detail::MomentState probe = detail::rk4_step(s, model, drift, mid);
                if (ppt_min_eig(probe.V) < -kEigenTolerance) hi = mid;
                else lo = mid;
            }
            return t0 + 0.5 * (lo + hi);
        }
        s = next;
    }
    return std::nullopt;
}

} // namespace gravdiff
