#pragma once

// Physical parameters of two gravitationally coupled, harmonically trapped
// masses, the linearized (quadratic) Hamiltonian, and the diffusion matrix
// of the double-commutator Lindbladian
//
//   d rho/dt = -i/hbar [H, rho] - 1/2 sum_ij gamma_ij [c_i, [c_j, rho]]
//
// All matrices use the quadrature ordering c = (x1, x2, p1, p2) and the
// convention H = 1/2 c^T H c. SI units are the internal representation; the
// dimensionless form is an explicit converted view (to_dimensionless).

#include "gravdiff/constants.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/linalg.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

namespace gravdiff {

enum class Units { SI, Dimensionless };

/// Raw experimental dials. Natural trap frequencies omega_i are *before*
/// the gravitational renormalization.
struct PhysicalSetup {
    double m1 = 1.0;      // kg
    double m2 = 1.0;      // kg
    double omega1 = 1.0;  // rad/s
    double omega2 = 1.0;  // rad/s
    double d = 1.0;       // m, equilibrium separation
    double G = codata::G;
    double hbar = codata::hbar;
    double kB = codata::kB;
    double T = 0.0;       // K
    double eta = 0.0;     // 1/s, momentum damping rate

    /// Throws StabilityError / DomainError when the invariants fail.
    void validate() const {
        auto require_positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
        };
        require_positive(m1, "m1");
        require_positive(m2, "m2");
        require_positive(omega1, "omega1");
        require_positive(omega2, "omega2");
        require_positive(d, "d");
        require_positive(hbar, "hbar");
        require_positive(kB, "kB");
        if (!(G >= 0.0)) throw DomainError("G must be non-negative");
        if (!(T >= 0.0)) throw DomainError("T must be non-negative");
        if (!(eta >= 0.0)) throw DomainError("eta must be non-negative");
    }

    double reduced_coupling() const { return 2.0 * G * m1 * m2 / (d * d * d); }
};

/// Result of linearizing the Newtonian interaction to second order.
struct LinearizedSystem {
    double Omega1 = 0.0;  // rad/s, renormalized
    double Omega2 = 0.0;
    double K = 0.0;       // N/m, bilinear coupling K x1 x2
    double m1 = 0.0;
    double m2 = 0.0;
    double hbar = codata::hbar;
    Mat4 H = Mat4::Zero();      // H = 1/2 c^T H c, SI
    Mat4 J = symplectic_form();
    /// Offsets absorbing the constant force -K d/2: x1 = q1 - a1, x2 = q2 + a2.
    std::array<double, 2> equilibrium_shift{0.0, 0.0};
};

/// Builds the SI quadratic-form matrix from the reduced parameters.
inline Mat4 quadratic_hamiltonian(double Omega1, double Omega2, double K, double m1, double m2) {
    Mat4 h = Mat4::Zero();
    h(0, 0) = m1 * Omega1 * Omega1;
    h(1, 1) = m2 * Omega2 * Omega2;
    h(0, 1) = h(1, 0) = K;
    h(2, 2) = 1.0 / m1;
    h(3, 3) = 1.0 / m2;
    return h;
}

inline LinearizedSystem linearize(const PhysicalSetup& s) {
    s.validate();
    const double d3 = s.d * s.d * s.d;
    const double Omega1_sq = s.omega1 * s.omega1 - 2.0 * s.G * s.m2 / d3;
    const double Omega2_sq = s.omega2 * s.omega2 - 2.0 * s.G * s.m1 / d3;
    if (Omega1_sq <= 0.0 || Omega2_sq <= 0.0) {
        std::ostringstream msg;
        msg << "renormalized frequency not real: ";
        if (Omega1_sq <= 0.0) msg << "Omega1^2 = " << Omega1_sq << " (omega1 = " << s.omega1 << ") ";
        if (Omega2_sq <= 0.0) msg << "Omega2^2 = " << Omega2_sq << " (omega2 = " << s.omega2 << ")";
        throw StabilityError(msg.str());
    }

    LinearizedSystem sys;
    sys.Omega1 = std::sqrt(Omega1_sq);
    sys.Omega2 = std::sqrt(Omega2_sq);
    sys.K = s.reduced_coupling();
    sys.m1 = s.m1;
    sys.m2 = s.m2;
    sys.hbar = s.hbar;
    sys.H = quadratic_hamiltonian(sys.Omega1, sys.Omega2, sys.K, s.m1, s.m2);

    // m1 Omega1^2 a1 - K a2 = K d/2 and m2 Omega2^2 a2 - K a1 = K d/2.
    Mat2 lhs;
    lhs << s.m1 * Omega1_sq, -sys.K, -sys.K, s.m2 * Omega2_sq;
    const Vec2 rhs = Vec2::Constant(0.5 * sys.K * s.d);
    const Vec2 a = lhs.partialPivLu().solve(rhs);
    sys.equilibrium_shift = {a(0), a(1)};
    return sys;
}

/// Real symmetric positive-semidefinite 4x4 diffusion matrix.
class DiffusionMatrix {
public:
    DiffusionMatrix() = default;

    /// Validates symmetry (1e-12 relative) and PSD (eigenvalue >= -1e-10 |gamma|).
    explicit DiffusionMatrix(const Mat4& gamma, Units units = Units::SI) : units_(units) {
        const double scale = gamma.cwiseAbs().maxCoeff();
        if (scale > 0.0 && symmetry_defect(gamma) > 1e-12 * scale) throw PSDError("diffusion matrix is not symmetric");
        gamma_ = symmetrized(gamma);
        if (!is_psd(gamma_, 1e-10)) {
            std::ostringstream msg;
            msg << "diffusion matrix is not positive semidefinite (min eigenvalue "
                << symmetric_eigenvalues(gamma_).minCoeff() << ")";
            throw PSDError(msg.str());
        }
    }

    static DiffusionMatrix zero(Units units = Units::SI) { return DiffusionMatrix(Mat4::Zero(), units); }

    const Mat4& matrix() const { return gamma_; }
    double operator()(int i, int j) const { return gamma_(i, j); }
    Units units() const { return units_; }
    double trace() const { return gamma_.trace(); }

    DiffusionMatrix scaled(double factor) const {
        if (factor < 0.0) throw DomainError("diffusion matrix scale must be non-negative");
        return DiffusionMatrix(factor * gamma_, units_);
    }

private:
    Mat4 gamma_ = Mat4::Zero();
    Units units_ = Units::SI;
};

/// First and (symmetrized) second moments, V_ij = <{dc_i, dc_j}>/2.
struct GaussianState {
    Vec4 mean = Vec4::Zero();
    Mat4 V = 0.5 * Mat4::Identity();
    Units units = Units::Dimensionless;

    /// Product of the two uncoupled oscillator ground states in dimensionless units.
    static GaussianState ground_dimensionless() { return GaussianState{}; }
};

/// Dimensionless view of a linearized system: x_bar = sqrt(m Omega/hbar) x,
/// p_bar = p / sqrt(m hbar Omega). Time stays in seconds.
struct DimensionlessModel {
    Mat4 H = Mat4::Zero();        // H_bar = 1/2 c_bar^T H c_bar (units of 1/s)
    DiffusionMatrix gamma_bar{Mat4::Zero(), Units::Dimensionless};
    double Omega1 = 0.0;
    double Omega2 = 0.0;
    double coupling = 0.0;        // K / sqrt(m1 m2 Omega1 Omega2)
    Vec4 scale = Vec4::Ones();    // c = scale .* c_bar
};

/// Quadrature scales S with c = S c_bar.
inline Vec4 quadrature_scales(const LinearizedSystem& sys) {
    return Vec4(std::sqrt(sys.hbar / (sys.m1 * sys.Omega1)), std::sqrt(sys.hbar / (sys.m2 * sys.Omega2)),
                std::sqrt(sys.m1 * sys.hbar * sys.Omega1), std::sqrt(sys.m2 * sys.hbar * sys.Omega2));
}

inline Mat4 dimensionless_hamiltonian(double Omega1, double Omega2, double coupling) {
    Mat4 h = Vec4(Omega1, Omega2, Omega1, Omega2).asDiagonal();
    h(0, 1) = h(1, 0) = coupling;
    return h;
}

inline DimensionlessModel to_dimensionless(const LinearizedSystem& sys, const DiffusionMatrix& gamma) {
    if (!(sys.Omega1 > 0.0) || !(sys.Omega2 > 0.0)) throw DomainError("to_dimensionless requires Omega_i > 0");
    if (gamma.units() != Units::SI) throw DomainError("to_dimensionless expects an SI diffusion matrix");
    DimensionlessModel model;
    model.Omega1 = sys.Omega1;
    model.Omega2 = sys.Omega2;
    model.coupling = sys.K / std::sqrt(sys.m1 * sys.m2 * sys.Omega1 * sys.Omega2);
    model.H = dimensionless_hamiltonian(sys.Omega1, sys.Omega2, model.coupling);
    model.scale = quadrature_scales(sys);
    // gamma_bar_ij = S_i S_j gamma_ij
    const Mat4 g = model.scale.asDiagonal() * gamma.matrix() * model.scale.asDiagonal();
    model.gamma_bar = DiffusionMatrix(g, Units::Dimensionless);
    return model;
}

inline DiffusionMatrix from_dimensionless(const DimensionlessModel& model) {
    const Vec4 inv = model.scale.cwiseInverse();
    return DiffusionMatrix(inv.asDiagonal() * model.gamma_bar.matrix() * inv.asDiagonal(), Units::SI);
}

inline GaussianState to_dimensionless(const GaussianState& state, const LinearizedSystem& sys) {
    if (state.units == Units::Dimensionless) return state;
    const Vec4 inv = quadrature_scales(sys).cwiseInverse();
    return GaussianState{inv.cwiseProduct(state.mean), inv.asDiagonal() * state.V * inv.asDiagonal(),
                         Units::Dimensionless};
}

inline GaussianState to_si(const GaussianState& state, const LinearizedSystem& sys) {
    if (state.units == Units::SI) return state;
    const Vec4 s = quadrature_scales(sys);
    return GaussianState{s.cwiseProduct(state.mean), s.asDiagonal() * state.V * s.asDiagonal(), Units::SI};
}

/// Drift generator A = J H of d<c>/dt = A <c> (SI).
inline Mat4 drift_matrix(const LinearizedSystem& sys) { return sys.J * sys.H; }

/// Drift generator in dimensionless quadratures.
inline Mat4 drift_matrix(const DimensionlessModel& model) { return symplectic_form() * model.H; }

/// <H> = 1/2 (Tr[H V] + mean^T H mean) for a Gaussian state in SI units.
inline double hamiltonian_expectation(const LinearizedSystem& sys, const GaussianState& state) {
    if (state.units != Units::SI) throw DomainError("hamiltonian_expectation expects an SI state");
    return 0.5 * ((sys.H * state.V).trace() + state.mean.dot(sys.H * state.mean));
}

/// Covariance minimum eigenvalue of V + (i s / 2) J, with s = hbar in SI, 1 otherwise.
inline double uncertainty_min_eigenvalue(const GaussianState& state, double hbar = codata::hbar) {
    const double s = state.units == Units::SI ? hbar : 1.0;
    return min_eigenvalue_hermitian(state.V, symplectic_form(), 0.5 * s);
}

} // namespace gravdiff
