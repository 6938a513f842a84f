#pragma once

// Time-domain Monte Carlo of the monitored oscillator with its partner held
// fixed as a source:
//
//   dx = p/m dt + hbar dW3
//   dp = (-m Omega^2 x - K (d + x) - eta p) dt - hbar dW1 + dXi
//
// E[dW_i dW_j] = gamma_ij dt, E[dXi^2] = 2 eta m kB T dt (classical white
// thermal force, independent of the W's).
//
// Integrator: exponential Euler-Maruyama. The linear drift is propagated
// exactly, y_{n+1} = Phi(h) y_n + u(h) + Phi(h/2) dN_n, with dN_n the noise
// increment. Plain Euler-Maruyama gains energy at a rate ~Omega^2 h per unit
// time, which swamps the damping whenever Omega^2 h > eta.

#include "gravdiff/core_model.hpp"
#include "gravdiff/errors.hpp"
#include "gravdiff/linalg.hpp"
#include "gravdiff/parallel.hpp"
#include "gravdiff/rng.hpp"
#include "gravdiff/welch.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

namespace gravdiff {

struct NoiseModel {
    DiffusionMatrix gamma;               // SI
    double thermal_intensity = 0.0;      // 2 eta m kB T [N^2 s]
    std::uint64_t seed = 0;
    Mat4 L = Mat4::Zero();               // L L^T = gamma

    NoiseModel() = default;

    NoiseModel(const DiffusionMatrix& g, double thermal, std::uint64_t master_seed)
        : gamma(g), thermal_intensity(thermal), seed(master_seed) {
        if (g.units() != Units::SI) throw DomainError("NoiseModel expects an SI diffusion matrix");
        if (!(thermal >= 0.0)) throw DomainError("thermal intensity must be non-negative");
        // Factor the correlation matrix: SI entries span many decades.
        const Vec4 dg = g.matrix().diagonal();
        Vec4 s = Vec4::Zero();
        for (int i = 0; i < 4; ++i) s(i) = dg(i) > 0.0 ? std::sqrt(dg(i)) : 0.0;
        Mat4 c = Mat4::Zero();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (s(i) > 0.0 && s(j) > 0.0) c(i, j) = g(i, j) / (s(i) * s(j));
        L = s.asDiagonal() * semidefinite_cholesky<4>(c);
        const double scale = std::max(g.matrix().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        if ((L * L.transpose() - g.matrix()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw PSDError("Cholesky factor does not reproduce gamma");
    }

    /// Thermal force intensity 2 eta m kB T from the setup (oscillator 1).
    static NoiseModel from_setup(const DiffusionMatrix& g, const PhysicalSetup& s, std::uint64_t master_seed) {
        return NoiseModel(g, 2.0 * s.eta * s.m1 * s.kB * s.T, master_seed);
    }
};

/// Linear SDE dy = (A y + b) dt + dN for y = (x, p), Cov(dN) = Q dt.
struct MonitoredOscillator {
    double m = 1.0;
    double k_eff = 1.0;     // m Omega^2 + K
    double eta = 0.0;
    double omega0 = 1.0;    // sqrt(k_eff / m)
    double hbar = codata::hbar;
    double static_force = 0.0;  // -K d
    Mat2 A = Mat2::Zero();
    Mat2 Q = Mat2::Zero();
};

inline MonitoredOscillator monitored_oscillator(const PhysicalSetup& setup, const LinearizedSystem& sys,
                                                const NoiseModel& noise) {
    MonitoredOscillator o;
    o.m = sys.m1;
    o.k_eff = sys.m1 * sys.Omega1 * sys.Omega1 + sys.K;
    o.eta = setup.eta;
    o.omega0 = std::sqrt(o.k_eff / o.m);
    o.hbar = setup.hbar;
    o.static_force = -sys.K * setup.d;
    o.A << 0.0, 1.0 / o.m, -o.k_eff, -o.eta;
    const double h2 = setup.hbar * setup.hbar;
    const Mat4& g = noise.gamma.matrix();
    o.Q << h2 * g(2, 2), -h2 * g(0, 2), -h2 * g(0, 2), h2 * g(0, 0) + noise.thermal_intensity;
    return o;
}

/// Largest admissible step: 0.01 min(2 pi / omega0, 1 / eta).
inline double max_langevin_step(const MonitoredOscillator& o) {
    double lim = 2.0 * pi / o.omega0;
    if (o.eta > 0.0) lim = std::min(lim, 1.0 / o.eta);
    return 0.01 * lim;
}

inline void check_langevin_step(const MonitoredOscillator& o, double dt) {
    if (!(dt > 0.0) || dt > max_langevin_step(o) * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " violates dt <= 0.01 min(2pi/omega0, 1/eta) = " << max_langevin_step(o);
        throw StabilityError(msg.str());
    }
}

/// Exact one-step propagator of the deterministic part.
struct Propagator {
    Mat2 phi = Mat2::Identity();
    Vec2 u = Vec2::Zero();
    Mat2 phi_half = Mat2::Identity();
};

inline Propagator make_propagator(const MonitoredOscillator& o, double h, bool retain_static_force) {
    Eigen::Matrix3d aug = Eigen::Matrix3d::Zero();
    aug.topLeftCorner<2, 2>() = o.A * h;
    if (retain_static_force) aug(1, 2) = o.static_force * h;
    const Eigen::Matrix3d e = aug.exp();
    Propagator p;
    p.phi = e.topLeftCorner<2, 2>();
    p.u = e.topRightCorner<2, 1>();
    p.phi_half = (o.A * (0.5 * h)).exp();
    return p;
}

/// Stationary covariance: A S + S A^T + Q = 0. Requires eta > 0.
inline Mat2 stationary_covariance(const MonitoredOscillator& o) {
    if (!(o.eta > 0.0)) throw DomainError("no stationary state without damping");
    // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S)
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    const Mat2 I = Mat2::Identity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            k.block<2, 2>(2 * i, 2 * j) += I(i, j) * o.A;
            k.block<2, 2>(2 * i, 2 * j) += o.A(i, j) * I;
        }
    const Eigen::Vector4d q(o.Q(0, 0), o.Q(1, 0), o.Q(0, 1), o.Q(1, 1));
    const Eigen::Vector4d s = k.partialPivLu().solve(-q);
    Mat2 out;
    out << s(0), s(2), s(1), s(3);
    return symmetrized(out);
}

/// Mean and covariance of (x, p) under the drift-augmented moment equations
///   d mu/dt = A mu + b,   d S/dt = A S + S A^T + Q
/// integrated by RK4. This is the oracle for ensemble moments.
struct OscillatorMoments {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();
};

inline OscillatorMoments augmented_moments(const MonitoredOscillator& o, const OscillatorMoments& start, double t,
                                           std::size_t steps, bool retain_static_force = false) {
    if (steps == 0) steps = 1;
    const double h = t / static_cast<double>(steps);
    const Vec2 b(0.0, retain_static_force ? o.static_force : 0.0);
    auto f = [&](const OscillatorMoments& y) {
        return OscillatorMoments{o.A * y.mean + b, o.A * y.cov + y.cov * o.A.transpose() + o.Q};
    };
    auto axpy = [](const OscillatorMoments& y, double a, const OscillatorMoments& k) {
        return OscillatorMoments{y.mean + a * k.mean, y.cov + a * k.cov};
    };
    OscillatorMoments y = start;
    for (std::size_t i = 0; i < steps; ++i) {
        const auto k1 = f(y);
        const auto k2 = f(axpy(y, 0.5 * h, k1));
        const auto k3 = f(axpy(y, 0.5 * h, k2));
        const auto k4 = f(axpy(y, h, k3));
        y.mean += (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean);
        y.cov += (h / 6.0) * (k1.cov + 2.0 * k2.cov + 2.0 * k3.cov + k4.cov);
    }
    return y;
}

enum class InitialState { Given, Stationary };

struct SimulateOptions {
    std::size_t record_stride = 1;
    unsigned threads = 1;
    bool retain_static_force = false;
    InitialState initial = InitialState::Given;
    double x0 = 0.0;
    double p0 = 0.0;
};

struct TrajectoryEnsemble {
    std::size_t n_traj = 0;
    double dt = 0.0;
    double record_dt = 0.0;
    double duration = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> p;

    std::size_t samples() const { return x.empty() ? 0 : x.front().size(); }
};

namespace detail {

/// Draws one increment (dx, dp) with covariance Q h.
struct NoiseDraw {
    Mat4 L;
    double hbar;
    double thermal_sd;  // sqrt(thermal_intensity)

    Vec2 operator()(NormalStream& rng, double sqrt_h) const {
        Vec4 z;
        for (int i = 0; i < 4; ++i) z(i) = rng();
        const Vec4 dw = (L * z) * sqrt_h;
        const double xi = thermal_sd * sqrt_h * rng();
        return Vec2(hbar * dw(2), -hbar * dw(0) + xi);
    }
};

struct TrajectoryData {
    std::vector<double> x;
    std::vector<double> p;
};

} // namespace detail

inline TrajectoryEnsemble simulate(const PhysicalSetup& setup, const LinearizedSystem& sys, const NoiseModel& noise,
                                   std::size_t n_traj, double dt, double duration, const SimulateOptions& opt = {}) {
    if (n_traj == 0) throw SeedError("empty ensemble: n_traj must be positive");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("duration must be positive");
    const MonitoredOscillator osc = monitored_oscillator(setup, sys, noise);
    check_langevin_step(osc, dt);

    const auto n_steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    const double h = duration / static_cast<double>(n_steps);
    const std::size_t stride = std::max<std::size_t>(opt.record_stride, 1);
    const std::size_t n_rec = n_steps / stride + 1;
    const Propagator prop = make_propagator(osc, h, opt.retain_static_force);
    const detail::NoiseDraw draw{noise.L, setup.hbar, std::sqrt(noise.thermal_intensity)};
    const double sqrt_h = std::sqrt(h);
    const Vec2 offset(opt.retain_static_force ? osc.static_force / osc.k_eff : 0.0, 0.0);

    Mat2 chol_stat = Mat2::Zero();
    if (opt.initial == InitialState::Stationary) chol_stat = semidefinite_cholesky<2>(stationary_covariance(osc));

    TrajectoryEnsemble ens;
    ens.n_traj = n_traj;
    ens.dt = h;
    ens.record_dt = h * static_cast<double>(stride);
    ens.duration = duration;
    ens.master_seed = noise.seed;
    ens.seeds.resize(n_traj);
    for (std::size_t i = 0; i < n_traj; ++i) ens.seeds[i] = derive_seed(noise.seed, i);

    auto run = [&](std::size_t i) {
        NormalStream rng(ens.seeds[i]);
        Vec2 y(opt.x0, opt.p0);
        if (opt.initial == InitialState::Stationary) {
            const double z0 = rng();
            const double z1 = rng();
            y = offset + chol_stat * Vec2(z0, z1);
        }
        detail::TrajectoryData out;
        out.x.reserve(n_rec);
        out.p.reserve(n_rec);
        out.x.push_back(y(0));
        out.p.push_back(y(1));
        for (std::size_t k = 1; k <= n_steps; ++k) {
            y = prop.phi * y + prop.u + prop.phi_half * draw(rng, sqrt_h);
            if (k % stride == 0) {
                out.x.push_back(y(0));
                out.p.push_back(y(1));
            }
        }
        return out;
    };
    auto data = parallel_map<detail::TrajectoryData>(n_traj, run, opt.threads);
    ens.x.reserve(n_traj);
    ens.p.reserve(n_traj);
    for (auto& d : data) {
        ens.x.push_back(std::move(d.x));
        ens.p.push_back(std::move(d.p));
    }
    return ens;
}

/// Ensemble mean and covariance of (x, p) at one recorded sample, with
/// standard errors of each entry.
struct EnsembleMoments {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();
    Vec2 mean_se = Vec2::Zero();
    Mat2 cov_se = Mat2::Zero();
};

inline EnsembleMoments ensemble_moments(const TrajectoryEnsemble& ens, std::size_t sample) {
    if (ens.n_traj < 2 || sample >= ens.samples()) throw DomainError("ensemble_moments: need >= 2 trajectories and a valid sample");
    const auto n = static_cast<double>(ens.n_traj);
    EnsembleMoments m;
    for (std::size_t i = 0; i < ens.n_traj; ++i) m.mean += Vec2(ens.x[i][sample], ens.p[i][sample]);
    m.mean /= n;
    Mat2 s2 = Mat2::Zero();
    for (std::size_t i = 0; i < ens.n_traj; ++i) {
        const Vec2 d = Vec2(ens.x[i][sample], ens.p[i][sample]) - m.mean;
        const Mat2 o = d * d.transpose();
        m.cov += o;
        s2 += o.cwiseProduct(o);
    }
    m.cov /= n - 1.0;
    // var of the products d_a d_b, divided by n
    const Mat2 second = s2 / n;
    const Mat2 first = m.cov * (n - 1.0) / n;
    m.cov_se = ((second - first.cwiseProduct(first)).cwiseMax(0.0) / n).cwiseSqrt();
    m.mean_se = (m.cov.diagonal() / n).cwiseSqrt();
    return m;
}

/// Welch estimate of the position spectrum of the monitored oscillator.
inline WelchEstimate welch_spectrum(const TrajectoryEnsemble& ens, const WelchOptions& opt) {
    return welch_spectrum(std::span<const std::vector<double>>(ens.x), ens.record_dt, opt);
}

/// Phonon heating rate injected into an oscillator at rest, in units of hbar omega0:
///   Gamma = [hbar^2 g11 / 2m + m omega0^2 hbar^2 g33 / 2 + eta kB T] / (hbar omega0)
inline double expected_heating_rate(const MonitoredOscillator& o) {
    const double rate = 0.5 * o.Q(1, 1) / o.m + 0.5 * o.k_eff * o.Q(0, 0);
    return rate / (o.hbar * o.omega0);
}

struct ReheatResult {
    double Gamma_hat = 0.0;        // mean measured occupation / cycle_time [1/s]
    double rel_err = 0.0;          // standard error of Gamma_hat / Gamma_hat
    double expected_Gamma = 0.0;   // injected rate
    double total_time = 0.0;       // n_cycles * cycle_time
    std::size_t n_cycles = 0;
    std::vector<double> occupations;  // measured, per cycle
};

/// Repeated reheating cycles. Each cycle resets the oscillator to rest (ideal
/// ground-state preparation), evolves it in the dark for cycle_time, and reads
/// its occupation E / (hbar omega0) with additive Gaussian detector noise of
/// standard deviation N quanta.
inline ReheatResult reheating_run(const PhysicalSetup& setup, const LinearizedSystem& sys, const NoiseModel& noise,
                                  std::size_t n_cycles, double cycle_time, double detector_noise, double dt,
                                  unsigned threads = 1) {
    if (n_cycles == 0) throw SeedError("reheating_run needs at least one cycle");
    if (!(cycle_time > 0.0)) throw ProtocolError("cycle_time must be positive");
    if (!(detector_noise >= 0.0)) throw DomainError("detector noise must be non-negative");
    const MonitoredOscillator osc = monitored_oscillator(setup, sys, noise);
    if (osc.eta > 0.0 && cycle_time >= 0.1 / osc.eta) {
        std::ostringstream msg;
        msg << "cycle_time " << cycle_time << " is not short against the relaxation time 1/eta = " << 1.0 / osc.eta
            << " (need < 0.1/eta)";
        throw ProtocolError(msg.str());
    }
    check_langevin_step(osc, dt);
    const auto n_steps = static_cast<std::size_t>(std::ceil(cycle_time / dt - 1e-9));
    const double h = cycle_time / static_cast<double>(n_steps);
    const Propagator prop = make_propagator(osc, h, false);
    const detail::NoiseDraw draw{noise.L, setup.hbar, std::sqrt(noise.thermal_intensity)};
    const double sqrt_h = std::sqrt(h);
    const double quantum = setup.hbar * osc.omega0;

    auto cycle = [&](std::size_t c) {
        NormalStream rng(derive_seed(noise.seed, c));
        Vec2 y = Vec2::Zero();
        for (std::size_t k = 0; k < n_steps; ++k) y = prop.phi * y + prop.phi_half * draw(rng, sqrt_h);
        const double energy = 0.5 * y(1) * y(1) / osc.m + 0.5 * osc.k_eff * y(0) * y(0);
        return energy / quantum + detector_noise * rng();
    };

    ReheatResult r;
    r.occupations = parallel_map<double>(n_cycles, cycle, threads);
    r.n_cycles = n_cycles;
    r.total_time = static_cast<double>(n_cycles) * cycle_time;
    r.expected_Gamma = expected_heating_rate(osc);
    double mean = 0.0;
    for (double v : r.occupations) mean += v;
    mean /= static_cast<double>(n_cycles);
    double var = 0.0;
    for (double v : r.occupations) var += (v - mean) * (v - mean);
    var = n_cycles > 1 ? var / static_cast<double>(n_cycles - 1) : 0.0;
    r.Gamma_hat = mean / cycle_time;
    const double se = std::sqrt(var / static_cast<double>(n_cycles)) / cycle_time;
    r.rel_err = r.Gamma_hat > 0.0 ? se / r.Gamma_hat : std::numeric_limits<double>::infinity();
    return r;
}

/// Time rescaling t -> t / s at fixed m, d, hbar, kB: frequencies and damping
/// scale by s, G by s^2, T by s. With the diffusion matrix mapped by
/// rescale_time(gamma, s), every dimensionless ratio is unchanged, rates
/// scale by s, and S'(s w) = S(w) / s^2.
inline PhysicalSetup rescale_time(PhysicalSetup s, double factor) {
    if (!(factor > 0.0)) throw DomainError("rescale factor must be positive");
    s.omega1 *= factor;
    s.omega2 *= factor;
    s.eta *= factor;
    s.G *= factor * factor;
    s.T *= factor;
    return s;
}

/// gamma_xx -> s^2 gamma_xx, gamma_xp -> s gamma_xp, gamma_pp unchanged.
inline DiffusionMatrix rescale_time(const DiffusionMatrix& g, double factor) {
    if (g.units() != Units::SI) throw DomainError("rescale_time expects an SI diffusion matrix");
    const Vec4 w(factor, factor, 1.0, 1.0);
    return DiffusionMatrix(w.asDiagonal() * g.matrix() * w.asDiagonal(), Units::SI);
}

} // namespace gravdiff
