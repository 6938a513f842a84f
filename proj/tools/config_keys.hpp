#pragma once

// Config keys read by each subcommand. The --help footer is generated from
// these tables; keys mirror the symbols of the model.

#include <string>
#include <vector>

namespace gravdiff::cli {

struct KeyDoc {
    const char* key;
    const char* text;
};

inline const std::vector<KeyDoc>& setup_keys() {
    static const std::vector<KeyDoc> k = {
        {"m1_kg", "mass m1 [kg] (required)"},
        {"m2_kg", "mass m2 [kg] (required)"},
        {"omega1_rad_s", "bare trap frequency omega1 [rad/s] (required)"},
        {"omega2_rad_s", "bare trap frequency omega2 [rad/s] (required)"},
        {"d_m", "equilibrium separation d [m] (required)"},
        {"G", "gravitational constant [m^3/kg/s^2] (default CODATA)"},
        {"hbar", "reduced Planck constant [J s] (default CODATA)"},
        {"kB", "Boltzmann constant [J/K] (default CODATA)"},
        {"T_K", "bath temperature T [K] (default 0)"},
        {"eta_per_s", "momentum damping rate eta [1/s] (default 0)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& diffusion_keys() {
    static const std::vector<KeyDoc> k = {
        {"allocation", "mixed | position-only | momentum-only | zero | explicit (default mixed)"},
        {"gamma_scale", "factor applied to the diffusion matrix (default 1)"},
        {"gamma_omega_rad_s", "frequency w of the mixed / momentum-only allocation (default Omega1)"},
        {"gamma_IJ", "explicit SI entries, IJ in 11 12 13 14 22 23 24 33 34 44 (default 0)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& feasibility_keys() {
    static const std::vector<KeyDoc> k = {
        {"Omega_rad_s", "renormalized frequency Omega [rad/s] (required)"},
        {"rho_kg_m3", "density rho [kg/m^3] (required)"},
        {"R_m", "sphere radius R [m] (required)"},
        {"beta", "d / 2R, >= 1 (required)"},
        {"T_K", "temperature T [K] (required)"},
        {"Q", "mechanical quality factor (required)"},
        {"N", "detector noise [quanta] (required)"},
        {"r", "resolvable fraction of thermal noise (required)"},
        {"G", "gravitational constant (default CODATA)"},
        {"hbar", "reduced Planck constant (default CODATA)"},
        {"kB", "Boltzmann constant (default CODATA)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& bound_keys() {
    static const std::vector<KeyDoc> k = {
        {"dimensional_form", "consistent | paper_literal (default consistent; --paper-literal)"},
        {"final_route", "symmetric | frequency_independent (default symmetric)"},
        {"final_omega_rad_s", "frequency for the frequency_independent route (default Omega1)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& evolve_keys() {
    static const std::vector<KeyDoc> k = {
        {"t_end_s", "evolution time [s] (default 3 periods of Omega1)"},
        {"dt_s", "RK4 step [s] (default 1% of the shortest period)"},
        {"record_stride", "keep every n-th step (default 10)"},
        {"initial", "ground | thermal | squeezed (default ground)"},
        {"n_th1", "thermal occupation of mode 1 (initial = thermal)"},
        {"n_th2", "thermal occupation of mode 2 (initial = thermal)"},
        {"squeeze_r1", "squeezing parameter of mode 1 (initial = squeezed)"},
        {"squeeze_r2", "squeezing parameter of mode 2 (initial = squeezed)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& spectrum_keys() {
    static const std::vector<KeyDoc> k = {
        {"model", "fixed_source | symmetric_pair (default fixed_source)"},
        {"kernel", "printed | symmetrized thermal kernel (default printed)"},
        {"zero_frequency", "substitute | reject (default substitute)"},
        {"grid_points", "number of frequencies (default 512; --grid)"},
        {"grid_min_rad_s", "lowest frequency (default 0.5 x resonance)"},
        {"grid_max_rad_s", "highest frequency (default 1.5 x resonance)"},
        {"grid_log", "logarithmic spacing (default false)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& simulate_keys() {
    static const std::vector<KeyDoc> k = {
        {"seed", "master seed (--seed; entropy when absent, recorded)"},
        {"n_traj", "number of trajectories (default 64; --traj)"},
        {"dt_s", "integration step [s] (default the stability limit)"},
        {"duration_s", "simulated time per trajectory [s] (default 100 periods)"},
        {"record_stride", "keep every n-th step (default 1)"},
        {"initial", "rest | stationary (default rest)"},
        {"x0_m", "initial displacement for initial = rest (default 0)"},
        {"p0_kg_m_s", "initial momentum for initial = rest (default 0)"},
        {"retain_static_force", "keep the constant -K d force (default false)"},
        {"welch_segment", "Welch segment length in samples, 0 disables (default 0)"},
        {"welch_overlap", "Welch overlap fraction (default 0.5)"},
        {"write_trajectories", "write trajectories.bin (default false)"},
    };
    return k;
}

inline const std::vector<KeyDoc>& reheat_keys() {
    static const std::vector<KeyDoc> k = {
        {"seed", "master seed (--seed; entropy when absent, recorded)"},
        {"n_cycles", "number of prepare / evolve / measure cycles (default 1000)"},
        {"cycle_time_s", "dark evolution time per cycle [s] (required)"},
        {"detector_noise_N", "readout noise [quanta] (default 1)"},
        {"dt_s", "integration step [s] (default min(stability limit, cycle_time/100))"},
    };
    return k;
}

inline const std::vector<KeyDoc>& sweep_keys() {
    static const std::vector<KeyDoc> k = {
        {"sweep_key", "feasibility key to vary (required)"},
        {"sweep_min", "first value (required)"},
        {"sweep_max", "last value (required)"},
        {"sweep_points", "number of points (default 11)"},
        {"sweep_log", "logarithmic spacing (default false)"},
    };
    return k;
}

inline std::string format_keys(const std::string& title, const std::vector<KeyDoc>& keys) {
    std::string out = title + ":\n";
    for (const auto& k : keys) {
        std::string line = "  ";
        line += k.key;
        if (line.size() < 24) line.resize(24, ' ');
        else line += ' ';
        out += line + k.text + "\n";
    }
    return out;
}

} // namespace gravdiff::cli
