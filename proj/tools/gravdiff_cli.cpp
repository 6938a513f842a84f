// gravdiff: command-line front end.
//
// Exit codes: 0 ok, 2 configuration, 3 numerical / physical, 4 I/O.

#include "config_keys.hpp"

#include "gravdiff/gravdiff.hpp"
#include "gravdiff/io/config.hpp"
#include "gravdiff/io/csv.hpp"
#include "gravdiff/io/json_io.hpp"
#include "gravdiff/io/manifest.hpp"
#include "gravdiff/io/trajectory_io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gravdiff;
using gravdiff::io::Config;
using gravdiff::io::format_double;
using gravdiff::io::json;

namespace {

struct Context {
    Config cfg;
    fs::path out_dir;
    unsigned threads = 1;
    io::RunManifest manifest;
    bool quiet = false;

    std::string output(const std::string& name) {
        manifest.outputs.push_back({name, ""});
        return (out_dir / name).string();
    }
};

/// Built-in torsion-pendulum parameters as defaults for the keys the command reads.
void preset_table1(Config& c, bool feasibility_keys) {
    const FeasibilityParams p = table1_params();
    if (feasibility_keys) {
        c.set_default("Omega_rad_s", format_double(p.Omega));
        c.set_default("rho_kg_m3", format_double(p.rho));
        c.set_default("R_m", format_double(p.R));
        c.set_default("beta", format_double(p.beta));
        c.set_default("T_K", format_double(p.T));
        c.set_default("Q", format_double(p.Q));
        c.set_default("N", format_double(p.N));
        c.set_default("r", format_double(p.r));
        return;
    }
    const PhysicalSetup s = table1_setup(p);
    c.set_default("m1_kg", format_double(s.m1));
    c.set_default("m2_kg", format_double(s.m2));
    c.set_default("omega1_rad_s", format_double(s.omega1));
    c.set_default("omega2_rad_s", format_double(s.omega2));
    c.set_default("d_m", format_double(s.d));
    c.set_default("T_K", format_double(s.T));
    c.set_default("eta_per_s", format_double(s.eta));
}

PhysicalSetup setup_from(const Config& c) {
    PhysicalSetup s;
    s.m1 = c.get_double("m1_kg");
    s.m2 = c.get_double("m2_kg");
    s.omega1 = c.get_double("omega1_rad_s");
    s.omega2 = c.get_double("omega2_rad_s");
    s.d = c.get_double("d_m");
    s.G = c.get_double("G", codata::G);
    s.hbar = c.get_double("hbar", codata::hbar);
    s.kB = c.get_double("kB", codata::kB);
    s.T = c.get_double("T_K", 0.0);
    s.eta = c.get_double("eta_per_s", 0.0);
    s.validate();
    return s;
}

FeasibilityParams feasibility_from(const Config& c) {
    FeasibilityParams p;
    p.Omega = c.get_double("Omega_rad_s");
    p.rho = c.get_double("rho_kg_m3");
    p.R = c.get_double("R_m");
    p.beta = c.get_double("beta");
    p.T = c.get_double("T_K");
    p.Q = c.get_double("Q");
    p.N = c.get_double("N");
    p.r = c.get_double("r");
    p.G = c.get_double("G", codata::G);
    p.hbar = c.get_double("hbar", codata::hbar);
    p.kB = c.get_double("kB", codata::kB);
    p.validate();
    return p;
}

DiffusionMatrix gamma_from(const Config& c, const PhysicalSetup& s, const LinearizedSystem& sys) {
    const std::string alloc = c.get_string("allocation", "mixed");
    const double scale = c.get_double("gamma_scale", 1.0);
    if (scale < 0.0) throw ConfigError("gamma_scale must be non-negative");
    DiffusionMatrix g;
    if (alloc == "explicit") {
        Mat4 m = Mat4::Zero();
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                const std::string key = "gamma_" + std::to_string(i + 1) + std::to_string(j + 1);
                m(i, j) = m(j, i) = c.get_double(key, 0.0);
            }
        g = DiffusionMatrix(m, Units::SI);
    } else if (alloc == "zero") {
        g = DiffusionMatrix::zero();
    } else {
        Allocation a;
        if (alloc == "mixed") a = Allocation::Mixed;
        else if (alloc == "position-only") a = Allocation::PositionOnly;
        else if (alloc == "momentum-only") a = Allocation::MomentumOnly;
        else throw ConfigError("unknown allocation '" + alloc + "'");
        std::optional<double> w;
        if (a != Allocation::PositionOnly) w = c.get_double("gamma_omega_rad_s", sys.Omega1);
        g = minimal_diffusion(s, a, w);
    }
    return g.scaled(scale);
}

std::uint64_t resolve_seed(Context& ctx) {
    if (ctx.cfg.has("seed")) {
        if (ctx.manifest.seed_source == "none") ctx.manifest.seed_source = "config";
        ctx.manifest.master_seed = ctx.cfg.get_uint("seed");
        return ctx.manifest.master_seed;
    }
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    ctx.cfg.set("seed", std::to_string(s));
    ctx.manifest.seed_source = "entropy";
    ctx.manifest.master_seed = ctx.cfg.get_uint("seed");
    return s;
}

void say(const Context& ctx, const std::string& line) {
    if (!ctx.quiet) std::cout << line << '\n';
}

std::string sci(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", digits, v);
    return buf;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------- commands

/// The two-body potential is bounded below only if K^2 < m1 m2 Omega1^2 Omega2^2.
void warn_if_unstable(const Context& ctx, const LinearizedSystem& sys) {
    if (sys.K * sys.K >= sys.m1 * sys.m2 * std::pow(sys.Omega1 * sys.Omega2, 2))
        say(ctx, "note: coupled potential is not positive definite; one normal mode grows exponentially");
}

void cmd_linearize(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    warn_if_unstable(ctx, sys);
    say(ctx, "Omega1 = " + sci(sys.Omega1) + " rad/s");
    say(ctx, "Omega2 = " + sci(sys.Omega2) + " rad/s");
    say(ctx, "K      = " + sci(sys.K) + " N/m");
    say(ctx, "shift  = (" + sci(sys.equilibrium_shift[0]) + ", " + sci(sys.equilibrium_shift[1]) + ") m");
    const json j = io::to_json(sys);
    say(ctx, j.dump());
    write_json(ctx.output("linearize.json"), j);
}

void cmd_bound(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix g = gamma_from(ctx.cfg, s, sys);
    const std::string form = ctx.cfg.get_string("dimensional_form", "consistent");
    if (form != "consistent" && form != "paper_literal") throw ConfigError("dimensional_form must be consistent or paper_literal");
    const std::string route = ctx.cfg.get_string("final_route", "symmetric");

    const DimensionlessModel model = to_dimensionless(sys, g);
    std::vector<BoundReport> reports;
    reports.push_back(strongest_bound(model.gamma_bar, model));
    reports.push_back(tightest_alpha_bound(model.gamma_bar, model));
    reports.push_back(weak_bound(model.gamma_bar, model));
    const bool equal_masses = std::abs(s.m1 - s.m2) <= 1e-9 * std::max(s.m1, s.m2);
    if (equal_masses) {
        reports.push_back(dimensional_bound(g, sys, form == "paper_literal" ? DimensionalForm::PaperLiteral : DimensionalForm::Consistent));
        if (route == "symmetric") reports.push_back(final_bound(g, s));
        else if (route == "frequency_independent")
            reports.push_back(final_bound(g, s, ctx.cfg.get_double("final_omega_rad_s", sys.Omega1)));
        else throw ConfigError("final_route must be symmetric or frequency_independent");
    } else {
        say(ctx, "note: unequal masses, dimensional and final bounds skipped");
    }

    std::ofstream jl(ctx.output("bounds.jsonl"), std::ios::binary | std::ios::trunc);
    if (!jl) throw IoError("cannot write bounds.jsonl");
    for (const auto& r : reports) {
        io::write_jsonl(jl, r);
        say(ctx, to_string(r.id) + ": lhs = " + sci(r.lhs) + "  rhs = " + sci(r.rhs) + "  margin = " + sci(r.margin) +
                     "  " + (r.satisfied ? "satisfied" : "VIOLATED"));
    }
    if (!jl) throw IoError("write to bounds.jsonl failed");
    if (equal_masses) say(ctx, "final bound G m^2/(hbar d^3): rhs = " + sci(final_bound_rhs(s)));
}

GaussianState initial_state(const Config& c) {
    const std::string kind = c.get_string("initial", "ground");
    GaussianState st = GaussianState::ground_dimensionless();
    if (kind == "ground") return st;
    if (kind == "thermal") {
        const double n1 = c.get_double("n_th1", 0.0);
        const double n2 = c.get_double("n_th2", 0.0);
        st.V = Vec4(n1 + 0.5, n2 + 0.5, n1 + 0.5, n2 + 0.5).asDiagonal();
        return st;
    }
    if (kind == "squeezed") {
        const double r1 = c.get_double("squeeze_r1", 0.0);
        const double r2 = c.get_double("squeeze_r2", 0.0);
        st.V = 0.5 * Vec4(std::exp(-2 * r1), std::exp(-2 * r2), std::exp(2 * r1), std::exp(2 * r2)).asDiagonal();
        return st;
    }
    throw ConfigError("initial must be ground, thermal or squeezed");
}

void cmd_evolve(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix g = gamma_from(ctx.cfg, s, sys);
    const DimensionlessModel model = to_dimensionless(sys, g);
    warn_if_unstable(ctx, sys);
    const double t_end = ctx.cfg.get_double("t_end_s", 3.0 * 2.0 * pi / sys.Omega1);
    const double dt = ctx.cfg.get_double("dt_s", max_covariance_step(model));
    const auto stride = ctx.cfg.get_uint("record_stride", 10);
    const GaussianState v0 = initial_state(ctx.cfg);

    const EvolutionResult res = evolve_covariance(v0, model, t_end, dt, stride);
    io::CsvWriter w(ctx.output("evolve.csv"));
    w.comment("dimensionless covariance, ordering x1,x2,p1,p2");
    std::vector<std::string> cols = {"t_s", "ppt_min_eig", "unc_min_eig"};
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) cols.push_back("V" + std::to_string(i + 1) + std::to_string(j + 1));
    w.header(cols);
    double min_ppt = res.ppt_min_eig.front();
    double min_unc = res.unc_min_eig.front();
    for (std::size_t k = 0; k < res.size(); ++k) {
        std::vector<double> row = {res.times[k], res.ppt_min_eig[k], res.unc_min_eig[k]};
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) row.push_back(res.states[k].V(i, j));
        w.row(row);
        min_ppt = std::min(min_ppt, res.ppt_min_eig[k]);
        min_unc = std::min(min_unc, res.unc_min_eig[k]);
    }
    w.close();
    const auto onset = entanglement_onset(v0, model, t_end, dt);
    say(ctx, "steps recorded: " + std::to_string(res.size()));
    say(ctx, "min PPT eigenvalue: " + sci(min_ppt));
    say(ctx, "min uncertainty eigenvalue: " + sci(min_unc));
    say(ctx, onset ? "entanglement onset: t = " + sci(*onset) + " s" : "entanglement onset: none");
}

std::vector<double> grid_from(const Config& c, double resonance) {
    const auto n = c.get_uint("grid_points", 512);
    const double lo = c.get_double("grid_min_rad_s", 0.5 * resonance);
    const double hi = c.get_double("grid_max_rad_s", 1.5 * resonance);
    const bool lg = c.get_bool("grid_log", false);
    if (n == 0) throw ConfigError("grid_points must be positive");
    if (!(lo >= 0.0) || !(hi >= lo)) throw ConfigError("need 0 <= grid_min_rad_s <= grid_max_rad_s");
    if (lo == 0.0) {
        if (lg) throw ConfigError("logarithmic grid needs grid_min_rad_s > 0");
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? 0.0 : hi * static_cast<double>(i) / static_cast<double>(n - 1);
        return g;
    }
    return positive_grid(lo, hi, n, lg);
}

void cmd_spectrum(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix g = gamma_from(ctx.cfg, s, sys);
    const std::string model = ctx.cfg.get_string("model", "fixed_source");
    SpectrumOptions opt;
    const std::string kernel = ctx.cfg.get_string("kernel", "printed");
    if (kernel == "printed") opt.kernel = ThermalKernel::Printed;
    else if (kernel == "symmetrized") opt.kernel = ThermalKernel::Symmetrized;
    else throw ConfigError("kernel must be printed or symmetrized");
    const std::string zero = ctx.cfg.get_string("zero_frequency", "substitute");
    if (zero == "substitute") opt.zero = ZeroFrequency::Substitute;
    else if (zero == "reject") opt.zero = ZeroFrequency::Reject;
    else throw ConfigError("zero_frequency must be substitute or reject");

    NoiseSpectrum spec;
    if (model == "fixed_source") {
        spec = dns_fixed_source(s, sys, g, grid_from(ctx.cfg, fixed_source_resonance(sys)), opt);
    } else if (model == "symmetric_pair") {
        spec = dns_symmetric_pair(s, sys, g, grid_from(ctx.cfg, sys.Omega1), opt);
    } else {
        throw ConfigError("model must be fixed_source or symmetric_pair");
    }
    io::write_spectrum_csv(ctx.output("spectrum.csv"), spec);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < spec.size(); ++i)
        if (spec.total[i] > spec.total[peak]) peak = i;
    say(ctx, "rows: " + std::to_string(spec.size()));
    if (spec.size()) say(ctx, "peak: S(" + sci(spec.omega[peak]) + " rad/s) = " + sci(spec.total[peak]) + " m^2 s");
    if (!spec.zero_substituted.empty()) say(ctx, "note: w = 0 replaced by its classical limit");
}

void cmd_simulate(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix g = gamma_from(ctx.cfg, s, sys);
    const std::uint64_t seed = resolve_seed(ctx);
    const NoiseModel noise = NoiseModel::from_setup(g, s, seed);
    const MonitoredOscillator osc = monitored_oscillator(s, sys, noise);

    const auto n_traj = ctx.cfg.get_uint("n_traj", 64);
    const double dt = ctx.cfg.get_double("dt_s", max_langevin_step(osc));
    const double duration = ctx.cfg.get_double("duration_s", 100.0 * 2.0 * pi / osc.omega0);
    SimulateOptions opt;
    opt.record_stride = ctx.cfg.get_uint("record_stride", 1);
    opt.threads = ctx.threads;
    opt.retain_static_force = ctx.cfg.get_bool("retain_static_force", false);
    const std::string init = ctx.cfg.get_string("initial", "rest");
    if (init == "rest") {
        opt.initial = InitialState::Given;
        opt.x0 = ctx.cfg.get_double("x0_m", 0.0);
        opt.p0 = ctx.cfg.get_double("p0_kg_m_s", 0.0);
    } else if (init == "stationary") {
        opt.initial = InitialState::Stationary;
    } else {
        throw ConfigError("initial must be rest or stationary");
    }

    const TrajectoryEnsemble ens = simulate(s, sys, noise, n_traj, dt, duration, opt);

    io::CsvWriter w(ctx.output("ensemble.csv"));
    w.comment("ensemble moments of the monitored oscillator (x, p)");
    w.header({"t_s", "mean_x", "var_x", "mean_p", "var_p", "cov_xp"});
    const auto n = static_cast<double>(ens.n_traj);
    for (std::size_t k = 0; k < ens.samples(); ++k) {
        double mx = 0, mp = 0;
        for (std::size_t i = 0; i < ens.n_traj; ++i) {
            mx += ens.x[i][k];
            mp += ens.p[i][k];
        }
        mx /= n;
        mp /= n;
        double vx = 0, vp = 0, cxp = 0;
        for (std::size_t i = 0; i < ens.n_traj; ++i) {
            const double dx = ens.x[i][k] - mx;
            const double dp = ens.p[i][k] - mp;
            vx += dx * dx;
            vp += dp * dp;
            cxp += dx * dp;
        }
        const double denom = ens.n_traj > 1 ? n - 1.0 : 1.0;
        w.row({static_cast<double>(k) * ens.record_dt, mx, vx / denom, mp, vp / denom, cxp / denom});
    }
    w.close();

    const auto seg = ctx.cfg.get_uint("welch_segment", 0);
    if (seg > 0) {
        WelchOptions wo;
        wo.segment_len = seg;
        wo.overlap = ctx.cfg.get_double("welch_overlap", 0.5);
        const WelchEstimate est = welch_spectrum(ens, wo);
        io::write_spectrum_csv(ctx.output("welch_spectrum.csv"), est.spectrum);
        say(ctx, "welch segments averaged: " + std::to_string(est.segments));
    }
    if (ctx.cfg.get_bool("write_trajectories", false)) io::write_trajectories(ctx.output("trajectories.bin"), ens);
    say(ctx, "trajectories: " + std::to_string(ens.n_traj) + ", samples each: " + std::to_string(ens.samples()) +
                 ", dt = " + sci(ens.dt) + " s, seed = " + std::to_string(seed));
}

void cmd_reheat(Context& ctx) {
    const PhysicalSetup s = setup_from(ctx.cfg);
    const LinearizedSystem sys = linearize(s);
    const DiffusionMatrix g = gamma_from(ctx.cfg, s, sys);
    const std::uint64_t seed = resolve_seed(ctx);
    const NoiseModel noise = NoiseModel::from_setup(g, s, seed);
    const MonitoredOscillator osc = monitored_oscillator(s, sys, noise);
    const auto cycles = ctx.cfg.get_uint("n_cycles", 1000);
    const double tau = ctx.cfg.get_double("cycle_time_s");
    const double N = ctx.cfg.get_double("detector_noise_N", 1.0);
    const double dt = ctx.cfg.get_double("dt_s", std::min(max_langevin_step(osc), tau / 100.0));

    const ReheatResult r = reheating_run(s, sys, noise, cycles, tau, N, dt, ctx.threads);
    const double predicted = r.expected_Gamma > 0.0 ? N / std::sqrt(r.expected_Gamma * r.total_time) : 0.0;
    write_json(ctx.output("reheat.json"), json{{"Gamma_hat_per_s", r.Gamma_hat},
                                               {"rel_err", r.rel_err},
                                               {"expected_Gamma_per_s", r.expected_Gamma},
                                               {"total_time_s", r.total_time},
                                               {"n_cycles", r.n_cycles},
                                               {"N_over_sqrt_Gamma_t", predicted}});
    io::CsvWriter w(ctx.output("occupations.csv"));
    w.header({"cycle", "measured_occupation"});
    for (std::size_t i = 0; i < r.occupations.size(); ++i) w.row({static_cast<double>(i), r.occupations[i]});
    w.close();
    say(ctx, "Gamma_hat = " + sci(r.Gamma_hat) + " 1/s (injected " + sci(r.expected_Gamma) + ")");
    say(ctx, "relative error = " + sci(r.rel_err, 3) + ", N/sqrt(Gamma t) = " + sci(predicted, 3));
}

void print_report(const Context& ctx, const FeasibilityReport& r) {
    auto row = [&](const std::string& name, const std::string& value) {
        std::string line = "  " + name;
        if (line.size() < 34) line.resize(34, ' ');
        say(ctx, line + value);
    };
    say(ctx, "feasibility report");
    row("m [kg]", sci(r.m, 4));
    row("d [m]", sci(r.d, 4));
    row("omega_G [1/s]", sci(r.omega_G, 4) + "   (as mHz: " + sci(r.omega_G_mHz(), 3) + " mHz)");
    row("Gamma_G = max Gamma_th [1/s]", sci(r.Gamma_G, 4) + "   (as mHz: " + sci(r.Gamma_G_mHz(), 3) + " mHz)");
    row("Gamma_th [1/s]", sci(r.Gamma_th, 4));
    row("Q required", sci(r.Q_required, 4));
    row("Q/T required [1/K]", sci(r.QoverT_required, 4));
    row("Q required (relaxed by r)", sci(r.Q_required_relaxed, 4));
    row("integration time [s]", sci(r.t_int, 4) + "   (" + sci(r.t_int_days(), 3) + " days)");
    row("force-noise margin", sci(r.force_noise_margin, 4));
    row("frequency-form margin", sci(r.rate_margin, 4));
    row("relaxed margin", sci(r.relaxed_margin, 4));
    row("strict check", r.strict_satisfied ? "pass" : "fail");
    row("Q gap [orders]", sci(r.q_gap_orders, 3));
    say(ctx, "note: rates are angular [1/s]; the mHz column is 1e3 x the same number");
    say(ctx, "verdict: " + r.verdict);
}

void cmd_feasibility(Context& ctx) {
    const FeasibilityParams p = feasibility_from(ctx.cfg);
    const FeasibilityReport r = table1_report(p);
    print_report(ctx, r);
    write_json(ctx.output("feasibility.json"), io::to_json(r));
}

void cmd_sweep(Context& ctx) {
    const std::string key = ctx.cfg.get_string("sweep_key");
    const double lo = ctx.cfg.get_double("sweep_min");
    const double hi = ctx.cfg.get_double("sweep_max");
    const auto n = ctx.cfg.get_uint("sweep_points", 11);
    const bool lg = ctx.cfg.get_bool("sweep_log", false);
    if (n == 0) throw ConfigError("sweep_points must be positive");
    if (lg && !(lo > 0.0 && hi > 0.0)) throw ConfigError("logarithmic sweep needs positive bounds");
    static const std::vector<std::string> allowed = {"Omega_rad_s", "rho_kg_m3", "R_m", "beta", "T_K", "Q", "N", "r"};
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("sweep_key '" + key + "' is not a feasibility key");
    ctx.cfg.set_default(key, format_double(lo));
    const FeasibilityParams base = feasibility_from(ctx.cfg);

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        values[i] = lg ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    auto eval = [&](std::size_t i) {
        FeasibilityParams p = base;
        double* field = key == "Omega_rad_s" ? &p.Omega
                        : key == "rho_kg_m3" ? &p.rho
                        : key == "R_m"       ? &p.R
                        : key == "beta"      ? &p.beta
                        : key == "T_K"       ? &p.T
                        : key == "Q"         ? &p.Q
                        : key == "N"         ? &p.N
                                             : &p.r;
        *field = values[i];
        return table1_report(p);
    };
    const auto reports = parallel_map<FeasibilityReport>(n, eval, ctx.threads);
    io::CsvWriter w(ctx.output("sweep.csv"));
    w.header({key, "Gamma_G_per_s", "Gamma_th_per_s", "rate_margin", "relaxed_margin", "Q_required", "t_int_s"});
    std::size_t feasible = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = reports[i];
        w.row({values[i], r.Gamma_G, r.Gamma_th, r.rate_margin, r.relaxed_margin, r.Q_required, r.t_int});
        if (r.verdict == "feasible-in-principle") ++feasible;
    }
    w.close();
    say(ctx, "sweep over " + key + ": " + std::to_string(n) + " points, " + std::to_string(feasible) +
                 " feasible in principle");
}

using Command = std::function<void(Context&)>;

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> c = {
        {"linearize", cmd_linearize}, {"bound", cmd_bound},   {"evolve", cmd_evolve},
        {"spectrum", cmd_spectrum},   {"simulate", cmd_simulate}, {"reheat", cmd_reheat},
        {"feasibility", cmd_feasibility}, {"sweep", cmd_sweep},
    };
    return c;
}

std::string params_hash(const std::map<std::string, std::string>& params) {
    Fnv1a h;
    for (const auto& [k, v] : params) h.update(k).update("=").update(v).update("\n");
    return h.hex();
}

/// Runs a command and writes its manifest. Returns the manifest.
io::RunManifest execute(const std::string& name, Context& ctx) {
    fs::create_directories(ctx.out_dir);
    ctx.manifest.command = name;
    commands().at(name)(ctx);
    for (auto& o : ctx.manifest.outputs) o.hash = io::hash_file((ctx.out_dir / o.path).string());
    ctx.manifest.params = ctx.cfg.resolved();
    ctx.manifest.config_hash = params_hash(ctx.manifest.params);
    ctx.manifest.write((ctx.out_dir / "manifest.json").string());
    for (const auto& k : ctx.cfg.unused_keys()) std::cerr << "warning: config key '" << k << "' was not used\n";
    return ctx.manifest;
}

int replay(const std::string& manifest_path, const std::string& out, unsigned threads, bool quiet) {
    const io::RunManifest recorded = io::RunManifest::load(manifest_path);
    if (!commands().count(recorded.command)) throw ConfigError("manifest names unknown command '" + recorded.command + "'");
    Context ctx;
    for (const auto& [k, v] : recorded.params) ctx.cfg.set(k, v);
    ctx.out_dir = out.empty() ? fs::path(manifest_path).parent_path() / "replay" : fs::path(out);
    ctx.threads = threads;
    ctx.quiet = quiet;
    ctx.manifest.seed_source = recorded.seed_source;
    const io::RunManifest fresh = execute(recorded.command, ctx);

    std::size_t matched = 0;
    bool ok = fresh.outputs.size() == recorded.outputs.size();
    for (const auto& r : recorded.outputs) {
        const auto it = std::find_if(fresh.outputs.begin(), fresh.outputs.end(), [&](const auto& o) { return o.path == r.path; });
        const bool same = it != fresh.outputs.end() && it->hash == r.hash;
        std::cout << (same ? "match    " : "MISMATCH ") << r.path << '\n';
        if (same) ++matched;
        else ok = false;
    }
    std::cout << "replay: " << matched << "/" << recorded.outputs.size() << " outputs reproduced\n";
    return ok ? 0 : 3;
}

int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Numeric: return 3;
    case ErrorCategory::Io: return 4;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gravitationally coupled oscillators under diffusive dynamics: bounds, spectra, Monte Carlo, feasibility"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 ok, 2 configuration, 3 numerical/physical, 4 I/O.\n"
               "Every run writes manifest.json next to its outputs.");

    struct Flags {
        std::string config;
        std::vector<std::string> sets;
        std::string out = "gravdiff_out";
        unsigned threads = 1;
        std::uint64_t seed = 0;
        bool table1 = false;
        bool paper_literal = false;
        std::size_t grid = 0;
        std::size_t traj = 0;
        bool quiet = false;
    } flags;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", flags.config, "flat key = value config file");
        sub->add_option("-s,--set", flags.sets, "override a config key: key=value (repeatable)");
        sub->add_option("-o,--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores; results do not depend on it")
            ->capture_default_str();
        sub->add_flag("-q,--quiet", flags.quiet, "suppress stdout report");
    };
    auto with_setup = [&](CLI::App* sub) { sub->add_flag("--table1", flags.table1, "load the built-in torsion-pendulum parameter set"); };

    auto* lin = app.add_subcommand("linearize", "renormalized frequencies, coupling and equilibrium shifts");
    common(lin);
    with_setup(lin);
    lin->footer(cli::format_keys("Config keys", cli::setup_keys()));

    auto* bnd = app.add_subcommand("bound", "evaluate the separability bounds for a diffusion matrix");
    common(bnd);
    with_setup(bnd);
    bnd->add_flag("--paper-literal", flags.paper_literal, "use the printed form of the dimensional bound (no m^2)");
    bnd->footer(cli::format_keys("Config keys", cli::setup_keys()) + cli::format_keys("Diffusion keys", cli::diffusion_keys()) +
                cli::format_keys("Bound keys", cli::bound_keys()));

    auto* evo = app.add_subcommand("evolve", "integrate the covariance matrix and track the PPT eigenvalue");
    common(evo);
    with_setup(evo);
    evo->footer(cli::format_keys("Config keys", cli::setup_keys()) + cli::format_keys("Diffusion keys", cli::diffusion_keys()) +
                cli::format_keys("Evolution keys", cli::evolve_keys()));

    auto* spe = app.add_subcommand("spectrum", "closed-form displacement noise spectrum");
    common(spe);
    with_setup(spe);
    spe->add_option("--grid", flags.grid, "number of grid points (sets grid_points)");
    spe->footer(cli::format_keys("Config keys", cli::setup_keys()) + cli::format_keys("Diffusion keys", cli::diffusion_keys()) +
                cli::format_keys("Spectrum keys", cli::spectrum_keys()));

    auto* sim = app.add_subcommand("simulate", "Langevin Monte Carlo of the monitored oscillator");
    common(sim);
    with_setup(sim);
    sim->add_option("--seed", flags.seed, "master seed (sets seed)");
    sim->add_option("--traj", flags.traj, "number of trajectories (sets n_traj)");
    sim->footer(cli::format_keys("Config keys", cli::setup_keys()) + cli::format_keys("Diffusion keys", cli::diffusion_keys()) +
                cli::format_keys("Simulation keys", cli::simulate_keys()));

    auto* reh = app.add_subcommand("reheat", "repeated reheating cycles and heating-rate estimate");
    common(reh);
    with_setup(reh);
    reh->add_option("--seed", flags.seed, "master seed (sets seed)");
    reh->footer(cli::format_keys("Config keys", cli::setup_keys()) + cli::format_keys("Diffusion keys", cli::diffusion_keys()) +
                cli::format_keys("Reheating keys", cli::reheat_keys()));

    auto* fea = app.add_subcommand("feasibility", "heating-rate budget and verdict");
    common(fea);
    with_setup(fea);
    fea->footer(cli::format_keys("Config keys", cli::feasibility_keys()));

    auto* swp = app.add_subcommand("sweep", "feasibility report over a one-parameter grid");
    common(swp);
    with_setup(swp);
    swp->footer(cli::format_keys("Config keys", cli::feasibility_keys()) + cli::format_keys("Sweep keys", cli::sweep_keys()));

    std::string manifest_path;
    std::string replay_out;
    auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
    rep->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    rep->add_option("-o,--out", replay_out, "output directory (default <manifest dir>/replay)");
    rep->add_option("--threads", flags.threads, "worker threads");
    rep->add_flag("-q,--quiet", flags.quiet, "suppress stdout report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rep->parsed()) return replay(manifest_path, replay_out, flags.threads, flags.quiet);

        CLI::App* sub = app.get_subcommands().front();
        Context ctx;
        ctx.cfg = flags.config.empty() ? Config() : Config::load(flags.config);
        for (const auto& kv : flags.sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            ctx.cfg.set(io::trim(kv.substr(0, eq)), io::trim(kv.substr(eq + 1)));
        }
        auto given = [&](const char* name) {
            const CLI::Option* o = sub->get_option_no_throw(name);
            return o != nullptr && o->count() > 0;
        };
        if (given("--seed")) {
            ctx.cfg.set("seed", std::to_string(flags.seed));
            ctx.manifest.seed_source = "flag";
        }
        if (given("--traj")) ctx.cfg.set("n_traj", std::to_string(flags.traj));
        if (given("--grid")) ctx.cfg.set("grid_points", std::to_string(flags.grid));
        if (flags.paper_literal) ctx.cfg.set("dimensional_form", "paper_literal");
        if (flags.table1) {
            const std::string n = sub->get_name();
            preset_table1(ctx.cfg, n == "feasibility" || n == "sweep");
        }
        ctx.out_dir = flags.out;
        ctx.threads = resolve_threads(flags.threads);
        ctx.quiet = flags.quiet;
        execute(sub->get_name(), ctx);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
