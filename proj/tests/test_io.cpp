#include "gravdiff/hash.hpp"
#include "gravdiff/io/config.hpp"
#include "gravdiff/io/csv.hpp"
#include "gravdiff/io/json_io.hpp"
#include "gravdiff/io/manifest.hpp"
#include "gravdiff/io/trajectory_io.hpp"
#include "gravdiff/langevin_mc.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace gravdiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "gravdiff_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST(ConfigTest, ParsesSectionsCommentsAndTypes) {
    const io::Config c = io::Config::parse("# comment\n"
                                           "m1_kg = 2.5   ; trailing\n"
                                           "\n"
                                           "n_traj = 64\n"
                                           "[spectrum]\n"
                                           "grid_log = yes\n",
                                           "test.ini");
    EXPECT_DOUBLE_EQ(c.get_double("m1_kg"), 2.5);
    EXPECT_EQ(c.get_uint("n_traj"), 64u);
    EXPECT_TRUE(c.get_bool("spectrum.grid_log", false));
    EXPECT_DOUBLE_EQ(c.get_double("T_K", 0.25), 0.25);
    EXPECT_EQ(c.resolved().at("T_K"), "0.25");
    EXPECT_EQ(c.resolved().at("m1_kg"), "2.5");
    EXPECT_TRUE(c.unused_keys().empty());
}

TEST(ConfigTest, ErrorsNameLineAndKey) {
    try {
        io::Config::parse("a = 1\nbroken line\n", "x.ini");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("x.ini:2"), std::string::npos) << e.what();
    }
    try {
        io::Config::parse("a = 1\na = 2\n", "x.ini");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate key 'a'"), std::string::npos);
    }
    const io::Config c = io::Config::parse("d = abc\nn = -3\n", "y.ini");
    try {
        c.get_double("d");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("y.ini:1"), std::string::npos) << e.what();
    }
    EXPECT_THROW(c.get_uint("n"), ConfigError);
    try {
        c.get_double("d_m");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("d_m"), std::string::npos);
    }
    EXPECT_THROW(io::Config::parse("[open\n"), ConfigError);
    EXPECT_THROW(io::Config::parse("= 3\n"), ConfigError);
    EXPECT_THROW(io::Config::parse("x = nan\n").get_double("x"), ConfigError);
    EXPECT_THROW(io::Config::load("/nonexistent/gravdiff.ini"), IoError);
}

TEST(ConfigTest, OverridesDefaultsAndUnusedKeys) {
    io::Config c = io::Config::parse("a = 1\nb = 2\n");
    c.set("a", "5");
    c.set_default("a", "9");
    c.set_default("z", "7");
    EXPECT_DOUBLE_EQ(c.get_double("a"), 5.0);
    EXPECT_DOUBLE_EQ(c.get_double("z"), 7.0);
    const auto unused = c.unused_keys();
    ASSERT_EQ(unused.size(), 1u);
    EXPECT_EQ(unused[0], "b");
}

TEST(ConfigTest, FormatDoubleRoundTrips) {
    gdtest::Gen g(111);
    for (int i = 0; i < 1000; ++i) {
        const double v = g.normal() * std::pow(10.0, g.integer(-300, 300));
        const io::Config c = io::Config::parse("v = " + io::format_double(v));
        ASSERT_EQ(c.get_double("v"), v);
    }
}

TEST(CsvTest, SpectrumLayout) {
    NoiseSpectrum s;
    s.resize(3, true);
    for (std::size_t i = 0; i < 3; ++i) {
        s.omega[i] = 0.5 * (i + 1);
        s.total[i] = 1.0 + i;
        s.thermal[i] = 1.0 + i;
    }
    const fs::path p = scratch("spec.csv");
    io::write_spectrum_csv(p.string(), s);
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# two-sided", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "omega_rad_s,S_total,S_grav_pos,S_grav_mom,S_thermal,S_cross");
    std::getline(in, line);
    EXPECT_EQ(line, "0.5,1,0,0,1,0");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_EQ(slurp(p).find('\r'), std::string::npos);
}

TEST(CsvTest, RowWidthAndOpenErrors) {
    io::CsvWriter w(scratch("w.csv").string());
    w.header({"a", "b"});
    EXPECT_THROW(w.row({1.0}), IoError);
    EXPECT_THROW(io::CsvWriter("/nonexistent/dir/x.csv"), IoError);
}

TEST(JsonTest, BoundReportFields) {
    const BoundReport r = make_report(BoundId::Final, 2.0, 1.0, "abc");
    std::ostringstream out;
    io::write_jsonl(out, r);
    const std::string line = out.str();
    ASSERT_EQ(line.back(), '\n');
    EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1);
    const io::json j = io::json::parse(line);
    EXPECT_EQ(j.at("bound_id"), "final");
    EXPECT_EQ(j.at("lhs"), 2.0);
    EXPECT_EQ(j.at("rhs"), 1.0);
    EXPECT_EQ(j.at("margin"), 1.0);
    EXPECT_EQ(j.at("satisfied"), true);
    EXPECT_EQ(j.at("inputs_hash"), "abc");
    // sorted, hence stable, key order
    EXPECT_LT(line.find("\"bound_id\""), line.find("\"inputs_hash\""));
    EXPECT_LT(line.find("\"inputs_hash\""), line.find("\"lhs\""));
}

TEST(JsonTest, FeasibilityAndSystem) {
    const io::json f = io::to_json(table1_report(table1_params()));
    EXPECT_EQ(f.at("verdict"), "feasible-in-principle");
    EXPECT_NEAR(f.at("m_kg").get<double>(), 2.556, 1e-3);
    const io::json s = io::to_json(linearize(gdtest::rescaled_setup()));
    EXPECT_NEAR(s.at("K_N_per_m").get<double>(), 0.1, 1e-15);
    EXPECT_EQ(s.at("H").size(), 4u);
}

TEST(ManifestTest, RoundTripAndErrors) {
    io::RunManifest m;
    m.command = "simulate";
    m.params = {{"seed", "42"}, {"n_traj", "64"}};
    m.master_seed = std::numeric_limits<std::uint64_t>::max();
    m.seed_source = "flag";
    m.config_hash = "00ff";
    m.outputs = {{"ensemble.csv", "1234"}};
    const fs::path p = scratch("manifest.json");
    m.write(p.string());
    const io::RunManifest back = io::RunManifest::load(p.string());
    EXPECT_EQ(back.command, m.command);
    EXPECT_EQ(back.params, m.params);
    EXPECT_EQ(back.master_seed, m.master_seed);
    EXPECT_EQ(back.seed_source, "flag");
    EXPECT_EQ(back.tool_version, io::kToolVersion);
    ASSERT_EQ(back.outputs.size(), 1u);
    EXPECT_EQ(back.outputs[0].hash, "1234");

    std::ofstream(scratch("bad.json")) << "{not json";
    EXPECT_THROW(io::RunManifest::load(scratch("bad.json").string()), ConfigError);
    std::ofstream(scratch("partial.json")) << "{\"command\": \"x\"}";
    EXPECT_THROW(io::RunManifest::load(scratch("partial.json").string()), ConfigError);
    EXPECT_THROW(io::RunManifest::load("/nonexistent/m.json"), IoError);
}

TEST(HashTest, FileHashMatchesStreamingHash) {
    const fs::path p = scratch("h.bin");
    std::string data(200000, '\0');
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<char>(i * 31 % 251);
    std::ofstream(p, std::ios::binary) << data;
    Fnv1a h;
    h.update(std::string_view(data));
    EXPECT_EQ(io::hash_file(p.string()), h.hex());
    EXPECT_EQ(h.hex().size(), 16u);
    EXPECT_THROW(io::hash_file("/nonexistent/x"), IoError);
}

TEST(TrajectoryIo, RoundTripIsBitExact) {
    const PhysicalSetup s = [] {
        PhysicalSetup p = gdtest::rescaled_setup();
        p.eta = 0.2;
        p.T = 1.0;
        return p;
    }();
    const LinearizedSystem sys = linearize(s);
    const NoiseModel nm = NoiseModel::from_setup(DiffusionMatrix::zero(), s, 0xDEADBEEFCAFEULL);
    SimulateOptions opt;
    opt.record_stride = 3;
    const TrajectoryEnsemble ens = simulate(s, sys, nm, 5, 0.05, 3.0, opt);
    const fs::path p = scratch("traj.bin");
    io::write_trajectories(p.string(), ens);
    const TrajectoryEnsemble back = io::read_trajectories(p.string());
    EXPECT_EQ(back.n_traj, ens.n_traj);
    EXPECT_EQ(back.master_seed, ens.master_seed);
    EXPECT_EQ(back.seeds, ens.seeds);
    EXPECT_EQ(back.record_dt, ens.record_dt);
    EXPECT_EQ(back.x, ens.x);
    EXPECT_EQ(back.p, ens.p);
    // header 8 + 4 + 4 + 8 + 8 + 8, then per trajectory a seed and (x, p) frames
    EXPECT_EQ(fs::file_size(p), 40u + ens.n_traj * (8u + 16u * ens.samples()));
    EXPECT_EQ(slurp(p).substr(0, 8), "GDTRAJ01");
}

TEST(TrajectoryIo, RejectsForeignAndTruncatedFiles) {
    std::ofstream(scratch("foreign.bin"), std::ios::binary) << "NOTATRAJECTORY";
    EXPECT_THROW(io::read_trajectories(scratch("foreign.bin").string()), IoError);
    const std::string good = [] {
        TrajectoryEnsemble e;
        e.n_traj = 1;
        e.record_dt = 0.1;
        e.seeds = {1};
        e.x = {{1.0, 2.0}};
        e.p = {{3.0, 4.0}};
        io::write_trajectories(scratch("ok.bin").string(), e);
        return slurp(scratch("ok.bin"));
    }();
    std::ofstream(scratch("cut.bin"), std::ios::binary) << good.substr(0, good.size() - 4);
    EXPECT_THROW(io::read_trajectories(scratch("cut.bin").string()), IoError);
    EXPECT_THROW(io::read_trajectories("/nonexistent/t.bin"), IoError);
}

TEST(Rng, DerivedSeedsAreDistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, i));
    EXPECT_EQ(seen.size(), 10000u);
    EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
    EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
    NormalStream a(5), b(5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, NormalStreamMoments) {
    NormalStream n(2024);
    const int count = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < count; ++i) {
        const double v = n();
        s1 += v;
        s2 += v * v;
    }
    EXPECT_NEAR(s1 / count, 0.0, 4.0 / std::sqrt(count));
    EXPECT_NEAR(s2 / count, 1.0, 4.0 * std::sqrt(2.0 / count));
}
