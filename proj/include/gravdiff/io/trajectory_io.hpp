#pragma once

// Raw trajectory record, little endian throughout:
//
//   offset  size  field
//   0       8     magic "GDTRAJ01"
//   8       4     uint32 version (1)
//   12      4     uint32 n_traj
//   16      8     uint64 n_samples per trajectory
//   24      8     float64 record_dt [s]
//   32      8     uint64 master seed
//   40      ...   n_traj blocks: uint64 seed, then n_samples frames (float64 x, float64 p)

#include "gravdiff/errors.hpp"
#include "gravdiff/langevin_mc.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>

namespace gravdiff::io {

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u;
    std::memcpy(&u, &v, sizeof(T));
    char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    out.write(b, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char b[sizeof(T)];
    in.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!in) throw IoError("truncated trajectory record");
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(b[i]) << (8 * i);
    T v;
    std::memcpy(&v, &u, sizeof(T));
    return v;
}

} // namespace detail

inline void write_trajectories(const std::string& path, const TrajectoryEnsemble& ens) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write("GDTRAJ01", 8);
    detail::put_le<std::uint32_t>(out, 1);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ens.n_traj));
    detail::put_le<std::uint64_t>(out, ens.samples());
    detail::put_le<double>(out, ens.record_dt);
    detail::put_le<std::uint64_t>(out, ens.master_seed);
    for (std::size_t i = 0; i < ens.n_traj; ++i) {
        detail::put_le<std::uint64_t>(out, ens.seeds[i]);
        for (std::size_t k = 0; k < ens.samples(); ++k) {
            detail::put_le<double>(out, ens.x[i][k]);
            detail::put_le<double>(out, ens.p[i][k]);
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline TrajectoryEnsemble read_trajectories(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "GDTRAJ01", 8) != 0) throw IoError("'" + path + "' is not a trajectory record");
    if (detail::get_le<std::uint32_t>(in) != 1) throw IoError("unsupported trajectory record version");
    TrajectoryEnsemble ens;
    ens.n_traj = detail::get_le<std::uint32_t>(in);
    const auto n = detail::get_le<std::uint64_t>(in);
    ens.record_dt = detail::get_le<double>(in);
    ens.master_seed = detail::get_le<std::uint64_t>(in);
    ens.duration = ens.record_dt * static_cast<double>(n == 0 ? 0 : n - 1);
    for (std::size_t i = 0; i < ens.n_traj; ++i) {
        ens.seeds.push_back(detail::get_le<std::uint64_t>(in));
        std::vector<double> x(n), p(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = detail::get_le<double>(in);
            p[k] = detail::get_le<double>(in);
        }
        ens.x.push_back(std::move(x));
        ens.p.push_back(std::move(p));
    }
    return ens;
}

} // namespace gravdiff::io
