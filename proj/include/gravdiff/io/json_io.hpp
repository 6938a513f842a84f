#pragma once

// JSON views of the library types. nlohmann::json keeps object keys in a
// std::map, so output key order is stable (sorted).

#include "gravdiff/core_model.hpp"
#include "gravdiff/feasibility.hpp"
#include "gravdiff/separability_bounds.hpp"

#include "json.hpp"

#include <ostream>

namespace gravdiff::io {

using json = nlohmann::json;

inline json to_json(const BoundReport& r) {
    return json{{"bound_id", to_string(r.id)}, {"lhs", r.lhs},           {"rhs", r.rhs},
                {"margin", r.margin},          {"tol", r.tol},           {"satisfied", r.satisfied},
                {"inputs_hash", r.inputs_hash}};
}

/// One compact JSON object per line.
inline void write_jsonl(std::ostream& out, const BoundReport& r) { out << to_json(r).dump() << '\n'; }

inline json to_json(const LinearizedSystem& s) {
    json h = json::array();
    for (int i = 0; i < 4; ++i) h.push_back(json{s.H(i, 0), s.H(i, 1), s.H(i, 2), s.H(i, 3)});
    return json{{"Omega1_rad_s", s.Omega1},
                {"Omega2_rad_s", s.Omega2},
                {"K_N_per_m", s.K},
                {"m1_kg", s.m1},
                {"m2_kg", s.m2},
                {"equilibrium_shift_m", {s.equilibrium_shift[0], s.equilibrium_shift[1]}},
                {"H", h},
                {"ordering", "x1,x2,p1,p2"}};
}

inline json to_json(const Mat4& m) {
    json a = json::array();
    for (int i = 0; i < 4; ++i) a.push_back(json{m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
    return a;
}

inline json to_json(const FeasibilityReport& r) {
    return json{{"m_kg", r.m},
                {"d_m", r.d},
                {"omega_G_per_s", r.omega_G},
                {"omega_G_mHz", r.omega_G_mHz()},
                {"Gamma_G_per_s", r.Gamma_G},
                {"Gamma_G_mHz", r.Gamma_G_mHz()},
                {"Gamma_th_per_s", r.Gamma_th},
                {"Gamma_total_per_s", r.Gamma_total},
                {"Q_required", r.Q_required},
                {"QoverT_required_per_K", r.QoverT_required},
                {"Q_required_relaxed", r.Q_required_relaxed},
                {"t_int_s", r.t_int},
                {"t_int_days", r.t_int_days()},
                {"force_noise_margin", r.force_noise_margin},
                {"rate_margin", r.rate_margin},
                {"relaxed_margin", r.relaxed_margin},
                {"strict_satisfied", r.strict_satisfied},
                {"q_gap_orders", r.q_gap_orders},
                {"verdict", r.verdict}};
}

} // namespace gravdiff::io
