#pragma once

#include <numbers>

namespace gravdiff::codata {

// CODATA 2018 recommended values (SI). hbar and kB are exact since the 2019
// SI redefinition; G carries a relative standard uncertainty of 2.2e-5.
inline constexpr double G = 6.67430e-11;       // m^3 kg^-1 s^-2
inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double kB = 1.380649e-23;      // J / K

} // namespace gravdiff::codata

namespace gravdiff {
inline constexpr double pi = std::numbers::pi;
}
