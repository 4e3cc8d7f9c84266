#pragma once

#include <numbers>

namespace kitwpa::constants {

// Exact SI values (2019 redefinition).
inline constexpr double planck = 6.62607015e-34;      // J s
inline constexpr double boltzmann = 1.380649e-23;     // J / K
// CODATA 2018.
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F / m

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace kitwpa::constants
