#pragma once

namespace wgclock::constants {

// CODATA 2018 exact / recommended values.
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double meV = 1.602176634e-22;   // J

// Length and time units used in config files and CSV output.
inline constexpr double micrometre = 1e-6;
inline constexpr double picosecond = 1e-12;

}  // namespace wgclock::constants
