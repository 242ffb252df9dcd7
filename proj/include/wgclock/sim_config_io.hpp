#pragma once

// Flat "key = value" text form of SimConfig. Lengths in micrometres, times
// in picoseconds, energies in meV, mass in kg. '#' starts a comment.
//
//   mass_kg, energy_meV, barrier_v0i_meV, barrier_width_um,
//   barrier_center_um, sigma_um, grid_spacing_um, rk4_tolerance,
//   output_samples, and the geometry keys grid_start_um, grid_extent_um,
//   initial_center_um, total_time_ps.
//
// Missing physical keys take SimConfig::standard() values. Missing geometry
// keys are derived by apply_default_geometry(); given ones override it.
// Unknown keys, duplicates and unparsable values raise ConfigError.

#include <string>
#include <string_view>

#include "wgclock/tdse_sim.hpp"

namespace wgclock {

SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::string& path);

// Every key, values printed with 17 significant digits.
std::string format_sim_config(const SimConfig& cfg);

}  // namespace wgclock
