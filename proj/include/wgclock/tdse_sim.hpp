#pragma once

// One-dimensional time-dependent Schroedinger propagation of a Gaussian wave
// packet across a rectangular barrier with imaginary potential i*V0i
// (V0i < 0 loss, V0i > 0 gain).
//
// Space: cell-centred uniform grid, node i at grid_start + (i + 1/2) dx,
// three-point Laplacian, psi = 0 beyond both ends. Barrier edges must sit on
// cell faces. Time: classic RK4 with step-doubling error control.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wgclock {

using cplx = std::complex<double>;

struct SimConfig {
  double mass = 0.0;            // kg
  double energy = 0.0;          // J, carrier kinetic energy
  double barrier_v0i = 0.0;     // J
  double barrier_width = 0.0;   // m
  double barrier_center = 0.0;  // m
  double sigma = 0.0;           // m, std of the initial Gaussian envelope
  double grid_start = 0.0;      // m, left face of the first cell
  double grid_extent = 0.0;     // m
  double grid_spacing = 0.0;    // m
  double initial_center = 0.0;  // m
  double total_time = 0.0;      // s
  double rk4_tolerance = 1e-8;  // relative local error per stability-limited step
  int output_samples = 200;     // trajectory records after t = 0

  // m = 6.5e-36 kg, E = 0.2 meV, b = 10 um, barrier centred at 0, with the
  // default run geometry for the given sigma and dx.
  static SimConfig standard(double v0i_over_e = 0.0, double sigma = 150e-6,
                            double grid_spacing = 0.5e-6);

  // Packet starts 4 sigma + b/2 before the barrier centre; the free packet
  // ends 3 sigma past the barrier; grid leaves 8 sigma on both sides plus
  // one barrier width of lead room.
  void apply_default_geometry();

  double carrier_wavenumber() const;
  double free_velocity() const;
  std::size_t grid_size() const;
  double position(std::size_t i) const;
  double barrier_left() const { return barrier_center - 0.5 * barrier_width; }
  double barrier_right() const { return barrier_center + 0.5 * barrier_width; }

  // Throws ConfigError.
  void validate() const;
};

struct WavePacketState {
  double t = 0.0;
  std::vector<cplx> amplitudes;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> com;    // <x> of the normalised density
  std::vector<double> norm;   // integral of |psi|^2
  std::vector<double> width;  // std of the normalised density
};

struct RegionMoments {
  double norm = 0.0;
  double com = 0.0;
  double width = 0.0;
};

struct PropagationResult {
  Trajectory trajectory;
  WavePacketState final_state;
  RegionMoments transmitted;  // moments over x >= barrier_right()
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

WavePacketState init_gaussian(const SimConfig& cfg);
std::vector<cplx> potential_profile(const SimConfig& cfg);

// Moments of |psi|^2 over nodes with x >= from.
RegionMoments density_moments(const SimConfig& cfg, std::span<const cplx> psi,
                              double from = -1e300);

// Throws BoundaryContact when more than 1e-6 of the population sits within
// two cells of a grid end, StepUnderflow when dt collapses.
PropagationResult propagate(const SimConfig& cfg);

// Final-state digest of one run in a V0i sweep.
struct RunSummary {
  double v0i_over_e = 0.0;
  RegionMoments transmitted;
  double final_width = 0.0;  // full-domain width
};

struct SweepResult {
  std::vector<double> v0i_over_e;
  std::vector<double> delta_x;       // m, transmitted COM lead over the free run
  std::vector<double> v_over_v0;     // 1 / (1 - delta_x / b)
  std::vector<double> transmission;  // transmitted norm / free transmitted norm
  double broadening_pct = 0.0;       // free run final width vs sigma
};

// Runs must share cfg except V0i and include a V0i = 0 baseline. Throws
// InvariantViolation when a transmitted packet has not cleared the barrier
// by two sigma.
SweepResult extract_velocity(const SimConfig& cfg, std::span<const RunSummary> runs);

struct SweepOptions {
  std::vector<double> v0i_over_e{-0.25, -0.5, -1.0, -1.5, -2.0};
  bool refine = true;    // second pass at dx/2 for error bars
  unsigned threads = 1;  // concurrent runs
};

struct SweepPoint {
  double v0i_over_e = 0.0;
  double delta_x = 0.0;
  double v_over_v0 = 1.0;
  double v0_over_v = 1.0;
  double v0_over_v_error = 0.0;           // half the spread between dx and dx/2
  double transmission = 1.0;
  double transmission_extrapolated = 1.0; // Richardson over dx, dx/2
  double reference_v0_over_v = 1.0;       // (1 + (V0i/E)^2)^(-1/4)
  double reference_transmission = 1.0;    // transfer matrix at the carrier energy
};

struct SweepReport {
  std::vector<SweepPoint> points;  // baseline first, then requested order
  double broadening_pct = 0.0;
  std::vector<double> grid_spacings;         // one per resolution pass
  std::vector<SweepResult> passes;           // one per resolution pass
  std::vector<std::vector<Trajectory>> trajectories;  // [pass][point]
};

// Runs the free baseline plus every requested V0i/E at cfg.grid_spacing (and
// at half of it when refine is set). Reported values come from the finest
// pass. cfg.barrier_v0i is ignored.
SweepReport run_sweep(const SimConfig& cfg, const SweepOptions& options);

}  // namespace wgclock
