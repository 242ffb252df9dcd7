#pragma once

// Steady-state particle stream in two coupled waveguides behind a step
// potential at x = 0. For x >= 0 the upper (incident) and lower waveguide
// amplitudes are
//
//   psi_up   =  2k0/(k0+k2) cos(k1 x) exp(i k2 x)
//   psi_down = -2i k0/(k0+k2) sin(k1 x) exp(i k2 x)
//
// with k0 = sqrt(2mE)/hbar, k1 k2 = m J0/hbar and
// k2^2 = (m/hbar^2) (Delta +- sqrt(Delta^2 - (hbar J0)^2)),
// Delta = E + hbar J0 - V0. The step V0 may be complex (gain/loss).
//
// All evaluation happens in natural units (hbar = m = J0 = 1, lengths in
// x0 = sqrt(hbar/(m J0))) and is converted back at the API boundary.

#include <complex>

#include "wgclock/constants.hpp"

namespace wgclock {

using cplx = std::complex<double>;

struct ModelParams {
  double mass = 1.0;      // kg
  double energy = 1.0;    // J, kinetic energy of the incident stream
  cplx step{0.0, 0.0};    // J, Re = height, Im = gain (>0) / loss (<0)
  double coupling = 1.0;  // rad/s, J0
  double hbar = constants::hbar;

  // hbar = m = J0 = 1 with the requested energy mismatch; the step is
  // chosen as V0 = E + 1 - delta.
  static ModelParams natural(cplx delta, double energy = 1.0);

  // Delta = E + hbar J0 - V0, recomputed on every call.
  cplx delta() const { return energy + hbar * coupling - step; }
  // Delta / (hbar J0).
  cplx reduced_delta() const { return delta() / (hbar * coupling); }
  double x0() const;
  // sqrt(hbar J0 / m), the velocity unit and plateau value of v_J.
  double velocity_unit() const;
  double free_velocity() const;

  // Throws InvalidParameter (or SingularInput for J0 = 0, Delta = 0).
  void validate() const;
};

enum class Branch { Plus, Minus };

struct Wavenumbers {
  double k0 = 0.0;  // rad/m
  cplx k1;          // rad/m
  cplx k2;          // rad/m, Re >= 0 (Im >= 0 when Re == 0)
  Branch branch = Branch::Plus;
};

struct WavefunctionSample {
  double x = 0.0;
  cplx psi_up;
  cplx psi_down;

  double density_up() const { return std::norm(psi_up); }
  double density_down() const { return std::norm(psi_down); }
  double phase_up() const { return std::arg(psi_up); }
  double phase_down() const { return std::arg(psi_down); }
  // |psi_down|^2 / (|psi_up|^2 + |psi_down|^2); NaN if both underflow.
  double population_down() const;
};

enum class Regime { ClassicallyAllowed, ClassicallyForbidden };

struct ModalEnergies {
  cplx e1;       // (hbar k1)^2 / 2m
  cplx e2;       // (hbar k2)^2 / 2m
  cplx kinetic;  // T = E1 + E2 - hbar J0
  Regime classification = Regime::ClassicallyAllowed;
};

struct VelocityReport {
  double clock = 0.0;            // v_J = J0 / |k1|
  double phase_at_step = 0.0;    // v_S(0), signed
  double momentum_at_step = 0.0; // v_p(0), unsigned
  double free = 0.0;             // sqrt(2E/m)
};

struct BoundaryMatch {
  cplx reflection;  // amplitude of exp(-i k0 x) for x < 0
  double continuity_residual = 0.0;
};

Wavenumbers wavenumbers(const ModelParams& p);
WavefunctionSample wavefunctions(const ModelParams& p, double x);
BoundaryMatch boundary_match(const ModelParams& p);

// p_down(x) from the transfer factors; the cos/sin prefactors cancel so the
// result is finite for every x >= 0.
double relative_population(const ModelParams& p, double x);

ModalEnergies modal_energies(const ModelParams& p);

double clock_velocity(const ModelParams& p);
// Probability current over density of psi_up, j/|psi_up|^2. Signed.
double phase_velocity(const ModelParams& p, double x);
// (hbar/m) |psi_up'/psi_up|. Unsigned.
double momentum_velocity(const ModelParams& p, double x);
VelocityReport velocities(const ModelParams& p);

// Barrier traversal time b / v_J.
double buttiker_landauer_time(const ModelParams& p, double width);

// v/v0 = (1 + (V0i/E)^2)^(1/4) for a purely imaginary step i V0i.
double imaginary_step_speed_ratio(double v0i_over_e);

// max of |LHS - RHS| over both coupled stationary equations, normalised by
// |E| (|psi_up| + |psi_down|). Evaluated with analytic second derivatives.
double schrodinger_residual(const ModelParams& p, double x);
// Same, with caller-supplied wavenumbers (used to probe the check itself).
double schrodinger_residual(const ModelParams& p, const Wavenumbers& k, double x);

}  // namespace wgclock
