#pragma once

// Closed-form references used to validate the wave-packet propagator:
// plane-wave scattering on a complex rectangular barrier and free Gaussian
// spreading.

#include <complex>

namespace wgclock {

struct SimConfig;

struct BarrierSpec {
  double mass = 0.0;            // kg
  double energy = 0.0;          // J, incident kinetic energy
  std::complex<double> potential;  // J
  double width = 0.0;           // m

  void validate() const;
};

struct Scattering {
  std::complex<double> transmission;  // t, amplitude of exp(ikx) beyond the barrier
  std::complex<double> reflection;    // r
  double flux_transmission = 0.0;     // |t|^2 (same medium on both sides)
};

// Barrier occupies [0, b]. t = exp(-ikb) / [cos(qb) - i (k^2+q^2)/(2kq) sin(qb)],
// q = sqrt(2m(E - V))/hbar with Im(q) >= 0. q -> 0 is evaluated by series.
Scattering transfer_matrix_transmission(const BarrierSpec& spec);

struct GaussianMoments {
  double com = 0.0;    // m
  double width = 0.0;  // m, standard deviation of |psi|^2
};

// Free Gaussian: com = x_c + (hbar k0/m) t, width = sigma sqrt(1 + (hbar t/(2 m sigma^2))^2).
GaussianMoments free_gaussian_reference(const SimConfig& cfg, double t);

}  // namespace wgclock
