#include "wgclock/oracles.hpp"

#include <cmath>

#include "wgclock/constants.hpp"
#include "wgclock/errors.hpp"
#include "wgclock/tdse_sim.hpp"

namespace wgclock {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

// sin(z)/z, series near the origin.
cplx sinc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

}  // namespace

void BarrierSpec::validate() const {
  if (!(mass > 0.0)) throw InvalidParameter("barrier: mass must be > 0");
  if (!(energy > 0.0)) throw InvalidParameter("barrier: energy must be > 0");
  if (!(width > 0.0)) throw InvalidParameter("barrier: width must be > 0");
  if (!std::isfinite(potential.real()) || !std::isfinite(potential.imag()))
    throw InvalidParameter("barrier: potential must be finite");
}

Scattering transfer_matrix_transmission(const BarrierSpec& spec) {
  spec.validate();
  const double hbar = constants::hbar;
  const double k = std::sqrt(2.0 * spec.mass * spec.energy) / hbar;
  cplx q = std::sqrt(2.0 * spec.mass * (spec.energy - spec.potential)) / hbar;
  if (q.imag() < 0.0) q = -q;
  const double b = spec.width;
  // sin(qb)/q and q sin(qb) stay finite as q -> 0.
  const cplx s_over_q = b * sinc(q * b);
  const cplx q_s = q * q * s_over_q;
  const cplx c = std::cos(q * b);
  const cplx denom = c - 0.5 * I * (k * s_over_q + q_s / k);
  Scattering out;
  out.transmission = std::exp(-I * k * b) / denom;
  out.reflection = 0.5 * I * (q_s / k - k * s_over_q) / denom;
  out.flux_transmission = std::norm(out.transmission);
  return out;
}

GaussianMoments free_gaussian_reference(const SimConfig& cfg, double t) {
  const double hbar = constants::hbar;
  const double k0 = std::sqrt(2.0 * cfg.mass * cfg.energy) / hbar;
  const double spread = hbar * t / (2.0 * cfg.mass * cfg.sigma * cfg.sigma);
  return {cfg.initial_center + hbar * k0 / cfg.mass * t, cfg.sigma * std::sqrt(1.0 + spread * spread)};
}

}  // namespace wgclock
