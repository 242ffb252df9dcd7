#include "wgclock/waveguide_model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "wgclock/errors.hpp"

namespace wgclock {

namespace {

constexpr cplx I{0.0, 1.0};

// Problem in units hbar = m = J0 = 1.
struct Natural {
  double energy;
  cplx step;
  cplx delta;
  double x0;
  double velocity_unit;
};

Natural to_natural(const ModelParams& p) {
  p.validate();
  const double e_unit = p.hbar * p.coupling;
  return {p.energy / e_unit, p.step / e_unit, p.reduced_delta(), p.x0(), p.velocity_unit()};
}

struct NaturalWavenumbers {
  double k0;
  cplx k1;
  cplx k2;
  Branch branch;
};

NaturalWavenumbers natural_wavenumbers(const Natural& n) {
  const cplx d = n.delta;
  cplx disc = d * d - 1.0;
  // For real Delta the radicand sits on the cut for |Delta| < 1; take the
  // upper side so Im(k2) decreases continuously through the band.
  if (d.imag() == 0.0) disc = cplx(disc.real(), 0.0);
  const cplx root = std::sqrt(disc);
  const Branch branch = d.real() > -1.0 ? Branch::Plus : Branch::Minus;
  cplx k2 = std::sqrt(branch == Branch::Plus ? d + root : d - root);
  if (k2.real() < 0.0 || (k2.real() == 0.0 && k2.imag() < 0.0)) k2 = -k2;
  if (k2 == 0.0) throw SingularInput("k2 = 0: k1 = m J0 / (hbar k2) diverges");
  return {std::sqrt(2.0 * n.energy), 1.0 / k2, k2, branch};
}

cplx upper_prefactor(const NaturalWavenumbers& k) { return 2.0 * k.k0 / (k.k0 + k.k2); }

void require_position(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw InvalidParameter("position must be finite and x >= 0");
}

// psi_up and d psi_up / dx (natural units) including the plane-wave factor.
struct UpperField {
  cplx psi;
  cplx dpsi;
  double transfer_down_sq;  // |sin(k1 x)|^2, for node detection
};

UpperField upper_field(const NaturalWavenumbers& k, double xn) {
  const cplx a = upper_prefactor(k);
  const cplx c = std::cos(k.k1 * xn);
  const cplx s = std::sin(k.k1 * xn);
  const cplx e = std::exp(I * k.k2 * xn);
  return {a * c * e, a * (-k.k1 * s + I * k.k2 * c) * e, std::norm(s)};
}

// Logarithmic derivative psi'/psi of the upper waveguide, or DomainError at
// nodes and where the density underflows.
cplx upper_log_derivative(const ModelParams& p, double x) {
  require_position(x);
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  const UpperField f = upper_field(k, x / n.x0);
  const double density = std::norm(f.psi);
  if (!(density > 0.0) || !std::isfinite(density))
    throw DomainError("|psi_up|^2 underflows at the sampled position");
  const cplx c = std::cos(k.k1 * (x / n.x0));
  if (std::norm(c) < 1e-24 * (std::norm(c) + f.transfer_down_sq))
    throw DomainError("psi_up has a transfer node at the sampled position");
  // The prefactor and exp(i k2 x) cancel; dividing them out keeps
  // v_S(0) = Re(k2) exact.
  const cplx s = std::sin(k.k1 * (x / n.x0));
  return I * k.k2 - k.k1 * s / c;
}

}  // namespace

ModelParams ModelParams::natural(cplx delta, double energy) {
  ModelParams p;
  p.mass = 1.0;
  p.hbar = 1.0;
  p.coupling = 1.0;
  p.energy = energy;
  p.step = energy + 1.0 - delta;
  return p;
}

double ModelParams::x0() const { return std::sqrt(hbar / (mass * coupling)); }

double ModelParams::velocity_unit() const { return std::sqrt(hbar * coupling / mass); }

double ModelParams::free_velocity() const { return std::sqrt(2.0 * energy / mass); }

void ModelParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidParameter("mass must be > 0");
  if (!(energy > 0.0) || !std::isfinite(energy)) throw InvalidParameter("energy must be > 0");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidParameter("hbar must be > 0");
  if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
    throw InvalidParameter("step potential must be finite");
  if (coupling == 0.0 && delta() == 0.0)
    throw SingularInput("J0 = 0 with Delta = 0 gives k2 = 0");
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw InvalidParameter("coupling J0 must be > 0");
}

double WavefunctionSample::population_down() const {
  const double total = density_up() + density_down();
  if (!(total > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return density_down() / total;
}

Wavenumbers wavenumbers(const ModelParams& p) {
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  return {k.k0 / n.x0, k.k1 / n.x0, k.k2 / n.x0, k.branch};
}

WavefunctionSample wavefunctions(const ModelParams& p, double x) {
  require_position(x);
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  const double xn = x / n.x0;
  const cplx a = upper_prefactor(k);
  const cplx e = std::exp(I * k.k2 * xn);
  return {x, a * std::cos(k.k1 * xn) * e, -I * a * std::sin(k.k1 * xn) * e};
}

BoundaryMatch boundary_match(const ModelParams& p) {
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  const UpperField f = upper_field(k, 0.0);
  // x < 0: incoming * exp(i k0 x) + r exp(-i k0 x); match value and slope.
  const cplx slope_term = f.dpsi / (I * k.k0);
  const cplx incoming = 0.5 * (f.psi + slope_term);
  const cplx r = 0.5 * (f.psi - slope_term);
  const double residual = std::max({std::abs(incoming - 1.0), std::abs(1.0 + r - f.psi),
                                    std::abs(I * k.k0 * (1.0 - r) - f.dpsi) / k.k0});
  return {r, residual};
}

double relative_population(const ModelParams& p, double x) {
  require_position(x);
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  const cplx z = k.k1 * (x / n.x0);
  // |sin z|^2 = sin^2 a + sinh^2 b, |cos z|^2 = cos^2 a + sinh^2 b, z = a + ib
  const double sa = std::sin(z.real());
  const double sh = std::sinh(z.imag());
  double pop;
  if (std::abs(z.imag()) < 1.0) {
    pop = (sa * sa + sh * sh) / (1.0 + 2.0 * sh * sh);
  } else {
    const double inv = 1.0 / (sh * sh);
    pop = (sa * sa * inv + 1.0) / (inv + 2.0);
  }
  assert(pop >= 0.0 && pop <= 1.0);
  return pop;
}

ModalEnergies modal_energies(const ModelParams& p) {
  const Natural n = to_natural(p);
  const NaturalWavenumbers k = natural_wavenumbers(n);
  const cplx e1 = 0.5 * k.k1 * k.k1;
  const cplx e2 = 0.5 * k.k2 * k.k2;
  const cplx kinetic = e1 + e2 - 1.0;
  const double scale = std::max({1.0, n.energy, std::abs(n.step)});
  if (std::abs(kinetic + n.step - n.energy) > 1e-10 * scale)
    throw InvariantViolation("E1 + E2 - hbar J0 + V0 != E");
  const double unit = p.hbar * p.coupling;
  return {e1 * unit, e2 * unit, kinetic * unit,
          n.delta.real() < 1.0 ? Regime::ClassicallyForbidden : Regime::ClassicallyAllowed};
}

double clock_velocity(const ModelParams& p) {
  const Natural n = to_natural(p);
  return n.velocity_unit / std::abs(natural_wavenumbers(n).k1);
}

double phase_velocity(const ModelParams& p, double x) {
  return p.velocity_unit() * upper_log_derivative(p, x).imag();
}

double momentum_velocity(const ModelParams& p, double x) {
  return p.velocity_unit() * std::abs(upper_log_derivative(p, x));
}

VelocityReport velocities(const ModelParams& p) {
  return {clock_velocity(p), phase_velocity(p, 0.0), momentum_velocity(p, 0.0), p.free_velocity()};
}

double buttiker_landauer_time(const ModelParams& p, double width) {
  if (!(width > 0.0)) throw InvalidParameter("barrier width must be > 0");
  return width / clock_velocity(p);
}

double imaginary_step_speed_ratio(double v0i_over_e) {
  if (!std::isfinite(v0i_over_e)) throw InvalidParameter("V0i/E must be finite");
  return std::pow(1.0 + v0i_over_e * v0i_over_e, 0.25);
}

double schrodinger_residual(const ModelParams& p, double x) {
  return schrodinger_residual(p, wavenumbers(p), x);
}

double schrodinger_residual(const ModelParams& p, const Wavenumbers& k, double x) {
  require_position(x);
  const Natural n = to_natural(p);
  const double xn = x / n.x0;
  const cplx k1 = k.k1 * n.x0;
  const cplx k2 = k.k2 * n.x0;
  // Common factor A exp(i k2 x) removed from both amplitudes.
  const cplx c = std::cos(k1 * xn);
  const cplx s = std::sin(k1 * xn);
  const cplx up = c;
  const cplx down = -I * s;
  const cplx ksum = k1 * k1 + k2 * k2;
  const cplx kprod = k1 * k2;
  const cplx up_dd = -ksum * c - 2.0 * I * kprod * s;
  const cplx down_dd = I * ksum * s + 2.0 * kprod * c;
  const cplx res_up = n.energy * up - (-0.5 * up_dd + n.step * up + (down - up));
  const cplx res_down = n.energy * down - (-0.5 * down_dd + n.step * down + (up - down));
  const double norm = n.energy * (std::abs(up) + std::abs(down));
  return std::max(std::abs(res_up), std::abs(res_down)) / norm;
}

}  // namespace wgclock
