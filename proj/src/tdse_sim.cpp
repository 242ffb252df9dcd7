#include "wgclock/tdse_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgclock/constants.hpp"
#include "wgclock/errors.hpp"

namespace wgclock {

namespace {

constexpr double kEdgePopulationLimit = 1e-6;
constexpr double kFaceAlignment = 1e-6;  // in cells
// |R(i z)| <= 1 for classic RK4 up to z = 2 sqrt(2).
constexpr double kStabilityFraction = 0.9 * 2.8284271247461903;

double cells_between(double from, double to, double dx) { return (to - from) / dx; }

bool on_face(double cells) { return std::abs(cells - std::round(cells)) < kFaceAlignment; }

// Split real/imaginary storage with one zero ghost cell at each end; the
// ghosts realise the hard walls.
struct Field {
  explicit Field(std::size_t n = 0) : re(n + 2, 0.0), im(n + 2, 0.0) {}
  std::size_t size() const { return re.size() - 2; }
  void swap(Field& o) noexcept {
    re.swap(o.re);
    im.swap(o.im);
  }
  std::vector<double> re, im;
};

// Right-hand side d psi/dt = i a (psi[n+1] + psi[n-1]) + diag[n] psi[n],
// with a = hbar/(2 m dx^2) and diag = -2 i a - i V/hbar, fused with the RK4
// accumulation.
class Rk4Kernel {
 public:
  Rk4Kernel(const SimConfig& cfg, const std::vector<cplx>& potential)
      : n_(potential.size()),
        a_(constants::hbar / (2.0 * cfg.mass * cfg.grid_spacing * cfg.grid_spacing)),
        diag_re_(n_ + 2, 0.0),
        diag_im_(n_ + 2, 0.0),
        acc_(n_),
        ping_(n_),
        pong_(n_) {
    double vmax = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      // -i V / hbar = (Im V - i Re V) / hbar
      diag_re_[i + 1] = potential[i].imag() / constants::hbar;
      diag_im_[i + 1] = -2.0 * a_ - potential[i].real() / constants::hbar;
      vmax = std::max(vmax, std::abs(potential[i]) / constants::hbar);
    }
    dt_max_ = kStabilityFraction / (4.0 * a_ + vmax);
  }

  double max_step() const { return dt_max_; }

  // out = RK4 step of y over dt; out may not alias y.
  void step(const Field& y, double dt, Field& out) {
    stage(y, y, 0.5 * dt, dt / 6.0, y, acc_, ping_);
    stage(y, ping_, 0.5 * dt, dt / 3.0, acc_, acc_, pong_);
    stage(y, pong_, dt, dt / 3.0, acc_, acc_, ping_);
    stage(y, ping_, 0.0, dt / 6.0, acc_, out, pong_);
  }

 private:
  // acc_out = acc_in + w_acc k(src); next = y + w_next k(src).
  void stage(const Field& y, const Field& src, double w_next, double w_acc, const Field& acc_in,
             Field& acc_out, Field& next) const {
    const double a = a_;
    const double* __restrict dre = diag_re_.data();
    const double* __restrict dim = diag_im_.data();
    const double* __restrict sre = src.re.data();
    const double* __restrict sim = src.im.data();
    const double* __restrict yre = y.re.data();
    const double* __restrict yim = y.im.data();
    const double* ain_re = acc_in.re.data();
    const double* ain_im = acc_in.im.data();
    double* aout_re = acc_out.re.data();
    double* aout_im = acc_out.im.data();
    double* __restrict nre = next.re.data();
    double* __restrict nim = next.im.data();
    const std::size_t end = n_ + 1;
#pragma GCC ivdep
    for (std::size_t j = 1; j < end; ++j) {
      const double kre = -a * (sim[j - 1] + sim[j + 1]) + dre[j] * sre[j] - dim[j] * sim[j];
      const double kim = a * (sre[j - 1] + sre[j + 1]) + dre[j] * sim[j] + dim[j] * sre[j];
      aout_re[j] = ain_re[j] + w_acc * kre;
      aout_im[j] = ain_im[j] + w_acc * kim;
      nre[j] = yre[j] + w_next * kre;
      nim[j] = yim[j] + w_next * kim;
    }
  }

  std::size_t n_;
  double a_;
  double dt_max_ = 0.0;
  std::vector<double> diag_re_, diag_im_;
  Field acc_, ping_, pong_;
};

double field_norm(const Field& f) {
  double s = 0.0;
  for (std::size_t j = 1; j <= f.size(); ++j) s += f.re[j] * f.re[j] + f.im[j] * f.im[j];
  return s;
}

double field_distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t j = 1; j <= a.size(); ++j) {
    const double dr = a.re[j] - b.re[j];
    const double di = a.im[j] - b.im[j];
    s += dr * dr + di * di;
  }
  return s;
}

std::vector<cplx> to_complex(const Field& f) {
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {f.re[i + 1], f.im[i + 1]};
  return out;
}

double squared_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return s;
}

double edge_fraction(std::span<const cplx> psi) {
  const std::size_t n = psi.size();
  double edge = 0.0;
  for (std::size_t i = 0; i < 2 && i < n; ++i) edge += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
  const double total = squared_norm(psi);
  return total > 0.0 ? edge / total : 0.0;
}

void record(const SimConfig& cfg, double t, std::span<const cplx> psi, Trajectory& traj) {
  const RegionMoments m = density_moments(cfg, psi);
  traj.times.push_back(t);
  traj.com.push_back(m.com);
  traj.norm.push_back(m.norm);
  traj.width.push_back(m.width);
  if (edge_fraction(psi) > kEdgePopulationLimit)
    throw BoundaryContact("wave packet reached the grid boundary at t = " + std::to_string(t));
}

}  // namespace

SimConfig SimConfig::standard(double v0i_over_e, double sigma, double grid_spacing) {
  SimConfig cfg;
  cfg.mass = 6.5e-36;
  cfg.energy = 0.2 * constants::meV;
  cfg.barrier_v0i = v0i_over_e * cfg.energy;
  cfg.barrier_width = 10e-6;
  cfg.barrier_center = 0.0;
  cfg.sigma = sigma;
  cfg.grid_spacing = grid_spacing;
  cfg.apply_default_geometry();
  return cfg;
}

void SimConfig::apply_default_geometry() {
  const double dx = grid_spacing;
  const double b = barrier_width;
  initial_center = barrier_center - 4.0 * sigma - 0.5 * b;
  const double travel = 7.0 * sigma + b;
  total_time = travel / free_velocity();
  const double left_needed = initial_center - 8.0 * sigma;
  const double right_needed = initial_center + travel + 8.0 * sigma + b;
  const double cells_left = std::ceil(cells_between(left_needed, barrier_left(), dx) - kFaceAlignment);
  const double cells_right = std::ceil(cells_between(barrier_right(), right_needed, dx) - kFaceAlignment);
  grid_start = barrier_left() - cells_left * dx;
  grid_extent = (cells_left + cells_right) * dx + b;
}

double SimConfig::carrier_wavenumber() const { return std::sqrt(2.0 * mass * energy) / constants::hbar; }

double SimConfig::free_velocity() const { return std::sqrt(2.0 * energy / mass); }

std::size_t SimConfig::grid_size() const {
  return static_cast<std::size_t>(std::llround(grid_extent / grid_spacing));
}

double SimConfig::position(std::size_t i) const {
  return grid_start + (static_cast<double>(i) + 0.5) * grid_spacing;
}

void SimConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be > 0");
  };
  positive(mass, "mass");
  positive(energy, "energy");
  positive(barrier_width, "barrier_width");
  positive(sigma, "sigma");
  positive(grid_extent, "grid_extent");
  positive(grid_spacing, "grid_spacing");
  positive(total_time, "total_time");
  positive(rk4_tolerance, "rk4_tolerance");
  if (!std::isfinite(barrier_v0i)) throw ConfigError("barrier_v0i must be finite");
  if (output_samples < 1) throw ConfigError("output_samples must be >= 1");
  if (!on_face(grid_extent / grid_spacing))
    throw ConfigError("grid_extent must be a whole number of cells");
  if (carrier_wavenumber() * grid_spacing >= 0.5)
    throw ConfigError("grid_spacing does not resolve the carrier: k0 dx >= 0.5");
  const double grid_end = grid_start + grid_extent;
  if (barrier_left() <= grid_start + grid_spacing || barrier_right() >= grid_end - grid_spacing)
    throw ConfigError("barrier lies outside the grid");
  if (!on_face(cells_between(grid_start, barrier_left(), grid_spacing)) ||
      !on_face(cells_between(grid_start, barrier_right(), grid_spacing)))
    throw ConfigError("barrier edges must fall on cell faces");
  const double travel = free_velocity() * total_time;
  const double slack = kFaceAlignment * grid_spacing;
  if (initial_center - 8.0 * sigma < grid_start - slack ||
      initial_center + travel + 8.0 * sigma > grid_end + slack)
    throw ConfigError("grid too small: needs 8 sigma clearance around the packet path");
}

WavePacketState init_gaussian(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.grid_size();
  const double k0 = cfg.carrier_wavenumber();
  WavePacketState state;
  state.amplitudes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cfg.position(i);
    const double u = (x - cfg.initial_center) / (2.0 * cfg.sigma);
    state.amplitudes[i] = std::exp(-u * u) * std::polar(1.0, k0 * x);
  }
  const double scale = 1.0 / std::sqrt(squared_norm(state.amplitudes) * cfg.grid_spacing);
  for (cplx& z : state.amplitudes) z *= scale;
  return state;
}

std::vector<cplx> potential_profile(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.grid_size();
  std::vector<cplx> v(n);
  const cplx inside{0.0, cfg.barrier_v0i};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cfg.position(i);
    if (x > cfg.barrier_left() && x < cfg.barrier_right()) v[i] = inside;
  }
  return v;
}

RegionMoments density_moments(const SimConfig& cfg, std::span<const cplx> psi, double from) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = cfg.position(i);
    if (x < from) continue;
    const double rho = std::norm(psi[i]);
    m0 += rho;
    m1 += rho * x;
  }
  RegionMoments m;
  m.norm = m0 * cfg.grid_spacing;
  if (!(m0 > 0.0)) return m;
  m.com = m1 / m0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = cfg.position(i);
    if (x < from) continue;
    const double d = x - m.com;
    m2 += std::norm(psi[i]) * d * d;
  }
  m.width = std::sqrt(m2 / m0);
  return m;
}

PropagationResult propagate(const SimConfig& cfg) {
  PropagationResult result;
  const WavePacketState initial = init_gaussian(cfg);
  Rk4Kernel kernel(cfg, potential_profile(cfg));
  const std::size_t n = initial.amplitudes.size();

  Field psi(n), full(n), half(n), twice(n);
  for (std::size_t i = 0; i < n; ++i) {
    psi.re[i + 1] = initial.amplitudes[i].real();
    psi.im[i + 1] = initial.amplitudes[i].imag();
  }
  double t = 0.0;

  const double dt_max = kernel.max_step();
  const double dt_floor = 1e-6 * dt_max;
  const double interval = cfg.total_time / cfg.output_samples;
  double dt = dt_max;

  record(cfg, t, initial.amplitudes, result.trajectory);
  for (int sample = 1; sample <= cfg.output_samples; ++sample) {
    const double target = sample == cfg.output_samples ? cfg.total_time : sample * interval;
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = dt >= remaining;
      const double h = clipped ? remaining : dt;

      kernel.step(psi, h, full);
      kernel.step(psi, 0.5 * h, half);
      kernel.step(half, 0.5 * h, twice);

      // Richardson estimate of the local error of the doubled step, per unit
      // of the stability-limited step.
      const double err = std::sqrt(field_distance(twice, full) / field_norm(twice)) / 15.0;
      const double allowed = cfg.rk4_tolerance * h / dt_max;
      const double ratio = err > 0.0 ? allowed / err : std::numeric_limits<double>::infinity();
      const double factor = std::clamp(0.9 * std::pow(ratio, 0.25), 0.2, 2.0);

      if (err <= allowed) {
        psi.swap(twice);
        t = clipped ? target : t + h;
        ++result.accepted_steps;
        if (!clipped) dt = std::min(dt_max, h * factor);
      } else {
        ++result.rejected_steps;
        dt = h * factor;
        if (dt < dt_floor) throw StepUnderflow("adaptive time step fell below its floor");
      }
    }
    record(cfg, t, to_complex(psi), result.trajectory);
  }

  result.final_state.t = t;
  result.final_state.amplitudes = to_complex(psi);
  result.transmitted = density_moments(cfg, result.final_state.amplitudes, cfg.barrier_right());
  return result;
}

SweepResult extract_velocity(const SimConfig& cfg, std::span<const RunSummary> runs) {
  const auto baseline = std::find_if(runs.begin(), runs.end(),
                                     [](const RunSummary& r) { return r.v0i_over_e == 0.0; });
  if (baseline == runs.end()) throw InvalidParameter("sweep needs a V0i = 0 baseline run");
  const double clearance = cfg.barrier_right() + 2.0 * cfg.sigma;
  const double b = cfg.barrier_width;

  SweepResult out;
  for (const RunSummary& run : runs) {
    if (!(run.transmitted.norm > 0.0) || run.transmitted.com < clearance)
      throw InvariantViolation("packet has not cleared the barrier (V0i/E = " +
                               std::to_string(run.v0i_over_e) + ")");
    const double dx = run.transmitted.com - baseline->transmitted.com;
    out.v0i_over_e.push_back(run.v0i_over_e);
    out.delta_x.push_back(dx);
    out.v_over_v0.push_back(1.0 / (1.0 - dx / b));
    out.transmission.push_back(run.transmitted.norm / baseline->transmitted.norm);
  }
  out.broadening_pct = 100.0 * (baseline->final_width / cfg.sigma - 1.0);
  return out;
}

}  // namespace wgclock
