#include "wgclock/wgclock.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "wgclock/constants.hpp"
#include "wgclock/errors.hpp"
#include "wgclock/oracles.hpp"
#include "wgclock/sim_config_io.hpp"
#include "wgclock/tdse_sim.hpp"
#include "wgclock/version.hpp"
#include "wgclock/waveguide_model.hpp"

struct wgc_model {
  wgclock::ModelParams params;
};

struct wgc_sim_config {
  wgclock::SimConfig cfg;
};

struct wgc_sweep {
  wgclock::SweepReport report;
};

namespace {

thread_local std::string last_error;

template <class F>
wgc_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return WGC_OK;
  } catch (const wgclock::InvalidParameter& e) {
    last_error = e.what();
    return WGC_ERR_INVALID_ARGUMENT;
  } catch (const wgclock::SingularInput& e) {
    last_error = e.what();
    return WGC_ERR_SINGULAR;
  } catch (const wgclock::DomainError& e) {
    last_error = e.what();
    return WGC_ERR_DOMAIN;
  } catch (const wgclock::ConfigError& e) {
    last_error = e.what();
    return WGC_ERR_CONFIG;
  } catch (const wgclock::BoundaryContact& e) {
    last_error = e.what();
    return WGC_ERR_BOUNDARY_CONTACT;
  } catch (const wgclock::StepUnderflow& e) {
    last_error = e.what();
    return WGC_ERR_STEP_UNDERFLOW;
  } catch (const wgclock::InvariantViolation& e) {
    last_error = e.what();
    return WGC_ERR_INVARIANT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WGC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WGC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return WGC_ERR_INTERNAL;
  }
}

template <class... P>
void require(const P*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw wgclock::InvalidParameter("null pointer argument");
}

const wgclock::SweepReport& report_of(const wgc_sweep* s) {
  require(s);
  return s->report;
}

}  // namespace

extern "C" {

const char* wgc_version(void) { return wgclock::kVersion; }

const char* wgc_last_error(void) { return last_error.c_str(); }

const char* wgc_status_name(wgc_status status) {
  switch (status) {
    case WGC_OK: return "ok";
    case WGC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WGC_ERR_SINGULAR: return "singular input";
    case WGC_ERR_DOMAIN: return "domain error";
    case WGC_ERR_CONFIG: return "config error";
    case WGC_ERR_BOUNDARY_CONTACT: return "boundary contact";
    case WGC_ERR_STEP_UNDERFLOW: return "step underflow";
    case WGC_ERR_INVARIANT: return "invariant violation";
    case WGC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

double wgc_hbar(void) { return wgclock::constants::hbar; }
double wgc_mev(void) { return wgclock::constants::meV; }

wgc_status wgc_model_create(double mass, double energy, double step_re, double step_im,
                            double coupling, wgc_model** out) {
  return guarded([&] {
    require(out);
    *out = nullptr;
    wgclock::ModelParams p;
    p.mass = mass;
    p.energy = energy;
    p.step = {step_re, step_im};
    p.coupling = coupling;
    p.validate();
    *out = new wgc_model{p};
  });
}

wgc_status wgc_model_create_natural(double delta_re, double delta_im, double energy,
                                    wgc_model** out) {
  return guarded([&] {
    require(out);
    *out = nullptr;
    const auto p = wgclock::ModelParams::natural({delta_re, delta_im}, energy);
    p.validate();
    *out = new wgc_model{p};
  });
}

void wgc_model_destroy(wgc_model* model) { delete model; }

wgc_status wgc_model_delta(const wgc_model* model, double* re, double* im) {
  return guarded([&] {
    require(model, re, im);
    const auto d = model->params.delta();
    *re = d.real();
    *im = d.imag();
  });
}

wgc_status wgc_model_x0(const wgc_model* model, double* out) {
  return guarded([&] {
    require(model, out);
    *out = model->params.x0();
  });
}

wgc_status wgc_model_velocity_unit(const wgc_model* model, double* out) {
  return guarded([&] {
    require(model, out);
    *out = model->params.velocity_unit();
  });
}

wgc_status wgc_wavenumbers_eval(const wgc_model* model, wgc_wavenumbers* out) {
  return guarded([&] {
    require(model, out);
    const auto k = wgclock::wavenumbers(model->params);
    *out = {k.k0, k.k1.real(), k.k1.imag(), k.k2.real(), k.k2.imag(),
            k.branch == wgclock::Branch::Plus ? WGC_BRANCH_PLUS : WGC_BRANCH_MINUS};
  });
}

wgc_status wgc_wavefunctions_eval(const wgc_model* model, double x, wgc_wavefunction* out) {
  return guarded([&] {
    require(model, out);
    const auto w = wgclock::wavefunctions(model->params, x);
    *out = {w.x, w.psi_up.real(), w.psi_up.imag(), w.psi_down.real(), w.psi_down.imag()};
  });
}

wgc_status wgc_relative_population(const wgc_model* model, double x, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::relative_population(model->params, x);
  });
}

wgc_status wgc_modal_energies_eval(const wgc_model* model, wgc_modal_energies* out) {
  return guarded([&] {
    require(model, out);
    const auto e = wgclock::modal_energies(model->params);
    *out = {e.e1.real(), e.e1.imag(), e.e2.real(), e.e2.imag(), e.kinetic.real(), e.kinetic.imag(),
            e.classification == wgclock::Regime::ClassicallyForbidden ? WGC_CLASSICALLY_FORBIDDEN
                                                                      : WGC_CLASSICALLY_ALLOWED};
  });
}

wgc_status wgc_boundary_match(const wgc_model* model, double* r_re, double* r_im, double* residual) {
  return guarded([&] {
    require(model, r_re, r_im, residual);
    const auto m = wgclock::boundary_match(model->params);
    *r_re = m.reflection.real();
    *r_im = m.reflection.imag();
    *residual = m.continuity_residual;
  });
}

wgc_status wgc_velocity_clock(const wgc_model* model, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::clock_velocity(model->params);
  });
}

wgc_status wgc_velocity_phase(const wgc_model* model, double x, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::phase_velocity(model->params, x);
  });
}

wgc_status wgc_velocity_momentum(const wgc_model* model, double x, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::momentum_velocity(model->params, x);
  });
}

wgc_status wgc_velocities_eval(const wgc_model* model, wgc_velocities* out) {
  return guarded([&] {
    require(model, out);
    const auto v = wgclock::velocities(model->params);
    *out = {v.clock, v.phase_at_step, v.momentum_at_step, v.free};
  });
}

wgc_status wgc_schrodinger_residual(const wgc_model* model, double x, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::schrodinger_residual(model->params, x);
  });
}

wgc_status wgc_buttiker_landauer_time(const wgc_model* model, double width, double* out) {
  return guarded([&] {
    require(model, out);
    *out = wgclock::buttiker_landauer_time(model->params, width);
  });
}

wgc_status wgc_imaginary_step_speed_ratio(double v0i_over_e, double* out) {
  return guarded([&] {
    require(out);
    *out = wgclock::imaginary_step_speed_ratio(v0i_over_e);
  });
}

wgc_status wgc_transfer_matrix(double mass, double energy, double v_re, double v_im, double width,
                               wgc_scattering* out) {
  return guarded([&] {
    require(out);
    const auto s = wgclock::transfer_matrix_transmission({mass, energy, {v_re, v_im}, width});
    *out = {s.transmission.real(), s.transmission.imag(), s.reflection.real(), s.reflection.imag(),
            s.flux_transmission};
  });
}

wgc_status wgc_sim_config_create_standard(double sigma, double grid_spacing, wgc_sim_config** out) {
  return guarded([&] {
    require(out);
    *out = nullptr;
    auto cfg = wgclock::SimConfig::standard(0.0, sigma, grid_spacing);
    cfg.validate();
    *out = new wgc_sim_config{cfg};
  });
}

wgc_status wgc_sim_config_parse(const char* text, wgc_sim_config** out) {
  return guarded([&] {
    require(text, out);
    *out = nullptr;
    *out = new wgc_sim_config{wgclock::parse_sim_config(text)};
  });
}

wgc_status wgc_sim_config_load(const char* path, wgc_sim_config** out) {
  return guarded([&] {
    require(path, out);
    *out = nullptr;
    *out = new wgc_sim_config{wgclock::load_sim_config(path)};
  });
}

void wgc_sim_config_destroy(wgc_sim_config* cfg) { delete cfg; }

wgc_status wgc_sim_config_format(const wgc_sim_config* cfg, char* buffer, size_t capacity,
                                 size_t* length) {
  return guarded([&] {
    require(cfg, length);
    const std::string text = wgclock::format_sim_config(cfg->cfg);
    *length = text.size();
    if (buffer && capacity > 0) {
      const size_t n = text.size() < capacity ? text.size() : capacity - 1;
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

wgc_status wgc_sim_config_grid_size(const wgc_sim_config* cfg, size_t* out) {
  return guarded([&] {
    require(cfg, out);
    *out = cfg->cfg.grid_size();
  });
}

wgc_status wgc_sweep_run(const wgc_sim_config* cfg, const double* v0i_over_e, size_t count, int refine,
                         unsigned threads, wgc_sweep** out) {
  return guarded([&] {
    require(cfg, out);
    *out = nullptr;
    if (count > 0) require(v0i_over_e);
    wgclock::SweepOptions options;
    options.v0i_over_e.assign(v0i_over_e, v0i_over_e + count);
    options.refine = refine != 0;
    options.threads = threads;
    *out = new wgc_sweep{wgclock::run_sweep(cfg->cfg, options)};
  });
}

void wgc_sweep_destroy(wgc_sweep* sweep) { delete sweep; }

wgc_status wgc_sweep_point_count(const wgc_sweep* sweep, size_t* out) {
  return guarded([&] {
    require(out);
    *out = report_of(sweep).points.size();
  });
}

wgc_status wgc_sweep_point_get(const wgc_sweep* sweep, size_t index, wgc_sweep_point* out) {
  return guarded([&] {
    require(out);
    const auto& pts = report_of(sweep).points;
    if (index >= pts.size()) throw wgclock::InvalidParameter("sweep point index out of range");
    const auto& p = pts[index];
    *out = {p.v0i_over_e,   p.delta_x,      p.v_over_v0,
            p.v0_over_v,    p.v0_over_v_error, p.transmission,
            p.transmission_extrapolated, p.reference_v0_over_v, p.reference_transmission};
  });
}

wgc_status wgc_sweep_broadening_pct(const wgc_sweep* sweep, double* out) {
  return guarded([&] {
    require(out);
    *out = report_of(sweep).broadening_pct;
  });
}

wgc_status wgc_sweep_pass_count(const wgc_sweep* sweep, size_t* out) {
  return guarded([&] {
    require(out);
    *out = report_of(sweep).passes.size();
  });
}

wgc_status wgc_sweep_pass_grid_spacing(const wgc_sweep* sweep, size_t pass, double* out) {
  return guarded([&] {
    require(out);
    const auto& r = report_of(sweep);
    if (pass >= r.grid_spacings.size()) throw wgclock::InvalidParameter("pass index out of range");
    *out = r.grid_spacings[pass];
  });
}

wgc_status wgc_sweep_trajectory_length(const wgc_sweep* sweep, size_t pass, size_t point, size_t* out) {
  return guarded([&] {
    require(out);
    const auto& r = report_of(sweep);
    if (pass >= r.trajectories.size() || point >= r.trajectories[pass].size())
      throw wgclock::InvalidParameter("trajectory index out of range");
    *out = r.trajectories[pass][point].times.size();
  });
}

wgc_status wgc_sweep_trajectory_get(const wgc_sweep* sweep, size_t pass, size_t point, size_t sample,
                                    wgc_trajectory_sample* out) {
  return guarded([&] {
    require(out);
    const auto& r = report_of(sweep);
    if (pass >= r.trajectories.size() || point >= r.trajectories[pass].size())
      throw wgclock::InvalidParameter("trajectory index out of range");
    const auto& t = r.trajectories[pass][point];
    if (sample >= t.times.size()) throw wgclock::InvalidParameter("sample index out of range");
    *out = {t.times[sample], t.com[sample], t.norm[sample], t.width[sample]};
  });
}

}  // extern "C"
