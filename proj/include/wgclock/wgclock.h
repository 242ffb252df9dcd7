/*
 * wgclock C API.
 *
 * Coupled-waveguide step solution with clock-based velocities, transfer-matrix
 * barrier scattering, and the wave-packet sweep over imaginary barriers.
 *
 * Every fallible call returns a wgc_status; on failure a thread-local message
 * is available from wgc_last_error(). Handles are opaque and owned by the
 * caller, who releases them with the matching *_destroy function. Handles are
 * immutable after creation and may be shared across threads, except
 * wgc_sim_config which must not be mutated concurrently.
 */
#ifndef WGCLOCK_WGCLOCK_H
#define WGCLOCK_WGCLOCK_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(WGCLOCK_BUILDING)
#    define WGC_API __declspec(dllexport)
#  else
#    define WGC_API __declspec(dllimport)
#  endif
#else
#  define WGC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wgc_status {
  WGC_OK = 0,
  WGC_ERR_INVALID_ARGUMENT = 1,
  WGC_ERR_SINGULAR = 2,
  WGC_ERR_DOMAIN = 3,
  WGC_ERR_CONFIG = 4,
  WGC_ERR_BOUNDARY_CONTACT = 5,
  WGC_ERR_STEP_UNDERFLOW = 6,
  WGC_ERR_INVARIANT = 7,
  WGC_ERR_INTERNAL = 8
} wgc_status;

WGC_API const char* wgc_version(void);
WGC_API const char* wgc_last_error(void);
WGC_API const char* wgc_status_name(wgc_status status);

/* Physical constants used by the SI constructors. */
WGC_API double wgc_hbar(void);
WGC_API double wgc_mev(void);

/* ---- coupled waveguide model ------------------------------------------ */

typedef struct wgc_model wgc_model;

typedef enum wgc_branch { WGC_BRANCH_PLUS = 0, WGC_BRANCH_MINUS = 1 } wgc_branch;
typedef enum wgc_regime { WGC_CLASSICALLY_ALLOWED = 0, WGC_CLASSICALLY_FORBIDDEN = 1 } wgc_regime;

typedef struct wgc_wavenumbers {
  double k0;
  double k1_re, k1_im;
  double k2_re, k2_im;
  wgc_branch branch;
} wgc_wavenumbers;

typedef struct wgc_wavefunction {
  double x;
  double up_re, up_im;
  double down_re, down_im;
} wgc_wavefunction;

typedef struct wgc_modal_energies {
  double e1_re, e1_im;
  double e2_re, e2_im;
  double kinetic_re, kinetic_im;
  wgc_regime regime;
} wgc_modal_energies;

typedef struct wgc_velocities {
  double clock;
  double phase_at_step;
  double momentum_at_step;
  double free;
} wgc_velocities;

/* SI units: kg, J, J (complex step), rad/s. */
WGC_API wgc_status wgc_model_create(double mass, double energy, double step_re, double step_im,
                                    double coupling, wgc_model** out);
/* hbar = m = J0 = 1; energy mismatch Delta given directly. */
WGC_API wgc_status wgc_model_create_natural(double delta_re, double delta_im, double energy,
                                            wgc_model** out);
WGC_API void wgc_model_destroy(wgc_model* model);

WGC_API wgc_status wgc_model_delta(const wgc_model* model, double* re, double* im);
WGC_API wgc_status wgc_model_x0(const wgc_model* model, double* out);
WGC_API wgc_status wgc_model_velocity_unit(const wgc_model* model, double* out);

WGC_API wgc_status wgc_wavenumbers_eval(const wgc_model* model, wgc_wavenumbers* out);
WGC_API wgc_status wgc_wavefunctions_eval(const wgc_model* model, double x, wgc_wavefunction* out);
WGC_API wgc_status wgc_relative_population(const wgc_model* model, double x, double* out);
WGC_API wgc_status wgc_modal_energies_eval(const wgc_model* model, wgc_modal_energies* out);
WGC_API wgc_status wgc_boundary_match(const wgc_model* model, double* r_re, double* r_im,
                                      double* residual);
WGC_API wgc_status wgc_velocity_clock(const wgc_model* model, double* out);
WGC_API wgc_status wgc_velocity_phase(const wgc_model* model, double x, double* out);
WGC_API wgc_status wgc_velocity_momentum(const wgc_model* model, double x, double* out);
WGC_API wgc_status wgc_velocities_eval(const wgc_model* model, wgc_velocities* out);
WGC_API wgc_status wgc_schrodinger_residual(const wgc_model* model, double x, double* out);
WGC_API wgc_status wgc_buttiker_landauer_time(const wgc_model* model, double width, double* out);

/* (1 + (V0i/E)^2)^(1/4). */
WGC_API wgc_status wgc_imaginary_step_speed_ratio(double v0i_over_e, double* out);

/* ---- barrier scattering ------------------------------------------------ */

typedef struct wgc_scattering {
  double t_re, t_im;
  double r_re, r_im;
  double flux_transmission;
} wgc_scattering;

WGC_API wgc_status wgc_transfer_matrix(double mass, double energy, double v_re, double v_im,
                                       double width, wgc_scattering* out);

/* ---- wave-packet simulation -------------------------------------------- */

typedef struct wgc_sim_config wgc_sim_config;
typedef struct wgc_sweep wgc_sweep;

typedef struct wgc_sweep_point {
  double v0i_over_e;
  double delta_x;
  double v_over_v0;
  double v0_over_v;
  double v0_over_v_error;
  double transmission;
  double transmission_extrapolated;
  double reference_v0_over_v;
  double reference_transmission;
} wgc_sweep_point;

typedef struct wgc_trajectory_sample {
  double t;
  double com;
  double norm;
  double width;
} wgc_trajectory_sample;

/* Standard parameters (m = 6.5e-36 kg, E = 0.2 meV, b = 10 um) with the
   default run geometry for sigma and dx (metres). */
WGC_API wgc_status wgc_sim_config_create_standard(double sigma, double grid_spacing,
                                                  wgc_sim_config** out);
/* "key = value" text, see sim_config_io.hpp for keys. */
WGC_API wgc_status wgc_sim_config_parse(const char* text, wgc_sim_config** out);
WGC_API wgc_status wgc_sim_config_load(const char* path, wgc_sim_config** out);
WGC_API void wgc_sim_config_destroy(wgc_sim_config* cfg);
/* Canonical text form. Writes at most capacity bytes including the
   terminator and stores the required size (without terminator) in *length. */
WGC_API wgc_status wgc_sim_config_format(const wgc_sim_config* cfg, char* buffer, size_t capacity,
                                         size_t* length);
WGC_API wgc_status wgc_sim_config_grid_size(const wgc_sim_config* cfg, size_t* out);

WGC_API wgc_status wgc_sweep_run(const wgc_sim_config* cfg, const double* v0i_over_e, size_t count,
                                 int refine, unsigned threads, wgc_sweep** out);
WGC_API void wgc_sweep_destroy(wgc_sweep* sweep);
/* Points: free baseline first, then the requested non-zero ratios. */
WGC_API wgc_status wgc_sweep_point_count(const wgc_sweep* sweep, size_t* out);
WGC_API wgc_status wgc_sweep_point_get(const wgc_sweep* sweep, size_t index, wgc_sweep_point* out);
WGC_API wgc_status wgc_sweep_broadening_pct(const wgc_sweep* sweep, double* out);
/* One pass per resolution (dx, then dx/2 when refined). */
WGC_API wgc_status wgc_sweep_pass_count(const wgc_sweep* sweep, size_t* out);
WGC_API wgc_status wgc_sweep_pass_grid_spacing(const wgc_sweep* sweep, size_t pass, double* out);
WGC_API wgc_status wgc_sweep_trajectory_length(const wgc_sweep* sweep, size_t pass, size_t point,
                                               size_t* out);
WGC_API wgc_status wgc_sweep_trajectory_get(const wgc_sweep* sweep, size_t pass, size_t point,
                                            size_t sample, wgc_trajectory_sample* out);

#ifdef __cplusplus
}
#endif

#endif /* WGCLOCK_WGCLOCK_H */
