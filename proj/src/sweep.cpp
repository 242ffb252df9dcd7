#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wgclock/errors.hpp"
#include "wgclock/oracles.hpp"
#include "wgclock/tdse_sim.hpp"
#include "wgclock/waveguide_model.hpp"

namespace wgclock {

namespace {

struct Job {
  SimConfig cfg;
  RunSummary summary;
  Trajectory trajectory;
};

// Each job owns its state; results land in their own slot.
void run_jobs(std::vector<Job>& jobs, unsigned threads) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        PropagationResult r = propagate(jobs[i].cfg);
        const RegionMoments full = density_moments(jobs[i].cfg, r.final_state.amplitudes);
        jobs[i].summary.transmitted = r.transmitted;
        jobs[i].summary.final_width = full.width;
        jobs[i].trajectory = std::move(r.trajectory);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepReport run_sweep(const SimConfig& cfg, const SweepOptions& options) {
  std::vector<double> ratios{0.0};
  for (double r : options.v0i_over_e) {
    if (!std::isfinite(r)) throw ConfigError("V0i/E values must be finite");
    if (r != 0.0) ratios.push_back(r);
  }

  SweepReport report;
  report.grid_spacings.push_back(cfg.grid_spacing);
  if (options.refine) report.grid_spacings.push_back(0.5 * cfg.grid_spacing);

  std::vector<Job> jobs;
  for (double dx : report.grid_spacings) {
    SimConfig pass = cfg;
    pass.grid_spacing = dx;  // refinement keeps the physical geometry
    for (double r : ratios) {
      Job job{pass, {}, {}};
      job.cfg.barrier_v0i = r * cfg.energy;
      job.summary.v0i_over_e = r;
      job.cfg.validate();
      jobs.push_back(std::move(job));
    }
  }
  run_jobs(jobs, options.threads);

  const std::size_t per_pass = ratios.size();
  for (std::size_t p = 0; p < report.grid_spacings.size(); ++p) {
    std::vector<RunSummary> summaries;
    std::vector<Trajectory> trajectories;
    for (std::size_t i = 0; i < per_pass; ++i) {
      summaries.push_back(jobs[p * per_pass + i].summary);
      trajectories.push_back(std::move(jobs[p * per_pass + i].trajectory));
    }
    report.passes.push_back(extract_velocity(jobs[p * per_pass].cfg, summaries));
    report.trajectories.push_back(std::move(trajectories));
  }

  const SweepResult& fine = report.passes.back();
  const SweepResult& coarse = report.passes.front();
  report.broadening_pct = fine.broadening_pct;
  for (std::size_t i = 0; i < per_pass; ++i) {
    SweepPoint pt;
    pt.v0i_over_e = ratios[i];
    pt.delta_x = fine.delta_x[i];
    pt.v_over_v0 = fine.v_over_v0[i];
    pt.v0_over_v = 1.0 / fine.v_over_v0[i];
    pt.v0_over_v_error = 0.5 * std::abs(1.0 / fine.v_over_v0[i] - 1.0 / coarse.v_over_v0[i]);
    pt.transmission = fine.transmission[i];
    // Second-order scheme: fine + (fine - coarse) / 3.
    pt.transmission_extrapolated =
        options.refine ? (4.0 * fine.transmission[i] - coarse.transmission[i]) / 3.0 : fine.transmission[i];
    pt.reference_v0_over_v = 1.0 / imaginary_step_speed_ratio(ratios[i]);
    BarrierSpec barrier{cfg.mass, cfg.energy, {0.0, ratios[i] * cfg.energy}, cfg.barrier_width};
    pt.reference_transmission = transfer_matrix_transmission(barrier).flux_transmission;
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace wgclock
