// wgclock command-line front end. Emits coupled-waveguide dispersion,
// densities and velocities, and the wave-packet sweep, as CSV plus a
// key = value run manifest.
// Only the C API is used.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgclock/wgclock.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(wgc_status s, const char* what) {
  if (s == WGC_OK) return;
  const std::string msg = std::string(what) + ": " + wgc_status_name(s) + ": " + wgc_last_error();
  if (s == WGC_ERR_CONFIG || s == WGC_ERR_INVALID_ARGUMENT) throw ConfigFailure(msg);
  throw RuntimeFailure(msg);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ModelDeleter {
  void operator()(wgc_model* m) const { wgc_model_destroy(m); }
};
using ModelPtr = std::unique_ptr<wgc_model, ModelDeleter>;

ModelPtr natural_model(double delta, double energy) {
  wgc_model* m = nullptr;
  check(wgc_model_create_natural(delta, 0.0, energy, &m), "model");
  return ModelPtr(m);
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> out;
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * i / (steps - 1));
  return out;
}

// Ordered key = value manifest.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
      if (k == key) {
        v = value;
        return;
      }
    entries_.emplace_back(key, value);
  }
  void write(const fs::path& path) const {
    std::ofstream out(path);
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    if (!out) throw RuntimeFailure("cannot write " + path.string());
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFailure("cannot open manifest " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

struct Options {
  std::string out_dir = ".";
  double delta_min = -5.0;
  double delta_max = 5.0;
  int delta_steps = 500;
  double x_max = 10.0;
  int x_steps = 500;
  double energy = 1.0;  // units of hbar J0
  std::string config_path;
  std::string config_text;  // resolved, canonical form
  std::vector<double> v0i_over_e{-0.25, -0.5, -1.0, -1.5, -2.0};
  bool no_refine = false;
  unsigned threads = 1;
};

class Output {
 public:
  Output(const Options& o, std::string command) : dir_(o.out_dir), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigFailure("cannot create output directory " + dir_.string());
    start_ = std::chrono::steady_clock::now();
    manifest_.set("command", command_);
    manifest_.set("version", wgc_version());
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest_.set("started_at", stamp);
    manifest_.set("constant.hbar_Js", exact(wgc_hbar()));
    manifest_.set("constant.meV_J", exact(wgc_mev()));
  }

  Manifest& manifest() { return manifest_; }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream out(dir_ / name);
    if (!out) throw RuntimeFailure("cannot write " + (dir_ / name).string());
    return out;
  }

  void finish() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::string list;
    for (const auto& f : files_) list += (list.empty() ? "" : ",") + f;
    manifest_.set("outputs", list);
    manifest_.set("wall_clock_seconds", num(secs));
    manifest_.write(dir_ / (command_ + "_manifest.txt"));
  }

 private:
  fs::path dir_;
  std::string command_;
  Manifest manifest_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

void validate_delta_range(const Options& o) {
  if (!std::isfinite(o.delta_min) || !std::isfinite(o.delta_max) || o.delta_min > o.delta_max)
    throw ConfigFailure("invalid delta range");
  if (o.delta_steps < 1 || (o.delta_steps == 1) != (o.delta_min == o.delta_max))
    throw ConfigFailure("delta-steps must be >= 2 for a non-empty range");
}

void validate_x_range(const Options& o) {
  if (!std::isfinite(o.x_max) || o.x_max < 0.0) throw ConfigFailure("x-max must be finite and >= 0");
  if (o.x_steps < 1) throw ConfigFailure("x-steps must be >= 1");
  if (!(o.energy > 0.0) || !std::isfinite(o.energy)) throw ConfigFailure("energy must be > 0");
}

void echo_delta(Manifest& m, const Options& o) {
  m.set("param.delta_min", exact(o.delta_min));
  m.set("param.delta_max", exact(o.delta_max));
  m.set("param.delta_steps", std::to_string(o.delta_steps));
}

void cmd_dispersion(const Options& o) {
  validate_delta_range(o);
  Output out(o, "dispersion");
  echo_delta(out.manifest(), o);
  auto csv = out.open("dispersion.csv");
  csv << "delta_over_hbarJ0,re_k1,im_k1,re_k2,im_k2,re_E1,im_E1,re_E2,im_E2,branch\n";
  for (double d : linspace(o.delta_min, o.delta_max, o.delta_steps)) {
    const ModelPtr m = natural_model(d, 1.0);
    wgc_wavenumbers k;
    wgc_modal_energies e;
    check(wgc_wavenumbers_eval(m.get(), &k), "wavenumbers");
    check(wgc_modal_energies_eval(m.get(), &e), "modal energies");
    csv << num(d) << ',' << num(k.k1_re) << ',' << num(k.k1_im) << ',' << num(k.k2_re) << ','
        << num(k.k2_im) << ',' << num(e.e1_re) << ',' << num(e.e1_im) << ',' << num(e.e2_re) << ','
        << num(e.e2_im) << ',' << (k.branch == WGC_BRANCH_PLUS ? "plus" : "minus") << '\n';
  }
  out.finish();
}

void cmd_densities(const Options& o) {
  validate_delta_range(o);
  validate_x_range(o);
  Output out(o, "densities");
  echo_delta(out.manifest(), o);
  out.manifest().set("param.x_max", exact(o.x_max));
  out.manifest().set("param.x_steps", std::to_string(o.x_steps));
  out.manifest().set("param.energy", exact(o.energy));
  auto csv = out.open("densities.csv");
  csv << "delta_over_hbarJ0,x_over_x0,density_up,density_down,p_down\n";
  const std::vector<double> xs = linspace(0.0, o.x_max, o.x_steps);
  for (double d : linspace(o.delta_min, o.delta_max, o.delta_steps)) {
    const ModelPtr m = natural_model(d, o.energy);
    for (double x : xs) {
      wgc_wavefunction w;
      double p = 0.0;
      check(wgc_wavefunctions_eval(m.get(), x, &w), "wavefunctions");
      check(wgc_relative_population(m.get(), x, &p), "relative population");
      if (!(p >= 0.0 && p <= 1.0)) throw RuntimeFailure("p_down outside [0, 1]");
      csv << num(d) << ',' << num(x) << ',' << num(w.up_re * w.up_re + w.up_im * w.up_im) << ','
          << num(w.down_re * w.down_re + w.down_im * w.down_im) << ',' << num(p) << '\n';
    }
  }
  out.finish();
}

void cmd_velocities(const Options& o) {
  validate_delta_range(o);
  Output out(o, "velocities");
  echo_delta(out.manifest(), o);
  auto csv = out.open("velocities.csv");
  csv << "delta_over_hbarJ0,v_J,v_S0,v_p0,classification\n";
  for (double d : linspace(o.delta_min, o.delta_max, o.delta_steps)) {
    const ModelPtr m = natural_model(d, 1.0);
    wgc_velocities v;
    wgc_modal_energies e;
    check(wgc_velocities_eval(m.get(), &v), "velocities");
    check(wgc_modal_energies_eval(m.get(), &e), "modal energies");
    csv << num(d) << ',' << num(v.clock) << ',' << num(v.phase_at_step) << ','
        << num(v.momentum_at_step) << ','
        << (e.regime == WGC_CLASSICALLY_FORBIDDEN ? "forbidden" : "allowed") << '\n';
  }
  out.finish();
}

struct ConfigDeleter {
  void operator()(wgc_sim_config* c) const { wgc_sim_config_destroy(c); }
};
struct SweepDeleter {
  void operator()(wgc_sweep* s) const { wgc_sweep_destroy(s); }
};

std::string format_config(const wgc_sim_config* cfg) {
  size_t len = 0;
  check(wgc_sim_config_format(cfg, nullptr, 0, &len), "config");
  std::string text(len + 1, '\0');
  check(wgc_sim_config_format(cfg, text.data(), text.size(), &len), "config");
  text.resize(len);
  return text;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + exact(x);
  return s;
}

void cmd_wavepacket(Options o) {
  // Resolve to the canonical text once; the run and any replay both parse
  // exactly this text.
  if (o.config_text.empty()) {
    wgc_sim_config* raw = nullptr;
    if (o.config_path.empty())
      check(wgc_sim_config_parse("", &raw), "config");
    else
      check(wgc_sim_config_load(o.config_path.c_str(), &raw), "config");
    std::unique_ptr<wgc_sim_config, ConfigDeleter> first(raw);
    o.config_text = format_config(first.get());
  }
  wgc_sim_config* raw = nullptr;
  check(wgc_sim_config_parse(o.config_text.c_str(), &raw), "config");
  std::unique_ptr<wgc_sim_config, ConfigDeleter> cfg(raw);

  Output out(o, "wavepacket");
  Manifest& man = out.manifest();
  std::istringstream lines(o.config_text);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) man.set("config." + line.substr(0, eq), line.substr(eq + 3));
  }
  man.set("param.v0i_over_e", join(o.v0i_over_e));
  man.set("param.refine", o.no_refine ? "0" : "1");
  man.set("param.threads", std::to_string(o.threads));

  wgc_sweep* sw = nullptr;
  check(wgc_sweep_run(cfg.get(), o.v0i_over_e.data(), o.v0i_over_e.size(), o.no_refine ? 0 : 1,
                      o.threads, &sw),
        "sweep");
  std::unique_ptr<wgc_sweep, SweepDeleter> sweep(sw);

  size_t points = 0, passes = 0;
  double broadening = 0.0;
  check(wgc_sweep_point_count(sweep.get(), &points), "sweep");
  check(wgc_sweep_pass_count(sweep.get(), &passes), "sweep");
  check(wgc_sweep_broadening_pct(sweep.get(), &broadening), "sweep");

  {
    auto csv = out.open("wavepacket_sweep.csv");
    csv << "v0i_over_e,abs_v0i_over_e,delta_x_um,v_over_v0,v0_over_v,v0_over_v_err,reference_v0_over_v,"
           "transmission,transmission_extrapolated,transfer_matrix_transmission\n";
    for (size_t i = 0; i < points; ++i) {
      wgc_sweep_point p;
      check(wgc_sweep_point_get(sweep.get(), i, &p), "sweep");
      if (p.v0i_over_e < 0.0 && !(p.transmission >= 0.0 && p.transmission <= 1.0))
        throw RuntimeFailure("loss-run transmission outside [0, 1]");
      csv << num(p.v0i_over_e) << ',' << num(std::abs(p.v0i_over_e)) << ',' << num(p.delta_x * 1e6) << ','
          << num(p.v_over_v0) << ',' << num(p.v0_over_v) << ',' << num(p.v0_over_v_error) << ','
          << num(p.reference_v0_over_v) << ',' << num(p.transmission) << ','
          << num(p.transmission_extrapolated) << ',' << num(p.reference_transmission) << '\n';
    }
  }
  {
    auto csv = out.open("wavepacket_trajectories.csv");
    csv << "grid_spacing_um,v0i_over_e,t_ps,com_um,norm,width_um\n";
    for (size_t pass = 0; pass < passes; ++pass) {
      double dx = 0.0;
      check(wgc_sweep_pass_grid_spacing(sweep.get(), pass, &dx), "sweep");
      for (size_t i = 0; i < points; ++i) {
        wgc_sweep_point p;
        size_t len = 0;
        check(wgc_sweep_point_get(sweep.get(), i, &p), "sweep");
        check(wgc_sweep_trajectory_length(sweep.get(), pass, i, &len), "sweep");
        for (size_t j = 0; j < len; ++j) {
          wgc_trajectory_sample s;
          check(wgc_sweep_trajectory_get(sweep.get(), pass, i, j, &s), "sweep");
          csv << num(dx * 1e6) << ',' << num(p.v0i_over_e) << ',' << num(s.t * 1e12) << ','
              << num(s.com * 1e6) << ',' << num(s.norm) << ',' << num(s.width * 1e6) << '\n';
        }
      }
    }
  }
  {
    auto csv = out.open("wavepacket_summary.csv");
    csv << "broadening_pct\n" << num(broadening) << '\n';
  }
  man.set("result.broadening_pct", num(broadening));
  out.finish();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigFailure("invalid number in list: '" + item + "'");
    }
  }
  return out;
}

void replay(const std::string& manifest_path, Options o) {
  const auto kv = read_manifest(manifest_path);
  auto get = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigFailure("manifest lacks '" + key + "'");
    return it->second;
  };
  auto get_d = [&](const std::string& key) { return std::stod(get(key)); };
  auto get_i = [&](const std::string& key) { return std::stoi(get(key)); };
  const std::string command = get("command");
  if (command == "dispersion" || command == "densities" || command == "velocities") {
    o.delta_min = get_d("param.delta_min");
    o.delta_max = get_d("param.delta_max");
    o.delta_steps = get_i("param.delta_steps");
  }
  if (command == "dispersion") return cmd_dispersion(o);
  if (command == "velocities") return cmd_velocities(o);
  if (command == "densities") {
    o.x_max = get_d("param.x_max");
    o.x_steps = get_i("param.x_steps");
    o.energy = get_d("param.energy");
    return cmd_densities(o);
  }
  if (command == "wavepacket") {
    std::string text;
    for (const auto& [k, v] : kv)
      if (k.rfind("config.", 0) == 0) text += k.substr(7) + " = " + v + "\n";
    o.config_text = text;
    o.v0i_over_e = parse_list(get("param.v0i_over_e"));
    o.no_refine = get("param.refine") == "0";
    return cmd_wavepacket(o);
  }
  throw ConfigFailure("manifest names unknown command '" + command + "'");
}

unsigned threads_from_env() {
  const char* env = std::getenv("WGCLOCK_THREADS");
  if (!env || !*env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n > 0 ? static_cast<unsigned>(n) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-waveguide clock velocities and imaginary-barrier wave-packet sweeps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wgc_version());

  Options o;
  o.threads = threads_from_env();
  std::string list;
  std::string manifest_path;

  auto add_delta = [&](CLI::App* sub) {
    sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--delta-min", o.delta_min, "Lowest Delta / hbar J0")->capture_default_str();
    sub->add_option("--delta-max", o.delta_max, "Highest Delta / hbar J0")->capture_default_str();
    sub->add_option("--delta-steps", o.delta_steps, "Grid points in Delta")->capture_default_str();
  };

  auto* dispersion = app.add_subcommand("dispersion", "k1, k2, E1, E2 versus Delta (natural units)");
  add_delta(dispersion);
  auto* densities = app.add_subcommand("densities", "|psi_up|^2, |psi_down|^2, p_down over (Delta, x)");
  add_delta(densities);
  densities->add_option("--x-max", o.x_max, "Largest x / x0")->capture_default_str();
  densities->add_option("--x-steps", o.x_steps, "Grid points in x")->capture_default_str();
  densities->add_option("--energy", o.energy, "Incident energy E / hbar J0")->capture_default_str();
  auto* velocities = app.add_subcommand("velocities", "v_J, v_S(0), v_p(0) versus Delta");
  add_delta(velocities);
  auto* wavepacket = app.add_subcommand("wavepacket", "Wave-packet sweep across an imaginary barrier");
  wavepacket->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
  wavepacket->add_option("--config", o.config_path, "key = value simulation config");
  wavepacket->add_option("--v0i-over-e", list, "Comma-separated V0i/E values (negative = loss)");
  wavepacket->add_flag("--no-refine", o.no_refine, "Skip the dx/2 pass (no error bars)");
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay_cmd->add_option("manifest", manifest_path, "Manifest file")->required();
  replay_cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (!list.empty()) o.v0i_over_e = parse_list(list);
    if (*dispersion) cmd_dispersion(o);
    if (*densities) cmd_densities(o);
    if (*velocities) cmd_velocities(o);
    if (*wavepacket) cmd_wavepacket(o);
    if (*replay_cmd) replay(manifest_path, o);
  } catch (const ConfigFailure& e) {
    std::fprintf(stderr, "wgclock: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const RuntimeFailure& e) {
    std::fprintf(stderr, "wgclock: runtime error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wgclock: error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
