#include "wgclock/sim_config_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wgclock/constants.hpp"
#include "wgclock/errors.hpp"

namespace wgclock {

namespace {

using constants::meV;
using constants::micrometre;
using constants::picosecond;

struct Key {
  const char* name;
  double SimConfig::*field;
  double unit;
  bool geometry;
};

constexpr std::array<Key, 12> kKeys{{
    {"mass_kg", &SimConfig::mass, 1.0, false},
    {"energy_meV", &SimConfig::energy, meV, false},
    {"barrier_v0i_meV", &SimConfig::barrier_v0i, meV, false},
    {"barrier_width_um", &SimConfig::barrier_width, micrometre, false},
    {"barrier_center_um", &SimConfig::barrier_center, micrometre, false},
    {"sigma_um", &SimConfig::sigma, micrometre, false},
    {"grid_spacing_um", &SimConfig::grid_spacing, micrometre, false},
    {"rk4_tolerance", &SimConfig::rk4_tolerance, 1.0, false},
    {"grid_start_um", &SimConfig::grid_start, micrometre, true},
    {"grid_extent_um", &SimConfig::grid_extent, micrometre, true},
    {"initial_center_um", &SimConfig::initial_center, micrometre, true},
    {"total_time_ps", &SimConfig::total_time, picosecond, true},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  std::map<std::string, double, std::less<>> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const bool known = key == "output_samples" ||
                       std::any_of(kKeys.begin(), kKeys.end(), [&](const Key& k) { return key == k.name; });
    if (!known) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (values.count(key)) throw ConfigError("duplicate key '" + key + "'");
    values[key] = parse_number(key, value);
  }

  SimConfig cfg = SimConfig::standard();
  for (const Key& k : kKeys)
    if (!k.geometry && values.count(k.name)) cfg.*k.field = values.at(k.name) * k.unit;
  if (values.count("output_samples")) {
    const double samples = values.at("output_samples");
    if (samples != std::floor(samples) || samples < 1 || samples > 1e7)
      throw ConfigError("output_samples must be a positive integer");
    cfg.output_samples = static_cast<int>(samples);
  }
  cfg.apply_default_geometry();
  for (const Key& k : kKeys)
    if (k.geometry && values.count(k.name)) cfg.*k.field = values.at(k.name) * k.unit;
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sim_config(ss.str());
}

std::string format_sim_config(const SimConfig& cfg) {
  std::string out;
  for (const Key& k : kKeys) out += std::string(k.name) + " = " + format_double(cfg.*k.field / k.unit) + "\n";
  out += "output_samples = " + std::to_string(cfg.output_samples) + "\n";
  return out;
}

}  // namespace wgclock
