#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(WGCLOCK_TEST_DIR) / "cli_scratch";

int run(const std::string& args) {
  const std::string cmd = std::string(WGCLOCK_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path d = kRoot / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

}  // namespace

TEST_CASE("analytic commands are deterministic and replayable") {
  for (const std::string cmd : {"dispersion", "velocities", "densities"}) {
    CAPTURE(cmd);
    const fs::path a = fresh(cmd + "_a"), b = fresh(cmd + "_b"), c = fresh(cmd + "_c");
    const std::string extra = cmd == "densities" ? " --delta-steps 41 --x-steps 33" : " --delta-steps 101";
    REQUIRE(run(cmd + " --out-dir " + a.string() + extra) == 0);
    REQUIRE(run(cmd + " --out-dir " + b.string() + extra) == 0);
    REQUIRE(run("replay " + (a / (cmd + "_manifest.txt")).string() + " --out-dir " + c.string()) == 0);
    const std::string csv = cmd + ".csv";
    CHECK(slurp(a / csv) == slurp(b / csv));
    CHECK(slurp(a / csv) == slurp(c / csv));
    const std::string manifest = slurp(a / (cmd + "_manifest.txt"));
    CHECK(manifest.find("outputs = " + csv) != std::string::npos);
    CHECK(manifest.find("constant.hbar_Js = ") != std::string::npos);
  }
}

TEST_CASE("dispersion rows") {
  const fs::path d = fresh("dispersion_rows");
  REQUIRE(run("dispersion --out-dir " + d.string() + " --delta-min -5 --delta-max 5 --delta-steps 3") == 0);
  const auto l = lines(d / "dispersion.csv");
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "delta_over_hbarJ0,re_k1,im_k1,re_k2,im_k2,re_E1,im_E1,re_E2,im_E2,branch");
  const auto lo = fields(l[1]), mid = fields(l[2]), hi = fields(l[3]);
  CHECK(lo[3] == 0.0);
  CHECK(lo[4] == doctest::Approx(3.146264).epsilon(1e-6));
  CHECK(hi[3] == doctest::Approx(3.146264).epsilon(1e-6));
  CHECK(hi[4] == 0.0);
  CHECK(std::abs(mid[5]) < 1e-12);  // Re E1 = Delta / 2 at Delta = 0
  CHECK(mid[6] == doctest::Approx(-0.5));
  CHECK(l[1].substr(l[1].rfind(',') + 1) == "minus");
  CHECK(l[3].substr(l[3].rfind(',') + 1) == "plus");
}

TEST_CASE("velocities and densities rows") {
  const fs::path d = fresh("rows");
  REQUIRE(run("velocities --out-dir " + d.string() + " --delta-min -2 --delta-max 0.5 --delta-steps 6") == 0);
  const auto v = lines(d / "velocities.csv");
  REQUIRE(v.size() == 7);
  CHECK(fields(v[1])[2] == 0.0);                               // v_S(0) at -2
  CHECK(fields(v[6])[1] == doctest::Approx(1.0).epsilon(1e-12)); // plateau at 0.5
  for (std::size_t i = 1; i < v.size(); ++i) {
    const auto f = fields(v[i]);
    CHECK(f[3] == doctest::Approx(f[1]).epsilon(1e-12));
  }

  REQUIRE(run("densities --out-dir " + d.string() + " --delta-min -10 --delta-max 10 --delta-steps 5 --x-max 40 --x-steps 9") == 0);
  const auto g = lines(d / "densities.csv");
  REQUIRE(g.size() == 1 + 5 * 9);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto f = fields(g[i]);
    CHECK(f[4] >= 0.0);
    CHECK(f[4] <= 1.0);
    if (f[1] == 0.0) CHECK(f[4] == 0.0);
  }
  CHECK(std::abs(fields(g[9])[4] - 0.5) < 1e-4);  // Delta = -10, x = 40 x0
}

TEST_CASE("wavepacket sweep on a short grid") {
  const fs::path d = fresh("wavepacket_a"), e = fresh("wavepacket_b");
  const fs::path cfg = kRoot / "short.cfg";
  std::ofstream(cfg) << "# narrow packet\nsigma_um = 20\n";
  REQUIRE(run("wavepacket --config " + cfg.string() + " --v0i-over-e=-1,-0.5 --no-refine --out-dir " + d.string()) == 0);
  REQUIRE(run("replay " + (d / "wavepacket_manifest.txt").string() + " --out-dir " + e.string()) == 0);
  for (const char* f : {"wavepacket_sweep.csv", "wavepacket_trajectories.csv", "wavepacket_summary.csv"})
    CHECK(slurp(d / f) == slurp(e / f));
  const auto rows = lines(d / "wavepacket_sweep.csv");
  REQUIRE(rows.size() == 4);
  const auto free = fields(rows[1]), loss = fields(rows[2]);
  CHECK(free[0] == 0.0);
  CHECK(free[4] == 1.0);
  CHECK(free[7] == 1.0);
  CHECK(loss[0] == -1.0);
  CHECK(loss[6] == doctest::Approx(0.8409).epsilon(1e-4));
  CHECK(loss[7] > 0.0);
  CHECK(loss[7] < 1.0);
  const std::string manifest = slurp(d / "wavepacket_manifest.txt");
  CHECK(manifest.find("config.sigma_um = 20") != std::string::npos);
  CHECK(manifest.find("param.v0i_over_e = -1,-0.5") != std::string::npos);
  CHECK(manifest.find("result.broadening_pct = ") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path d = fresh("exit");
  CHECK(run("") == 2);
  CHECK(run("dispersion --delta-min 3 --delta-max 1 --out-dir " + d.string()) == 2);
  CHECK(run("dispersion --delta-steps nope --out-dir " + d.string()) == 2);
  CHECK(run("densities --x-max -1 --out-dir " + d.string()) == 2);
  CHECK(run("densities --energy 0 --out-dir " + d.string()) == 2);
  CHECK(run("wavepacket --v0i-over-e=-1,x --out-dir " + d.string()) == 2);
  CHECK(run("wavepacket --config /nonexistent.cfg --out-dir " + d.string()) == 2);
  CHECK(run("replay /nonexistent_manifest.txt --out-dir " + d.string()) == 2);

  const fs::path bad = kRoot / "bad.cfg";
  std::ofstream(bad) << "sigmaum = 150\n";
  CHECK(run("wavepacket --config " + bad.string() + " --out-dir " + d.string()) == 2);

  // A packet as narrow as the grid spacing spreads into the walls.
  const fs::path wide = kRoot / "spread.cfg";
  std::ofstream(wide) << "sigma_um = 0.5\n";
  CHECK(run("wavepacket --config " + wide.string() + " --v0i-over-e=-1 --no-refine --out-dir " + d.string()) == 3);

  CHECK(run("--version") == 0);
}
