// Drives the installed binary end to end through std::system. TOOL_PATH is
// injected by the build so the tests always exercise the freshly built tool.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nucflex/common.hpp"

namespace fs = std::filesystem;
using namespace nucflex;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct TmpDir {
  fs::path p;
  TmpDir() {
    std::random_device rd;
    p = fs::temp_directory_path() /
        ("nucflex_cli_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    fs::create_directories(p);
  }
  ~TmpDir() {
    std::error_code ec;
    fs::remove_all(p, ec);
  }
  std::string file(const std::string& name) const { return (p / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// columns: t_hr,iodine,xenon,defect_pcm
std::vector<double> defect_column(const std::string& path) {
  auto lines = read_lines(path);
  REQUIRE(lines.size() > 1);
  REQUIRE(trim(lines[0]) == "t_hr,iodine,xenon,defect_pcm");
  std::vector<double> defect;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto toks = split(lines[i], ',');
    REQUIRE(toks.size() == 4);
    defect.push_back(parse_double(toks[3], "defect"));
  }
  return defect;
}

const char* kSmallConfig = R"({
  "mode": 2,
  "window_hours": 24,
  "horizon_days": 3,
  "refuel_days": 2,
  "reactors": {"count": 1, "p_max_mw": 400.0},
  "storage": {"power_mw": 150.0},
  "vre": {"wind_mw": 300.0, "solar_mw": 150.0},
  "synthetic": {"seed": 11, "base_demand_mw": 500.0}
})";

}  // namespace

TEST_CASE("kinetics ramp down peaks then decays") {
  TmpDir tmp;
  std::string out = tmp.file("kin.csv");
  REQUIRE(run("kinetics --ramp down --p0 0.5 --horizon 96 --out " + out) == 0);
  auto defect = defect_column(out);
  size_t peak = 0;
  for (size_t i = 0; i < defect.size(); ++i)
    if (defect[i] > defect[peak]) peak = i;
  REQUIRE(peak > 0);
  REQUIRE(peak < defect.size() - 1);
  REQUIRE(defect[peak] > defect.front() * 1.2);
  REQUIRE(defect.back() < defect[peak]);
}

TEST_CASE("kinetics without a maneuver holds equilibrium") {
  TmpDir tmp;
  std::string out = tmp.file("flat.csv");
  REQUIRE(run("kinetics --ramp none --p0 1.0 --horizon 48 --out " + out) == 0);
  auto defect = defect_column(out);
  double lo = defect.front(), hi = defect.front();
  for (double d : defect) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  REQUIRE(hi - lo < 1e-6 * std::abs(hi));
}

TEST_CASE("kinetics rejects an oversized integrator step") {
  TmpDir tmp;
  REQUIRE(run("kinetics --dt 0.5 --out " + tmp.file("x.csv")) == 1);
}

TEST_CASE("build-tables emits one row per margin") {
  TmpDir tmp;
  std::string out = tmp.file("table.csv");
  REQUIRE(run("build-tables --margins 4000 --out " + out) == 0);
  auto lines = read_lines(out);
  REQUIRE(trim(lines[1]) == "margin_pcm,pmin_frac,deadtime_hr");
  REQUIRE(lines.size() == 3);
  auto toks = split(lines[2], ',');
  REQUIRE(parse_double(toks[0], "margin") == 4000.0);
  REQUIRE(parse_double(toks[1], "pmin") == 0.5);
}

TEST_CASE("build-tables rejects a non-increasing margin grid") {
  TmpDir tmp;
  REQUIRE(run("build-tables --margins 4000,3000 --out " + tmp.file("t.csv")) == 2);
}

TEST_CASE("dispatch writes a complete bundle") {
  TmpDir tmp;
  std::string cfg = tmp.file("cfg.json");
  write_file(cfg, kSmallConfig);
  std::string out = tmp.file("results");
  REQUIRE(run("dispatch --config " + cfg + " --out " + out) == 0);
  for (const char* name : {"manifest.json", "config.json", "trajectory.csv",
                           "events.csv", "core_state_0.csv", "metrics.json"})
    REQUIRE(fs::exists(fs::path(out) / name));
  REQUIRE(fs::exists(fs::path(out) / "windows" / "solution_000.csv"));
  REQUIRE(fs::exists(fs::path(out) / "windows" / "system_002.csv"));
  REQUIRE(slurp(out + "/manifest.json").find("\"mode\": 2") != std::string::npos);
}

TEST_CASE("dispatch without a config flag is a usage error") {
  REQUIRE(run("dispatch") == 1);
}

TEST_CASE("dispatch with a missing config file is an input error") {
  REQUIRE(run("dispatch --config /nonexistent/cfg.json") == 2);
}

TEST_CASE("report passes a single bundle through") {
  TmpDir tmp;
  std::string cfg = tmp.file("cfg.json");
  write_file(cfg, kSmallConfig);
  std::string bundle = tmp.file("results");
  REQUIRE(run("dispatch --config " + cfg + " --out " + bundle) == 0);
  std::string rep = tmp.file("report");
  REQUIRE(run("report " + bundle + " --out " + rep) == 0);
  for (const char* name :
       {"alpha_comparison.csv", "pmin_comparison.csv", "metrics_comparison.csv"})
    REQUIRE(fs::exists(fs::path(rep) / name));
  auto lines = read_lines(rep + "/alpha_comparison.csv");
  REQUIRE(trim(lines[0]) == "window,reactor,alpha_mode2");
  REQUIRE(lines.size() == 4);  // header + one row per window and reactor
}

TEST_CASE("report refuses bundles with different horizons") {
  TmpDir tmp;
  std::string cfg_a = tmp.file("a.json");
  write_file(cfg_a, kSmallConfig);
  std::string cfg_b = tmp.file("b.json");
  std::string shorter(kSmallConfig);
  auto at = shorter.find("\"horizon_days\": 3");
  REQUIRE(at != std::string::npos);
  shorter.replace(at, 17, "\"horizon_days\": 4");
  write_file(cfg_b, shorter);
  std::string ba = tmp.file("ra");
  std::string bb = tmp.file("rb");
  REQUIRE(run("dispatch --config " + cfg_a + " --out " + ba) == 0);
  REQUIRE(run("dispatch --config " + cfg_b + " --out " + bb) == 0);
  REQUIRE(run("report " + ba + " " + bb + " --out " + tmp.file("rep")) == 2);
}

TEST_CASE("dispatch reruns are byte identical") {
  TmpDir tmp;
  std::string cfg = tmp.file("cfg.json");
  write_file(cfg, kSmallConfig);
  std::string a = tmp.file("run_a");
  std::string b = tmp.file("run_b");
  REQUIRE(run("dispatch --config " + cfg + " --out " + a) == 0);
  REQUIRE(run("dispatch --config " + cfg + " --out " + b) == 0);
  for (const char* name : {"manifest.json", "trajectory.csv", "metrics.json",
                           "events.csv", "core_state_0.csv"})
    REQUIRE(slurp(a + "/" + name) == slurp(b + "/" + name));
}
