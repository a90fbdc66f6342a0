// Command line front end: xenon kinetics runs, operating-limit table builds,
// rolling-horizon fleet dispatch, and result-bundle comparison reports.
// Exit codes: 0 success, 1 usage or precondition, 2 bad input data,
// 3 solver or internal failure.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "nucflex/dispatch.hpp"
#include "nucflex/results.hpp"
#include "nucflex/scenario.hpp"

namespace nf = nucflex;

namespace {

struct KineticsArgs {
  std::string preset = "ap1000";
  std::string params_file;
  std::string ramp = "down";
  std::string profile;  // custom breakpoints "t:frac,t:frac,..."
  double p0 = 0.5;
  double dwell_hr = 24.0;
  double horizon_hr = 96.0;
  double dt = 0.02;
  std::string out = "kinetics.csv";
};

nf::NuclideParams load_params(const std::string& preset, const std::string& params_file) {
  if (!params_file.empty()) {
    auto lines = nf::read_lines(params_file);
    std::string text;
    for (const auto& l : lines) {
      text += l;
      text += '\n';
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw nf::input_error(params_file + " is not valid JSON: " + e.what());
    }
    return nf::parse_nuclide_params(j, params_file);
  }
  return nf::load_nuclide_preset(preset);
}

nf::PowerProfile parse_custom_profile(const std::string& spec) {
  nf::PowerProfile prof;
  for (auto tok : nf::split(spec, ',')) {
    auto kv = nf::split(tok, ':');
    if (kv.size() != 2)
      throw nf::precondition_error("profile breakpoints must look like t:frac");
    prof.t_hr.push_back(nf::parse_double(kv[0], "profile"));
    prof.frac.push_back(nf::parse_double(kv[1], "profile"));
  }
  nf::validate(prof);
  return prof;
}

// The four stock maneuver shapes all ramp at the standard 25 %/h between full
// power and the target fraction, holding for the dwell where applicable.
nf::PowerProfile make_profile(const KineticsArgs& a) {
  if (a.ramp == "custom") {
    if (a.profile.empty())
      throw nf::precondition_error("--ramp custom needs --profile breakpoints");
    return parse_custom_profile(a.profile);
  }
  if (a.p0 < 0.0 || a.p0 > 1.0)
    throw nf::precondition_error("--p0 must lie in [0, 1]");
  double t_ramp = (1.0 - a.p0) / nf::kRampFracPerHr;
  if (a.ramp == "none") return nf::PowerProfile{{0.0}, {a.p0}};
  if (a.ramp == "down") return nf::ramp_down_profile(a.p0);
  if (t_ramp <= 0.0) return nf::PowerProfile{{0.0}, {1.0}};  // p0 = 1: flat
  if (a.ramp == "up") return nf::PowerProfile{{0.0, t_ramp}, {a.p0, 1.0}};
  if (a.ramp == "down-up")
    return nf::PowerProfile{{0.0, t_ramp, t_ramp + a.dwell_hr, 2 * t_ramp + a.dwell_hr},
                            {1.0, a.p0, a.p0, 1.0}};
  if (a.ramp == "up-down")
    return nf::PowerProfile{{0.0, t_ramp, t_ramp + a.dwell_hr, 2 * t_ramp + a.dwell_hr},
                            {a.p0, 1.0, 1.0, a.p0}};
  throw nf::precondition_error("unknown ramp shape " + a.ramp);
}

int cmd_kinetics(const KineticsArgs& a) {
  nf::NuclideParams params = load_params(a.preset, a.params_file);
  nf::KineticsSeries s = nf::simulate(params, make_profile(a), a.horizon_hr, a.dt);
  nf::write_series_csv(s, a.out);
  std::printf("wrote %s (%zu samples)\n", a.out.c_str(), s.t_hr.size());
  return 0;
}

struct TableArgs {
  std::string preset = "ap1000";
  std::string params_file;
  double margin_max = 5000.0;
  double margin_step = 50.0;
  std::string margins;  // explicit comma list overrides max/step
  std::string p0_grid;  // explicit comma list overrides the default 21 points
  double buffer = 0.0;
  bool no_verify = false;
  int threads = 1;
  std::string out = "table.csv";
};

std::vector<double> parse_grid(const std::string& spec, const char* what) {
  std::vector<double> grid;
  for (auto tok : nf::split(spec, ','))
    grid.push_back(nf::parse_double(tok, what));
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw nf::input_error(std::string(what) + " grid must be strictly increasing");
  return grid;
}

int cmd_build_tables(const TableArgs& a) {
  nf::NuclideParams params = load_params(a.preset, a.params_file);
  std::vector<double> margins;
  if (!a.margins.empty()) {
    margins = parse_grid(a.margins, "margin");
  } else {
    if (a.margin_max <= 0 || a.margin_step <= 0)
      throw nf::input_error("margin grid bounds must be positive");
    for (double m = 0.0; m <= a.margin_max + 1e-9; m += a.margin_step)
      margins.push_back(m);
  }
  std::vector<double> p0 = a.p0_grid.empty() ? nf::default_p0_grid()
                                             : parse_grid(a.p0_grid, "p0");
  nf::FlexibilityTable t =
      nf::build_table(params, p0, margins, a.buffer, !a.no_verify, 0.02, a.threads);
  nf::save_table(t, a.out);
  std::printf("wrote %s (%zu rows%s)\n", a.out.c_str(), t.rows.size(),
              a.no_verify ? "" : ", verified");
  return 0;
}

struct DispatchArgs {
  std::string config;
  std::string mode;  // empty: config's mode; "1"/"2"/"3"/"multi"
  long long synthetic_seed = -1;
  int days = -1;
  std::string demand_file;
  std::string vre_file;
  std::string table_file;
  std::string out = "results";
  int jobs = 1;
};

int cmd_dispatch(const DispatchArgs& a) {
  nf::ScenarioConfig cfg = nf::load_config(a.config);
  if (a.days > 0) cfg.horizon_days = a.days;
  if (!a.table_file.empty()) cfg.table.file = a.table_file;
  if (a.synthetic_seed >= 0) cfg.synthetic.seed = static_cast<uint64_t>(a.synthetic_seed);

  bool multi = a.mode == "multi";
  if (!multi && !a.mode.empty()) cfg.mode = static_cast<int>(nf::parse_long(a.mode, "--mode"));
  nf::validate(cfg);

  nf::TimeSeriesBundle series;
  if (!a.demand_file.empty()) {
    series.demand_mw = nf::load_demand_csv(a.demand_file);
    if (!a.vre_file.empty()) {
      auto [w, s] = nf::load_vre_csv(a.vre_file);
      series.wind_cf = std::move(w);
      series.solar_cf = std::move(s);
    }
    nf::validate(series);
  } else {
    nf::SynthSpec spec;
    spec.seed = cfg.synthetic.seed;
    spec.days = cfg.horizon_days;
    spec.base_demand_mw = cfg.synthetic.base_demand_mw;
    series = nf::synth_case(spec);
  }

  nf::NuclideParams params = nf::resolve_nuclide(cfg);
  nf::FlexibilityTable table = nf::resolve_table(cfg, params, std::max(1, a.jobs));

  std::vector<int> modes = multi ? std::vector<int>{1, 2, 3} : std::vector<int>{cfg.mode};
  std::vector<nf::DispatchMetrics> metrics(modes.size());
  std::vector<std::string> dirs(modes.size());
  std::vector<std::exception_ptr> errors(modes.size());

  auto run_one = [&](size_t i) {
    try {
      nf::ScenarioConfig mode_cfg = cfg;
      mode_cfg.mode = modes[i];
      nf::DispatchResult res = nf::run_dispatch(mode_cfg, table, series);
      dirs[i] = multi ? a.out + "/mode" + std::to_string(modes[i]) : a.out;
      nf::write_bundle(res, dirs[i]);
      metrics[i] = res.metrics;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  int jobs = std::max(1, a.jobs);
  if (jobs > 1 && modes.size() > 1) {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < modes.size(); ++i) pool.emplace_back(run_one, i);
    for (auto& th : pool) th.join();
  } else {
    for (size_t i = 0; i < modes.size(); ++i) run_one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::pair<std::string, nf::DispatchMetrics>> rows;
  for (size_t i = 0; i < modes.size(); ++i)
    rows.emplace_back("mode" + std::to_string(modes[i]), metrics[i]);
  std::fputs(nf::metrics_table(rows).c_str(), stdout);
  for (const auto& d : dirs) std::printf("bundle: %s\n", d.c_str());
  return 0;
}

struct ReportArgs {
  std::vector<std::string> bundles;
  std::string out = "report";
};

int cmd_report(const ReportArgs& a) {
  nf::write_report(a.bundles, a.out);
  std::printf("wrote %s/{alpha,pmin,metrics}_comparison.csv from %zu bundle(s)\n",
              a.out.c_str(), a.bundles.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xenon-aware nuclear fleet dispatch toolkit"};
  app.require_subcommand(1);

  KineticsArgs ka;
  auto* kin = app.add_subcommand("kinetics", "integrate a xenon transient and write the series");
  kin->add_option("--preset", ka.preset, "nuclide preset name");
  kin->add_option("--nuclide-file", ka.params_file, "nuclide parameter JSON (overrides preset)");
  kin->add_option("--ramp", ka.ramp, "down|up|down-up|up-down|none|custom")
      ->check(CLI::IsMember({"down", "up", "down-up", "up-down", "none", "custom"}));
  kin->add_option("--p0", ka.p0, "target power fraction for the stock shapes");
  kin->add_option("--dwell", ka.dwell_hr, "hold time at the far end, hours");
  kin->add_option("--horizon", ka.horizon_hr, "simulated hours");
  kin->add_option("--dt", ka.dt, "integrator step, hours");
  kin->add_option("--profile", ka.profile, "custom breakpoints t:frac,t:frac,...");
  kin->add_option("--out", ka.out, "output CSV path");

  TableArgs ta;
  auto* tab = app.add_subcommand("build-tables", "precompute the margin-indexed operating limits");
  tab->add_option("--preset", ta.preset, "nuclide preset name");
  tab->add_option("--nuclide-file", ta.params_file, "nuclide parameter JSON (overrides preset)");
  tab->add_option("--margin-max", ta.margin_max, "largest margin row, pcm");
  tab->add_option("--margin-step", ta.margin_step, "margin row spacing, pcm");
  tab->add_option("--margins", ta.margins, "explicit margin rows, comma separated pcm");
  tab->add_option("--p0-grid", ta.p0_grid, "explicit power-fraction grid, comma separated");
  tab->add_option("--buffer", ta.buffer, "safety buffer subtracted from margins, pcm");
  tab->add_flag("--no-verify", ta.no_verify, "skip the re-simulation safety pass");
  tab->add_option("--threads", ta.threads, "worker threads for the curve build");
  tab->add_option("--out", ta.out, "output table path");

  DispatchArgs da;
  auto* dis = app.add_subcommand("dispatch", "run the rolling-horizon fleet dispatch");
  dis->add_option("--config", da.config, "scenario config JSON")->required();
  dis->add_option("--mode", da.mode, "1|2|3|multi (default: config)");
  dis->add_option("--synthetic", da.synthetic_seed, "generate the synthetic case with this seed");
  dis->add_option("--days", da.days, "override the horizon length, days");
  dis->add_option("--demand", da.demand_file, "demand CSV (timestamp,demand_mw)");
  dis->add_option("--vre", da.vre_file, "VRE CSV (timestamp,wind_cf,solar_cf)");
  dis->add_option("--table", da.table_file, "prebuilt operating-limit table");
  dis->add_option("--out", da.out, "result bundle directory");
  dis->add_option("--jobs", da.jobs, "parallel mode runs for --mode multi");

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "merge result bundles into comparison files");
  rep->add_option("bundles", ra.bundles, "result bundle directories")->required();
  rep->add_option("--out", ra.out, "comparison output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(kin)) return cmd_kinetics(ka);
    if (app.got_subcommand(tab)) return cmd_build_tables(ta);
    if (app.got_subcommand(dis)) return cmd_dispatch(da);
    if (app.got_subcommand(rep)) return cmd_report(ra);
    return 1;
  } catch (const nf::precondition_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const nf::input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const nf::solver_error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const nf::internal_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
