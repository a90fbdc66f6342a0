#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "nucflex/common.hpp"
#include "nucflex/flexibility.hpp"
#include "nucflex/reactivity.hpp"
#include "nucflex/series.hpp"
#include "nucflex/uc.hpp"
#include "nucflex/xenon.hpp"

// Scenario configuration: a strict JSON schema (unknown keys rejected), a
// canonical hash over the fully resolved document, and glue that turns the
// config into solver-facing structures (generator specs, nuclide parameters,
// the operating-limit table).

namespace nucflex {

struct ReactorConfig {
  int count = 3;
  double p_max_mw = 1333.0;
  double variable_cost = 2.8;        // $/MWh
  double start_cost_per_mw = 107.68; // $ per MW of capacity per start
  double shut_cost_per_mw = 107.68;
  int min_up_hours = 4;
  int min_dn_base_hours = 6;
  double ramp_frac_per_hr = 0.25;
};

struct DegradationConfig {
  double k_bol = 1.045;
  double m_per_full_power_day = (1.045 - 1.0) / 540.0;
  // Full-power days of burnup charged per window at capacity factor 1.
  // Non-positive means "derive from window_hours".
  double block_days = -1.0;
};

struct StorageConfig {
  double power_mw = 4200.0;
  double duration_hours = 4.0;
  double round_trip_efficiency = 0.85;
  double initial_soc_frac = 0.5;
};

struct VreConfig {
  double wind_mw = 10000.0;
  double solar_mw = 4000.0;
};

struct NuclideConfig {
  std::string preset = "ap1000";              // ignored when inline params given
  std::optional<NuclideParams> inline_params; // takes precedence over preset
};

struct TableConfig {
  std::string file;  // non-empty: load instead of building
  double margin_max_pcm = 5000.0;
  double margin_step_pcm = 50.0;
  double buffer_pcm = 0.0;
  bool verify = true;
};

struct SyntheticConfig {
  uint64_t seed = 7;
  double base_demand_mw = 5200.0;
};

struct ScenarioConfig {
  int mode = 1;  // 1 on/off only, 2 floor 0.5, 3 floor 0.2
  int window_hours = 72;
  int horizon_days = 90;
  int refuel_days = 35;
  double nse_cost = 9000.0;  // $/MWh
  double ramp_threshold_mw = 1.0;
  int stable_hours = 6;
  double mip_gap = 0.001;
  ReactorConfig reactors;
  DegradationConfig degradation;
  StorageConfig storage;
  VreConfig vre;
  NuclideConfig nuclide;
  TableConfig table;
  SyntheticConfig synthetic;
};

inline double mode_pmin_base(int mode) {
  switch (mode) {
    case 1: return 1.0;
    case 2: return 0.5;
    case 3: return 0.2;
    default: throw precondition_error("mode must be 1, 2 or 3");
  }
}

inline int window_count(const ScenarioConfig& c) {
  int hours = c.horizon_days * 24;
  return (hours + c.window_hours - 1) / c.window_hours;
}

inline double block_days(const ScenarioConfig& c) {
  return c.degradation.block_days > 0.0 ? c.degradation.block_days
                                        : c.window_hours / 24.0;
}

namespace detail {

inline void expect_keys(const nlohmann::json& j,
                        std::initializer_list<const char*> keys,
                        const std::string& ctx) {
  if (!j.is_object()) throw input_error(ctx + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) { known = true; break; }
    if (!known) throw input_error("unknown key '" + it.key() + "' in " + ctx);
  }
}

inline double jnum(const nlohmann::json& j, const char* key, double def,
                   const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number()) throw input_error(std::string(key) + " in " + ctx + " must be a number");
  return v.get<double>();
}

inline int jint(const nlohmann::json& j, const char* key, int def,
                const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw input_error(std::string(key) + " in " + ctx + " must be an integer");
  return v.get<int>();
}

inline bool jbool(const nlohmann::json& j, const char* key, bool def,
                  const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw input_error(std::string(key) + " in " + ctx + " must be a boolean");
  return v.get<bool>();
}

inline std::string jstr(const nlohmann::json& j, const char* key,
                        const std::string& def, const std::string& ctx) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_string()) throw input_error(std::string(key) + " in " + ctx + " must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline NuclideParams parse_nuclide_params(const nlohmann::json& j,
                                          const std::string& ctx) {
  detail::expect_keys(j,
                      {"lambda_i_per_hr", "lambda_xe_per_hr", "gamma_i", "gamma_xe",
                       "sigma_f_per_cm", "sigma_xe_cm2", "phi0_per_cm2_hr", "nu"},
                      ctx);
  NuclideParams d;
  NuclideParams p;
  p.lambda_i = detail::jnum(j, "lambda_i_per_hr", d.lambda_i, ctx);
  p.lambda_xe = detail::jnum(j, "lambda_xe_per_hr", d.lambda_xe, ctx);
  p.gamma_i = detail::jnum(j, "gamma_i", d.gamma_i, ctx);
  p.gamma_xe = detail::jnum(j, "gamma_xe", d.gamma_xe, ctx);
  p.sigma_f = detail::jnum(j, "sigma_f_per_cm", d.sigma_f, ctx);
  p.sigma_xe = detail::jnum(j, "sigma_xe_cm2", d.sigma_xe, ctx);
  p.phi0 = detail::jnum(j, "phi0_per_cm2_hr", d.phi0, ctx);
  p.nu = detail::jnum(j, "nu", d.nu, ctx);
  try {
    validate(p);
  } catch (const precondition_error& e) {
    throw input_error(ctx + ": " + e.what());
  }
  return p;
}

inline nlohmann::json nuclide_params_json(const NuclideParams& p) {
  nlohmann::json j;
  j["lambda_i_per_hr"] = p.lambda_i;
  j["lambda_xe_per_hr"] = p.lambda_xe;
  j["gamma_i"] = p.gamma_i;
  j["gamma_xe"] = p.gamma_xe;
  j["sigma_f_per_cm"] = p.sigma_f;
  j["sigma_xe_cm2"] = p.sigma_xe;
  j["phi0_per_cm2_hr"] = p.phi0;
  j["nu"] = p.nu;
  return j;
}

inline ScenarioConfig parse_config_json(const nlohmann::json& j) {
  using detail::expect_keys;
  using detail::jbool;
  using detail::jint;
  using detail::jnum;
  using detail::jstr;

  expect_keys(j,
              {"mode", "window_hours", "horizon_days", "refuel_days", "nse_cost",
               "ramp_threshold_mw", "stable_hours", "mip_gap", "reactors",
               "degradation", "storage", "vre", "nuclide", "table", "synthetic"},
              "scenario config");
  ScenarioConfig c;
  c.mode = jint(j, "mode", c.mode, "scenario config");
  c.window_hours = jint(j, "window_hours", c.window_hours, "scenario config");
  c.horizon_days = jint(j, "horizon_days", c.horizon_days, "scenario config");
  c.refuel_days = jint(j, "refuel_days", c.refuel_days, "scenario config");
  c.nse_cost = jnum(j, "nse_cost", c.nse_cost, "scenario config");
  c.ramp_threshold_mw = jnum(j, "ramp_threshold_mw", c.ramp_threshold_mw, "scenario config");
  c.stable_hours = jint(j, "stable_hours", c.stable_hours, "scenario config");
  c.mip_gap = jnum(j, "mip_gap", c.mip_gap, "scenario config");

  if (j.contains("reactors")) {
    const auto& r = j.at("reactors");
    expect_keys(r,
                {"count", "p_max_mw", "variable_cost", "start_cost_per_mw",
                 "shut_cost_per_mw", "min_up_hours", "min_dn_base_hours",
                 "ramp_frac_per_hr"},
                "reactors");
    c.reactors.count = jint(r, "count", c.reactors.count, "reactors");
    c.reactors.p_max_mw = jnum(r, "p_max_mw", c.reactors.p_max_mw, "reactors");
    c.reactors.variable_cost = jnum(r, "variable_cost", c.reactors.variable_cost, "reactors");
    c.reactors.start_cost_per_mw =
        jnum(r, "start_cost_per_mw", c.reactors.start_cost_per_mw, "reactors");
    c.reactors.shut_cost_per_mw =
        jnum(r, "shut_cost_per_mw", c.reactors.shut_cost_per_mw, "reactors");
    c.reactors.min_up_hours = jint(r, "min_up_hours", c.reactors.min_up_hours, "reactors");
    c.reactors.min_dn_base_hours =
        jint(r, "min_dn_base_hours", c.reactors.min_dn_base_hours, "reactors");
    c.reactors.ramp_frac_per_hr =
        jnum(r, "ramp_frac_per_hr", c.reactors.ramp_frac_per_hr, "reactors");
  }
  if (j.contains("degradation")) {
    const auto& d = j.at("degradation");
    expect_keys(d, {"k_bol", "m_per_full_power_day", "block_days"}, "degradation");
    c.degradation.k_bol = jnum(d, "k_bol", c.degradation.k_bol, "degradation");
    c.degradation.m_per_full_power_day =
        jnum(d, "m_per_full_power_day", c.degradation.m_per_full_power_day, "degradation");
    c.degradation.block_days = jnum(d, "block_days", c.degradation.block_days, "degradation");
  }
  if (j.contains("storage")) {
    const auto& s = j.at("storage");
    expect_keys(s,
                {"power_mw", "duration_hours", "round_trip_efficiency",
                 "initial_soc_frac"},
                "storage");
    c.storage.power_mw = jnum(s, "power_mw", c.storage.power_mw, "storage");
    c.storage.duration_hours = jnum(s, "duration_hours", c.storage.duration_hours, "storage");
    c.storage.round_trip_efficiency =
        jnum(s, "round_trip_efficiency", c.storage.round_trip_efficiency, "storage");
    c.storage.initial_soc_frac =
        jnum(s, "initial_soc_frac", c.storage.initial_soc_frac, "storage");
  }
  if (j.contains("vre")) {
    const auto& v = j.at("vre");
    expect_keys(v, {"wind_mw", "solar_mw"}, "vre");
    c.vre.wind_mw = jnum(v, "wind_mw", c.vre.wind_mw, "vre");
    c.vre.solar_mw = jnum(v, "solar_mw", c.vre.solar_mw, "vre");
  }
  if (j.contains("nuclide")) {
    const auto& n = j.at("nuclide");
    expect_keys(n, {"preset", "params"}, "nuclide");
    c.nuclide.preset = jstr(n, "preset", c.nuclide.preset, "nuclide");
    if (n.contains("params"))
      c.nuclide.inline_params = parse_nuclide_params(n.at("params"), "nuclide.params");
  }
  if (j.contains("table")) {
    const auto& t = j.at("table");
    expect_keys(t,
                {"file", "margin_max_pcm", "margin_step_pcm", "buffer_pcm", "verify"},
                "table");
    c.table.file = jstr(t, "file", c.table.file, "table");
    c.table.margin_max_pcm = jnum(t, "margin_max_pcm", c.table.margin_max_pcm, "table");
    c.table.margin_step_pcm = jnum(t, "margin_step_pcm", c.table.margin_step_pcm, "table");
    c.table.buffer_pcm = jnum(t, "buffer_pcm", c.table.buffer_pcm, "table");
    c.table.verify = jbool(t, "verify", c.table.verify, "table");
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    expect_keys(s, {"seed", "base_demand_mw"}, "synthetic");
    if (s.contains("seed")) {
      const auto& v = s.at("seed");
      if (!v.is_number_integer() || v.get<int64_t>() < 0)
        throw input_error("seed in synthetic must be a non-negative integer");
      c.synthetic.seed = v.get<uint64_t>();
    }
    c.synthetic.base_demand_mw =
        jnum(s, "base_demand_mw", c.synthetic.base_demand_mw, "synthetic");
  }
  return c;
}

inline void validate(const ScenarioConfig& c) {
  if (c.mode < 1 || c.mode > 3) throw input_error("mode must be 1, 2 or 3");
  if (c.window_hours < 1) throw input_error("window_hours must be at least 1");
  if (c.horizon_days < 1) throw input_error("horizon_days must be at least 1");
  if (c.refuel_days < 1) throw input_error("refuel_days must be at least 1");
  if (c.nse_cost < 0) throw input_error("nse_cost must be non-negative");
  if (c.ramp_threshold_mw < 0) throw input_error("ramp_threshold_mw must be non-negative");
  if (c.stable_hours < 0) throw input_error("stable_hours must be non-negative");
  if (c.mip_gap < 0) throw input_error("mip_gap must be non-negative");
  if (c.reactors.count < 0) throw input_error("reactors.count must be non-negative");
  if (c.reactors.count > 0) {
    if (c.reactors.p_max_mw <= 0) throw input_error("reactors.p_max_mw must be positive");
    if (c.reactors.variable_cost < 0 || c.reactors.start_cost_per_mw < 0 ||
        c.reactors.shut_cost_per_mw < 0)
      throw input_error("reactor costs must be non-negative");
    if (c.reactors.min_up_hours < 1 || c.reactors.min_dn_base_hours < 1)
      throw input_error("reactor minimum up/down times must be at least one hour");
    if (c.reactors.ramp_frac_per_hr <= 0 || c.reactors.ramp_frac_per_hr > 1)
      throw input_error("reactors.ramp_frac_per_hr must lie in (0, 1]");
  }
  if (c.degradation.k_bol <= 1.0) throw input_error("degradation.k_bol must exceed 1");
  if (c.degradation.m_per_full_power_day <= 0)
    throw input_error("degradation.m_per_full_power_day must be positive");
  if (c.storage.power_mw < 0 || c.storage.duration_hours < 0)
    throw input_error("storage sizing must be non-negative");
  if (c.storage.round_trip_efficiency <= 0 || c.storage.round_trip_efficiency > 1)
    throw input_error("storage.round_trip_efficiency must lie in (0, 1]");
  if (c.storage.initial_soc_frac < 0 || c.storage.initial_soc_frac > 1)
    throw input_error("storage.initial_soc_frac must lie in [0, 1]");
  if (c.vre.wind_mw < 0 || c.vre.solar_mw < 0)
    throw input_error("vre capacities must be non-negative");
  if (c.table.file.empty()) {
    if (c.table.margin_max_pcm <= 0 || c.table.margin_step_pcm <= 0)
      throw input_error("table margin grid must be positive");
    if (c.table.buffer_pcm < 0) throw input_error("table.buffer_pcm must be non-negative");
  }
  if (c.synthetic.base_demand_mw <= 0)
    throw input_error("synthetic.base_demand_mw must be positive");
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig c = parse_config_json(j);
  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::string text;
  {
    auto lines = read_lines(path);
    for (const auto& l : lines) {
      text += l;
      text += '\n';
    }
  }
  try {
    return parse_config_text(text);
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

// Canonical serialization of the fully resolved config. nlohmann objects keep
// keys sorted, so dumping this document gives a stable byte string; the run
// hash is FNV-1a over it. Two configs that resolve to the same parameters
// hash identically even when one spells defaults out and the other omits them.
inline nlohmann::json config_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["mode"] = c.mode;
  j["window_hours"] = c.window_hours;
  j["horizon_days"] = c.horizon_days;
  j["refuel_days"] = c.refuel_days;
  j["nse_cost"] = c.nse_cost;
  j["ramp_threshold_mw"] = c.ramp_threshold_mw;
  j["stable_hours"] = c.stable_hours;
  j["mip_gap"] = c.mip_gap;
  j["reactors"] = {{"count", c.reactors.count},
                   {"p_max_mw", c.reactors.p_max_mw},
                   {"variable_cost", c.reactors.variable_cost},
                   {"start_cost_per_mw", c.reactors.start_cost_per_mw},
                   {"shut_cost_per_mw", c.reactors.shut_cost_per_mw},
                   {"min_up_hours", c.reactors.min_up_hours},
                   {"min_dn_base_hours", c.reactors.min_dn_base_hours},
                   {"ramp_frac_per_hr", c.reactors.ramp_frac_per_hr}};
  j["degradation"] = {{"k_bol", c.degradation.k_bol},
                      {"m_per_full_power_day", c.degradation.m_per_full_power_day},
                      {"block_days", block_days(c)}};
  j["storage"] = {{"power_mw", c.storage.power_mw},
                  {"duration_hours", c.storage.duration_hours},
                  {"round_trip_efficiency", c.storage.round_trip_efficiency},
                  {"initial_soc_frac", c.storage.initial_soc_frac}};
  j["vre"] = {{"wind_mw", c.vre.wind_mw}, {"solar_mw", c.vre.solar_mw}};
  if (c.nuclide.inline_params) {
    j["nuclide"] = {{"params", nuclide_params_json(*c.nuclide.inline_params)}};
  } else {
    j["nuclide"] = {{"preset", c.nuclide.preset}};
  }
  if (!c.table.file.empty()) {
    j["table"] = {{"file", c.table.file}};
  } else {
    j["table"] = {{"margin_max_pcm", c.table.margin_max_pcm},
                  {"margin_step_pcm", c.table.margin_step_pcm},
                  {"buffer_pcm", c.table.buffer_pcm},
                  {"verify", c.table.verify}};
  }
  j["synthetic"] = {{"seed", c.synthetic.seed},
                    {"base_demand_mw", c.synthetic.base_demand_mw}};
  return j;
}

inline std::string config_hash(const ScenarioConfig& c) {
  return hash_hex(fnv1a64(config_json(c).dump()));
}

// Preset lookup order: NUCFLEX_PRESETS env var, then the baked-in source
// location, then ./presets as a last resort.
inline std::string preset_dir() {
  if (const char* env = std::getenv("NUCFLEX_PRESETS"); env && *env) return env;
#ifdef NUCFLEX_PRESET_DIR
  if (NUCFLEX_PRESET_DIR[0] != '\0') return NUCFLEX_PRESET_DIR;
#endif
  return "presets";
}

inline NuclideParams load_nuclide_preset(const std::string& name) {
  std::string path = preset_dir() + "/" + name + ".json";
  auto lines = read_lines(path);
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(path + " is not valid JSON: " + e.what());
  }
  return parse_nuclide_params(j, path);
}

inline NuclideParams resolve_nuclide(const ScenarioConfig& c) {
  if (c.nuclide.inline_params) return *c.nuclide.inline_params;
  return load_nuclide_preset(c.nuclide.preset);
}

inline std::vector<double> config_margin_grid(const TableConfig& t) {
  std::vector<double> grid;
  for (double m = 0.0; m <= t.margin_max_pcm + 1e-9; m += t.margin_step_pcm)
    grid.push_back(m);
  return grid;
}

// Either loads a prebuilt table (refusing one built for different nuclide
// parameters) or builds one from the configured margin grid.
inline FlexibilityTable resolve_table(const ScenarioConfig& c, const NuclideParams& params,
                                      int threads = 1) {
  if (!c.table.file.empty()) {
    FlexibilityTable t = load_table(c.table.file);
    if (t.params_hash != params_hash(params))
      throw input_error(c.table.file + " was built for different nuclide parameters");
    return t;
  }
  return build_table(params, default_p0_grid(), config_margin_grid(c.table),
                     c.table.buffer_pcm, c.table.verify, 0.02, threads);
}

inline std::vector<GeneratorSpec> make_reactor_specs(const ScenarioConfig& c) {
  std::vector<GeneratorSpec> out;
  out.reserve(c.reactors.count);
  for (int i = 0; i < c.reactors.count; ++i) {
    GeneratorSpec gs;
    gs.name = "r" + std::to_string(i);
    gs.p_max_mw = c.reactors.p_max_mw;
    gs.variable_cost = c.reactors.variable_cost;
    gs.start_cost_per_mw = c.reactors.start_cost_per_mw;
    gs.shut_cost_per_mw = c.reactors.shut_cost_per_mw;
    gs.min_up_hours = c.reactors.min_up_hours;
    gs.min_dn_base_hours = c.reactors.min_dn_base_hours;
    gs.ramp_frac_per_hr = c.reactors.ramp_frac_per_hr;
    out.push_back(gs);
  }
  return out;
}

inline StorageSpec make_storage_spec(const ScenarioConfig& c) {
  StorageSpec s;
  s.power_mw = c.storage.power_mw;
  s.energy_mwh = c.storage.power_mw * c.storage.duration_hours;
  s.round_trip_efficiency = c.storage.round_trip_efficiency;
  return s;
}

inline DegradationParams make_degradation(const ScenarioConfig& c) {
  DegradationParams d;
  d.k_bol = c.degradation.k_bol;
  d.m_per_fpd = c.degradation.m_per_full_power_day;
  d.block_scale = block_days(c);
  return d;
}

}  // namespace nucflex
