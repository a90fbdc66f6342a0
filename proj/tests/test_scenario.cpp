#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "nucflex/scenario.hpp"

using namespace nucflex;

TEST_CASE("empty config document yields the default fleet") {
  ScenarioConfig c = parse_config_text("{}");
  REQUIRE(c.mode == 1);
  REQUIRE(c.window_hours == 72);
  REQUIRE(c.horizon_days == 90);
  REQUIRE(c.refuel_days == 35);
  REQUIRE(c.nse_cost == 9000.0);
  REQUIRE(c.reactors.count == 3);
  REQUIRE(c.reactors.variable_cost == 2.8);
  REQUIRE(c.reactors.start_cost_per_mw == 107.68);
  REQUIRE(c.storage.power_mw == 4200.0);
  REQUIRE(c.vre.wind_mw == 10000.0);
  REQUIRE(c.nuclide.preset == "ap1000");
  REQUIRE_FALSE(c.nuclide.inline_params.has_value());
  REQUIRE(window_count(c) == 30);
  REQUIRE(block_days(c) == 3.0);
}

TEST_CASE("unknown keys are rejected at every level") {
  REQUIRE_THROWS_AS(parse_config_text("{\"surprise\": 1}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"reactors\": {\"pmax\": 900}}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"storage\": {\"soc\": 0.5}}"), input_error);
  REQUIRE_THROWS_AS(
      parse_config_text("{\"nuclide\": {\"params\": {\"lambda\": 0.1}}}"), input_error);
}

TEST_CASE("type and range violations are rejected") {
  REQUIRE_THROWS_AS(parse_config_text("{\"mode\": \"one\"}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"mode\": 4}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"window_hours\": 0}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"mip_gap\": -0.1}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"degradation\": {\"k_bol\": 0.99}}"), input_error);
  REQUIRE_THROWS_AS(
      parse_config_text("{\"storage\": {\"round_trip_efficiency\": 1.2}}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("{\"synthetic\": {\"seed\": -3}}"), input_error);
  REQUIRE_THROWS_AS(parse_config_text("not json"), input_error);
}

TEST_CASE("config hash is canonical") {
  ScenarioConfig defaults = parse_config_text("{}");
  ScenarioConfig spelled = parse_config_text(
      "{\"mode\": 1, \"window_hours\": 72, \"reactors\": {\"count\": 3}}");
  REQUIRE(config_hash(defaults) == config_hash(spelled));

  ScenarioConfig changed = parse_config_text("{\"mode\": 2}");
  REQUIRE(config_hash(changed) != config_hash(defaults));

  // block_days resolves to the window length, so spelling that out is a no-op
  ScenarioConfig block = parse_config_text("{\"degradation\": {\"block_days\": 3.0}}");
  REQUIRE(config_hash(block) == config_hash(defaults));
}

TEST_CASE("nuclide preset loads from the shipped directory") {
  ScenarioConfig c = parse_config_text("{}");
  NuclideParams p = resolve_nuclide(c);
  REQUIRE(p.lambda_i == 0.01033);
  REQUIRE(p.sigma_xe == 2.65e-18);
  REQUIRE(params_hash(p) == params_hash(ap1000_params()));
  REQUIRE_THROWS_AS(load_nuclide_preset("missing_preset"), input_error);
}

TEST_CASE("preset directory can be overridden by environment") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "nucflex_presets";
  fs::create_directories(dir);
  write_file((dir / "custom.json").string(),
             "{\"lambda_i_per_hr\": 0.105, \"nu\": 2.5}\n");
  setenv("NUCFLEX_PRESETS", dir.string().c_str(), 1);
  NuclideParams p = load_nuclide_preset("custom");
  unsetenv("NUCFLEX_PRESETS");
  REQUIRE(p.lambda_i == 0.105);
  REQUIRE(p.nu == 2.5);
  REQUIRE(p.lambda_xe == 0.0753);  // unstated fields keep defaults
  fs::remove_all(dir);
}

TEST_CASE("inline nuclide parameters take precedence over the preset") {
  ScenarioConfig c = parse_config_text(
      "{\"nuclide\": {\"preset\": \"ap1000\", \"params\": {\"nu\": 2.6}}}");
  NuclideParams p = resolve_nuclide(c);
  REQUIRE(p.nu == 2.6);
  REQUIRE_THROWS_AS(
      parse_config_text("{\"nuclide\": {\"params\": {\"nu\": -1}}}"), input_error);
}

TEST_CASE("table resolution builds or loads consistently") {
  ScenarioConfig c = parse_config_text(
      "{\"table\": {\"margin_max_pcm\": 4000, \"margin_step_pcm\": 2000, \"verify\": false}}");
  NuclideParams params = ap1000_params();
  FlexibilityTable built = resolve_table(c, params);
  REQUIRE(built.rows.size() == 3);
  REQUIRE(built.rows[0].margin_pcm == 0.0);
  REQUIRE(built.rows[2].margin_pcm == 4000.0);

  auto path = std::filesystem::temp_directory_path() / "nucflex_table.csv";
  save_table(built, path.string());
  ScenarioConfig from_file =
      parse_config_text("{\"table\": {\"file\": \"" + path.string() + "\"}}");
  FlexibilityTable loaded = resolve_table(from_file, params);
  REQUIRE(table_csv(loaded) == table_csv(built));

  NuclideParams other = params;
  other.nu = 2.5;
  REQUIRE_THROWS_AS(resolve_table(from_file, other), input_error);
  std::filesystem::remove(path);
}

TEST_CASE("solver-facing glue mirrors the config") {
  ScenarioConfig c = parse_config_text(
      "{\"reactors\": {\"count\": 2, \"p_max_mw\": 1000}, "
      "\"storage\": {\"power_mw\": 500, \"duration_hours\": 4}}");
  auto gens = make_reactor_specs(c);
  REQUIRE(gens.size() == 2);
  REQUIRE(gens[0].name == "r0");
  REQUIRE(gens[1].name == "r1");
  REQUIRE(gens[0].p_max_mw == 1000.0);
  REQUIRE(gens[0].min_up_hours == 4);

  StorageSpec s = make_storage_spec(c);
  REQUIRE(s.power_mw == 500.0);
  REQUIRE(s.energy_mwh == 2000.0);

  DegradationParams d = make_degradation(c);
  REQUIRE(d.k_bol == 1.045);
  REQUIRE(d.block_scale == 3.0);

  REQUIRE(mode_pmin_base(1) == 1.0);
  REQUIRE(mode_pmin_base(2) == 0.5);
  REQUIRE(mode_pmin_base(3) == 0.2);
}
