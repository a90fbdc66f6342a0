#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "nucflex/dispatch.hpp"
#include "nucflex/scenario.hpp"

// Result bundle serialization. A bundle is a directory of plain text files:
// a manifest (tool version, config hash, shape), the resolved config, the
// per-reactor trajectory, core states, the event log, per-window solution and
// system files, and the aggregate metrics. Everything is deterministic: no
// timestamps, no wall-clock data, doubles printed shortest-round-trip.

namespace nucflex {

inline std::string window_tag(int w) {
  std::string s = std::to_string(w);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

inline nlohmann::json metrics_json(const DispatchMetrics& m) {
  nlohmann::json j;
  j["windows"] = m.windows;
  j["reactors"] = m.reactors;
  j["demand_mwh"] = m.demand_mwh;
  j["nse_mwh"] = m.nse_mwh;
  j["nse_pct"] = m.nse_pct;
  j["has_vre"] = m.has_vre;
  j["vre_avail_mwh"] = m.vre_avail_mwh;
  j["vre_used_mwh"] = m.vre_used_mwh;
  j["curtail_pct"] = m.curtail_pct;
  j["cost_total"] = m.cost_total;
  j["cost_excl_nse"] = m.cost_excl_nse;
  j["var_cost"] = m.var_cost;
  j["start_cost"] = m.start_cost;
  j["shut_cost"] = m.shut_cost;
  j["nse_cost"] = m.nse_cost;
  j["nse_operational_mwh"] = m.nse_operational_mwh;
  j["nse_outage_mwh"] = m.nse_outage_mwh;
  j["first_refuel_window"] = m.first_refuel_window;
  j["conservation_ok"] = m.conservation_ok;
  return j;
}

inline std::string trajectory_csv(const std::vector<ReactorWindowRecord>& recs) {
  std::string out = "window,reactor,k_eff,margin_pcm,alpha,pmin_frac,deadtime_hr,refueling\n";
  for (const auto& r : recs) {
    out += std::to_string(r.window) + "," + std::to_string(r.reactor) + "," +
           fmt_double(r.k_eff) + "," + fmt_double(r.margin_pcm) + "," +
           fmt_double(r.alpha) + "," + fmt_double(r.pmin_frac) + "," +
           std::to_string(r.deadtime_hr) + "," + (r.refueling ? "1" : "0") + "\n";
  }
  return out;
}

inline std::vector<ReactorWindowRecord> parse_trajectory_csv(
    const std::vector<std::string>& lines, const std::string& path) {
  if (lines.empty() ||
      trim(lines[0]) != "window,reactor,k_eff,margin_pcm,alpha,pmin_frac,deadtime_hr,refueling")
    throw input_error(path + ": bad trajectory header");
  std::vector<ReactorWindowRecord> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(i + 1);
    auto f = split(lines[i], ',');
    if (f.size() != 8) throw input_error(ctx + ": expected 8 fields");
    ReactorWindowRecord r;
    r.window = static_cast<int>(parse_long(f[0], ctx));
    r.reactor = static_cast<int>(parse_long(f[1], ctx));
    r.k_eff = parse_double(f[2], ctx);
    r.margin_pcm = parse_double(f[3], ctx);
    r.alpha = parse_double(f[4], ctx);
    r.pmin_frac = parse_double(f[5], ctx);
    r.deadtime_hr = static_cast<int>(parse_long(f[6], ctx));
    r.refueling = parse_long(f[7], ctx) != 0;
    out.push_back(r);
  }
  return out;
}

inline std::string events_csv(const std::vector<EventRecord>& events) {
  std::string out = "window,reactor,kind,detail\n";
  for (const auto& e : events)
    out += std::to_string(e.window) + "," + std::to_string(e.reactor) + "," + e.kind +
           ",\"" + e.detail + "\"\n";
  return out;
}

inline std::string core_state_csv(const std::vector<CoreStateRecord>& recs) {
  std::string out = "block_index,k_eff,refuel_countdown_hr\n";
  for (const auto& r : recs)
    out += std::to_string(r.window) + "," + fmt_double(r.k_eff) + "," +
           std::to_string(r.refuel_countdown_hr) + "\n";
  return out;
}

inline std::string solution_csv(const UCInstance& inst, const UCSolution& sol) {
  std::string out = "hour,gen,p_mw,z_on,z_start,z_shut,rd,up,st\n";
  for (size_t g = 0; g < inst.gens.size(); ++g) {
    for (int t = 0; t < inst.T; ++t) {
      const GenHour& h = sol.gen[g][t];
      out += std::to_string(t) + "," + inst.gens[g].name + "," + fmt_double(h.p) + "," +
             std::to_string(h.z_on) + "," + std::to_string(h.z_start) + "," +
             std::to_string(h.z_shut) + "," + std::to_string(h.rd) + "," +
             std::to_string(h.up) + "," + std::to_string(h.st) + "\n";
    }
  }
  return out;
}

inline std::string system_csv(const UCInstance& inst, const UCSolution& sol) {
  std::string out =
      "hour,demand_mw,vre_avail_mw,vre_used_mw,charge_mw,discharge_mw,soc_mwh,nse_mw\n";
  for (int t = 0; t < inst.T; ++t) {
    double avail = inst.vre_avail_mw.empty() ? 0.0 : inst.vre_avail_mw[t];
    double used = sol.vre_used.empty() ? 0.0 : sol.vre_used[t];
    double ch = sol.ch.empty() ? 0.0 : sol.ch[t];
    double dis = sol.dis.empty() ? 0.0 : sol.dis[t];
    double soc = sol.soc.empty() ? 0.0 : sol.soc[t];
    out += std::to_string(t) + "," + fmt_double(inst.demand_mw[t]) + "," + fmt_double(avail) +
           "," + fmt_double(used) + "," + fmt_double(ch) + "," + fmt_double(dis) + "," +
           fmt_double(soc) + "," + fmt_double(sol.nse[t]) + "\n";
  }
  return out;
}

struct BundleManifest {
  std::string tool_version;
  std::string config_hash;
  int mode = 0;
  int windows = 0;
  int reactors = 0;
  std::vector<std::string> files;
};

// Writes the whole bundle under dir (created if needed) and returns the
// manifest that was stored alongside it.
inline BundleManifest write_bundle(const DispatchResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "windows", ec);
  if (ec) throw input_error("cannot create " + dir + ": " + ec.message());

  BundleManifest man;
  man.tool_version = kToolVersion;
  man.config_hash = config_hash(res.config);
  man.mode = res.config.mode;
  man.windows = static_cast<int>(res.windows.size());
  man.reactors = res.config.reactors.count;

  auto emit = [&](const std::string& rel, const std::string& content) {
    write_file((fs::path(dir) / rel).string(), content);
    man.files.push_back(rel);
  };
  emit("config.json", config_json(res.config).dump(2) + "\n");
  emit("trajectory.csv", trajectory_csv(res.trajectory));
  emit("events.csv", events_csv(res.events));
  for (size_t g = 0; g < res.core_state.size(); ++g)
    emit("core_state_" + std::to_string(g) + ".csv", core_state_csv(res.core_state[g]));
  for (size_t w = 0; w < res.windows.size(); ++w) {
    emit("windows/solution_" + window_tag(static_cast<int>(w)) + ".csv",
         solution_csv(res.instances[w], res.windows[w]));
    emit("windows/system_" + window_tag(static_cast<int>(w)) + ".csv",
         system_csv(res.instances[w], res.windows[w]));
  }
  emit("metrics.json", metrics_json(res.metrics).dump(2) + "\n");

  std::sort(man.files.begin(), man.files.end());
  nlohmann::json j;
  j["tool_version"] = man.tool_version;
  j["config_hash"] = man.config_hash;
  j["mode"] = man.mode;
  j["windows"] = man.windows;
  j["reactors"] = man.reactors;
  j["files"] = man.files;
  write_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
  return man;
}

inline nlohmann::json read_bundle_json(const std::string& dir, const std::string& rel) {
  auto path = (std::filesystem::path(dir) / rel).string();
  auto lines = read_lines(path);
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(path + " is not valid JSON: " + e.what());
  }
}

inline BundleManifest read_manifest(const std::string& dir) {
  nlohmann::json j = read_bundle_json(dir, "manifest.json");
  detail::expect_keys(j, {"tool_version", "config_hash", "mode", "windows", "reactors", "files"},
                      dir + "/manifest.json");
  BundleManifest man;
  man.tool_version = detail::jstr(j, "tool_version", "", "manifest");
  man.config_hash = detail::jstr(j, "config_hash", "", "manifest");
  man.mode = detail::jint(j, "mode", 0, "manifest");
  man.windows = detail::jint(j, "windows", 0, "manifest");
  man.reactors = detail::jint(j, "reactors", 0, "manifest");
  if (j.contains("files"))
    for (const auto& f : j.at("files")) man.files.push_back(f.get<std::string>());
  return man;
}

inline std::vector<ReactorWindowRecord> read_trajectory(const std::string& dir) {
  auto path = (std::filesystem::path(dir) / "trajectory.csv").string();
  return parse_trajectory_csv(read_lines(path), path);
}

// Side-by-side comparison files across bundles (one column per scenario).
struct BundleView {
  std::string label;
  BundleManifest manifest;
  std::vector<ReactorWindowRecord> trajectory;
  nlohmann::json metrics;
};

inline BundleView load_bundle(const std::string& dir) {
  BundleView v;
  v.manifest = read_manifest(dir);
  v.label = "mode" + std::to_string(v.manifest.mode);
  v.trajectory = read_trajectory(dir);
  v.metrics = read_bundle_json(dir, "metrics.json");
  return v;
}

inline std::string comparison_csv(const std::vector<BundleView>& views, const char* field) {
  bool want_alpha = std::string_view(field) == "alpha";
  std::string head = "window,reactor";
  for (const auto& v : views) head += "," + std::string(field) + "_" + v.label;
  head += "\n";
  std::string out = head;
  const auto& ref = views[0].trajectory;
  for (size_t i = 0; i < ref.size(); ++i) {
    out += std::to_string(ref[i].window) + "," + std::to_string(ref[i].reactor);
    for (const auto& v : views) {
      const auto& r = v.trajectory[i];
      if (r.window != ref[i].window || r.reactor != ref[i].reactor)
        throw input_error("bundle " + v.label + " trajectory rows do not line up");
      out += ",";
      out += want_alpha ? fmt_double(r.alpha) : fmt_double(r.pmin_frac);
    }
    out += "\n";
  }
  return out;
}

inline std::string metrics_comparison_csv(const std::vector<BundleView>& views) {
  static const char* keys[] = {"nse_pct",    "curtail_pct", "cost_total",
                               "cost_excl_nse", "nse_mwh",  "nse_operational_mwh",
                               "nse_outage_mwh", "vre_avail_mwh", "vre_used_mwh",
                               "first_refuel_window", "windows", "reactors"};
  std::string out = "metric";
  for (const auto& v : views) out += "," + v.label;
  out += "\n";
  for (const char* k : keys) {
    out += k;
    for (const auto& v : views) {
      out += ",";
      const auto& j = v.metrics.at(k);
      if (j.is_number_integer())
        out += std::to_string(j.get<long long>());
      else
        out += fmt_double(j.get<double>());
    }
    out += "\n";
  }
  return out;
}

// Merges one or more bundles into comparison files under out_dir. All bundles
// must cover the same number of windows and reactors.
inline void write_report(const std::vector<std::string>& dirs, const std::string& out_dir) {
  if (dirs.empty()) throw precondition_error("report needs at least one bundle");
  std::vector<BundleView> views;
  for (const auto& d : dirs) views.push_back(load_bundle(d));
  for (size_t i = 1; i < views.size(); ++i) {
    if (views[i].manifest.windows != views[0].manifest.windows)
      throw input_error("bundle " + dirs[i] + " covers " +
                        std::to_string(views[i].manifest.windows) + " windows, expected " +
                        std::to_string(views[0].manifest.windows));
    if (views[i].manifest.reactors != views[0].manifest.reactors)
      throw input_error("bundle " + dirs[i] + " has a different reactor count");
  }
  // Disambiguate repeated labels (two bundles of the same mode).
  std::vector<std::string> base;
  for (const auto& v : views) base.push_back(v.label);
  for (size_t i = 0; i < views.size(); ++i) {
    int dup = 0;
    for (size_t j = 0; j < i; ++j)
      if (base[j] == base[i]) ++dup;
    if (dup > 0) views[i].label += "_" + std::to_string(dup + 1);
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw input_error("cannot create " + out_dir + ": " + ec.message());
  write_file((fs::path(out_dir) / "alpha_comparison.csv").string(),
             comparison_csv(views, "alpha"));
  write_file((fs::path(out_dir) / "pmin_comparison.csv").string(),
             comparison_csv(views, "pmin"));
  write_file((fs::path(out_dir) / "metrics_comparison.csv").string(),
             metrics_comparison_csv(views));
}

// The dispatch command's stdout summary: one row per scenario with NSE share,
// curtailment share and total cost in million dollars.
inline std::string metrics_table(const std::vector<std::pair<std::string, DispatchMetrics>>& rows) {
  char buf[160];
  std::string out = "scenario      nse_pct  curtail_pct  cost_mn_usd\n";
  for (const auto& [label, m] : rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %8.2f %12.2f %12.2f\n", label.c_str(), m.nse_pct,
                  m.curtail_pct, m.cost_total / 1e6);
    out += buf;
  }
  return out;
}

}  // namespace nucflex
