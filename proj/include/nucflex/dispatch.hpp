#pragma once

#include <algorithm>
#include <climits>
#include <string>
#include <vector>

#include "nucflex/flexibility.hpp"
#include "nucflex/reactivity.hpp"
#include "nucflex/scenario.hpp"
#include "nucflex/series.hpp"
#include "nucflex/uc.hpp"

// Rolling-horizon dispatch with endogenous refueling. Each window reads the
// fleet's core state, derives operating limits from the margin table, commits
// the fleet with the MILP, then charges realized burnup back onto every core
// before the next window. Refueling is triggered when a core's margin is
// exhausted and holds the unit offline for a fixed number of days, after
// which the multiplication factor resets to beginning-of-life.

namespace nucflex {

struct ReactorWindowRecord {
  int window = 0;
  int reactor = 0;
  double k_eff = 0.0;       // value the window's limits were derived from
  double margin_pcm = 0.0;
  double alpha = 0.0;       // realized capacity factor over the window
  double pmin_frac = 0.0;   // effective floor applied (mode base vs table)
  int deadtime_hr = 0;      // effective minimum downtime applied
  bool refueling = false;   // window contains forced outage hours
};

// Core state after the window has been charged.
struct CoreStateRecord {
  int window = 0;
  double k_eff = 0.0;
  int refuel_countdown_hr = 0;
};

struct EventRecord {
  int window = 0;
  int reactor = -1;  // -1 for system-level events
  std::string kind;
  std::string detail;
};

struct DispatchMetrics {
  int windows = 0;
  int reactors = 0;
  double demand_mwh = 0.0;
  double nse_mwh = 0.0;
  double nse_pct = 0.0;
  bool has_vre = false;
  double vre_avail_mwh = 0.0;
  double vre_used_mwh = 0.0;
  double curtail_pct = 0.0;
  double cost_total = 0.0;
  double cost_excl_nse = 0.0;
  double var_cost = 0.0;
  double start_cost = 0.0;
  double shut_cost = 0.0;
  double nse_cost = 0.0;
  double nse_operational_mwh = 0.0;  // NSE in windows with no reactor on outage
  double nse_outage_mwh = 0.0;
  int first_refuel_window = -1;
  bool conservation_ok = true;
};

struct DispatchResult {
  ScenarioConfig config;
  std::vector<UCInstance> instances;
  std::vector<UCSolution> windows;
  std::vector<ReactorWindowRecord> trajectory;            // window-major
  std::vector<std::vector<CoreStateRecord>> core_state;   // [reactor][window]
  std::vector<EventRecord> events;
  DispatchMetrics metrics;
};

// first_refuel_window of -1 means "never"; order it after every real window.
inline int refuel_order_key(int first_refuel_window) {
  return first_refuel_window < 0 ? INT_MAX : first_refuel_window;
}

inline DispatchMetrics compute_metrics(const DispatchResult& r) {
  DispatchMetrics m;
  m.windows = static_cast<int>(r.windows.size());
  m.reactors = r.config.reactors.count;
  double objective_sum = 0.0;
  for (size_t w = 0; w < r.windows.size(); ++w) {
    const UCInstance& inst = r.instances[w];
    const UCSolution& sol = r.windows[w];
    objective_sum += sol.objective;
    m.var_cost += sol.var_cost;
    m.start_cost += sol.start_cost;
    m.shut_cost += sol.shut_cost;
    m.nse_cost += sol.nse_cost;
    double w_nse = 0.0;
    for (double v : sol.nse) w_nse += v;
    for (double d : inst.demand_mw) m.demand_mwh += d;
    for (double v : inst.vre_avail_mw) m.vre_avail_mwh += v;
    for (double v : sol.vre_used) m.vre_used_mwh += v;
    m.nse_mwh += w_nse;
    bool outage = false;
    for (const auto& lim : inst.limits)
      if (lim.forced_offline_hr > 0) outage = true;
    (outage ? m.nse_outage_mwh : m.nse_operational_mwh) += w_nse;
  }
  m.cost_total = objective_sum;
  m.cost_excl_nse = objective_sum - m.nse_cost;
  m.nse_pct = m.demand_mwh > 0 ? 100.0 * m.nse_mwh / m.demand_mwh : 0.0;
  m.has_vre = m.vre_avail_mwh > 0.0;
  m.curtail_pct =
      m.has_vre ? 100.0 * (m.vre_avail_mwh - m.vre_used_mwh) / m.vre_avail_mwh : 0.0;
  for (const auto& ev : r.events) {
    if (ev.kind == "refuel_start") {
      m.first_refuel_window = m.first_refuel_window < 0
                                  ? ev.window
                                  : std::min(m.first_refuel_window, ev.window);
    }
  }
  double component_sum = m.var_cost + m.start_cost + m.shut_cost + m.nse_cost;
  double tol = 1e-6 * std::max(1.0, std::abs(objective_sum));
  m.conservation_ok = std::abs(objective_sum - component_sum) <= tol;
  if (!m.conservation_ok)
    throw internal_error("cost components do not sum to the objective total");
  return m;
}

// Deterministic per-window search budget. A window that exhausts it keeps its
// best incumbent and logs a solver_limit event instead of stalling the run.
inline constexpr long kNodeBudgetPerWindow = 1500;

// Always-feasible incumbent for a window: every unit holds its boundary
// commitment (outage units stay down) and power rides flat, letting the
// unserved-energy and curtailment slacks absorb any imbalance. Handing this
// to the solver guarantees a node-limited window still returns a schedule.
inline std::vector<std::pair<int, int>> freeze_commitment_hint(const UCInstance& inst,
                                                               const UCBuild& build) {
  std::vector<std::pair<int, int>> hint;
  for (size_t g = 0; g < build.vars.gens.size(); ++g) {
    const GenVars& gv = build.vars.gens[g];
    int on = gv.forced_hr > 0 ? 0 : (inst.boundary[g].committed ? 1 : 0);
    for (int v : gv.z_on) hint.emplace_back(v, on);
    for (int v : gv.rd) hint.emplace_back(v, 0);
    for (int v : gv.up) hint.emplace_back(v, 0);
  }
  return hint;
}

inline DispatchResult run_dispatch(const ScenarioConfig& config,
                                   const FlexibilityTable& table,
                                   const TimeSeriesBundle& series) {
  validate(config);
  validate(series);
  int horizon_hr = config.horizon_days * 24;
  if (series.hours() < horizon_hr)
    throw input_error("series covers " + std::to_string(series.hours()) +
                      " hours but the horizon needs " + std::to_string(horizon_hr));
  bool vre_active = series.has_vre() && (config.vre.wind_mw + config.vre.solar_mw) > 0.0;

  DispatchResult res;
  res.config = config;
  int n_react = config.reactors.count;
  std::vector<GeneratorSpec> gens = make_reactor_specs(config);
  StorageSpec storage = make_storage_spec(config);
  DegradationParams deg = make_degradation(config);
  double pmin_base = mode_pmin_base(config.mode);

  std::vector<double> k(n_react, deg.k_bol);
  std::vector<int> countdown_hr(n_react, 0);
  std::vector<BoundaryState> boundary(n_react);
  for (auto& b : boundary) {
    b.committed = true;
    b.p_mw = config.reactors.p_max_mw;
    b.hours_on = 1000;  // long-running unit, no start carry into the horizon
  }
  SystemBoundary sys;
  sys.storage_soc_mwh = config.storage.initial_soc_frac * storage.energy_mwh;

  res.core_state.resize(n_react);
  int n_windows = window_count(config);

  for (int w = 0, h0 = 0; w < n_windows; ++w) {
    int T = std::min(config.window_hours, horizon_hr - h0);
    UCInstance inst;
    inst.T = T;
    inst.demand_mw.assign(series.demand_mw.begin() + h0,
                          series.demand_mw.begin() + h0 + T);
    if (vre_active) {
      inst.vre_avail_mw.resize(T);
      for (int t = 0; t < T; ++t)
        inst.vre_avail_mw[t] = config.vre.wind_mw * series.wind_cf[h0 + t] +
                               config.vre.solar_mw * series.solar_cf[h0 + t];
    }
    inst.nse_cost = config.nse_cost;
    inst.ramp_threshold_mw = config.ramp_threshold_mw;
    inst.stable_hours = config.stable_hours;
    inst.gens = gens;
    inst.storage = storage;
    inst.sys = sys;
    inst.limits.resize(n_react);
    inst.boundary = boundary;

    std::vector<double> k_used(n_react, 0.0);
    std::vector<double> margin_used(n_react, 0.0);
    for (int g = 0; g < n_react; ++g) {
      if (countdown_hr[g] == 0 && k[g] <= 1.0 + kCriticalTol) {
        countdown_hr[g] = config.refuel_days * 24;
        res.events.push_back(
            {w, g, "refuel_start", "margin exhausted at k_eff=" + fmt_double(k[g])});
      }
      int forced = std::min(countdown_hr[g], T);
      bool completes = countdown_hr[g] > 0 && countdown_hr[g] <= T;
      double k_margin = completes ? deg.k_bol : k[g];
      double margin = reactivity_margin_pcm(k_margin);
      const TableRow& row = query(table, margin);
      NuclearWindowLimits lim;
      lim.p_min_frac = std::max(pmin_base, row.pmin_frac);
      lim.min_dn_hr = std::max(config.reactors.min_dn_base_hours, row.deadtime_hr);
      lim.forced_offline_hr = forced;
      inst.limits[g] = lim;
      k_used[g] = k_margin;
      margin_used[g] = margin;
      if (forced == 0 && pmin_escalated(boundary[g], lim.p_min_frac * gens[g].p_max_mw))
        res.events.push_back({w, g, "pmin_escalation",
                              "floor " + fmt_double(lim.p_min_frac * gens[g].p_max_mw) +
                                  " MW above boundary output " + fmt_double(boundary[g].p_mw) +
                                  " MW"});
    }

    UCBuild build = build_uc(inst);
    SolveOptions opts;
    opts.rel_gap = config.mip_gap;
    opts.node_limit = kNodeBudgetPerWindow;
    opts.hints.push_back(freeze_commitment_hint(inst, build));
    MilpSolution ms = solve_milp(build.model, opts);
    if (ms.report.status == MilpStatus::NodeLimit || ms.report.status == MilpStatus::TimeLimit) {
      if (ms.x.empty())
        throw solver_error("window " + std::to_string(w) +
                           " hit a solver limit with no feasible solution");
      res.events.push_back({w, -1, "solver_limit",
                            std::string(to_string(ms.report.status)) + " accepted at gap " +
                                fmt_double(ms.report.rel_gap)});
    } else if (ms.report.status != MilpStatus::Optimal &&
               ms.report.status != MilpStatus::GapFeasible) {
      throw internal_error("window " + std::to_string(w) + " came back " +
                           std::string(to_string(ms.report.status)));
    }
    UCSolution sol = extract(inst, build, ms);

    for (int g = 0; g < n_react; ++g) {
      std::vector<double> p(T);
      for (int t = 0; t < T; ++t) p[t] = sol.gen[g][t].p;
      double alpha = capacity_factor(p, gens[g].p_max_mw);
      bool refueling = countdown_hr[g] > 0;
      if (countdown_hr[g] > 0) {
        int served = std::min(countdown_hr[g], T);
        countdown_hr[g] -= served;
        if (countdown_hr[g] == 0) {
          k[g] = degrade(deg.k_bol, deg, alpha);
          res.events.push_back(
              {w, g, "refuel_complete", "k_eff reset to " + fmt_double(deg.k_bol)});
        }
        // mid-outage: the core is sealed, k stays frozen
      } else {
        k[g] = degrade(k[g], deg, alpha);
      }
      res.trajectory.push_back({w, g, k_used[g], margin_used[g], alpha,
                                inst.limits[g].p_min_frac, inst.limits[g].min_dn_hr,
                                refueling});
      res.core_state[g].push_back({w, k[g], countdown_hr[g]});
      boundary[g] = next_boundary(inst, sol, g);
    }
    sys = next_system_boundary(inst, sol);
    res.instances.push_back(std::move(inst));
    res.windows.push_back(std::move(sol));
    h0 += T;
  }
  res.metrics = compute_metrics(res);
  return res;
}

}  // namespace nucflex
