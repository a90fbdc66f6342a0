#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nucflex/milp.hpp"
#include "nucflex/solver.hpp"

namespace nucflex {

struct GeneratorSpec {
  std::string name;
  double p_max_mw = 0.0;
  double variable_cost = 0.0;      // $/MWh
  double start_cost_per_mw = 0.0;  // $ per MW of capacity per start
  double shut_cost_per_mw = 0.0;
  int min_up_hours = 1;
  int min_dn_base_hours = 1;
  double ramp_frac_per_hr = 1.0;  // output change cap as a fraction of p_max
};

struct StorageSpec {
  double power_mw = 0.0;  // zero disables storage
  double energy_mwh = 0.0;
  double round_trip_efficiency = 1.0;  // applied on charge
};

// Operating envelope a reactor carries into one window: the poisoning-aware
// floor, the effective minimum downtime, and any forced outage hours at the
// start of the window (refueling).
struct NuclearWindowLimits {
  double p_min_frac = 0.0;
  int min_dn_hr = 1;
  int forced_offline_hr = 0;
};

struct BoundaryState {
  bool committed = false;
  double p_mw = 0.0;
  int hours_on = 0;   // trailing consecutive committed hours before the window
  int hours_off = 0;  // trailing consecutive offline hours before the window
  int stable_remaining = 0;      // owed stability hours from a prior down-ramp
  bool ramp_down_active = false; // the boundary hour itself was a down-ramp
};

struct SystemBoundary {
  double storage_soc_mwh = 0.0;
};

struct UCInstance {
  int T = 0;
  std::vector<double> demand_mw;
  std::vector<double> vre_avail_mw;  // may be empty for none
  double nse_cost = 9000.0;
  double ramp_threshold_mw = 1.0;  // output move below this is not a ramp event
  int stable_hours = 6;
  std::vector<GeneratorSpec> gens;
  std::vector<NuclearWindowLimits> limits;
  std::vector<BoundaryState> boundary;
  StorageSpec storage;
  SystemBoundary sys;
};

struct GenVars {
  std::vector<int> p, p_aux, z_on, z_start, z_shut, rd, up, st;
  bool reduced = false;  // floor at capacity: ramp machinery dropped
  bool seam_ramp_rows = true;
  int forced_hr = 0;
  double pmin_mw = 0.0;
};

struct VarMap {
  std::vector<GenVars> gens;
  std::vector<int> vre_used, nse, ch, dis, soc;
};

struct UCBuild {
  MilpModel model;
  VarMap vars;
  std::vector<std::string> seam_notes;
};

// The committed floor rose past the boundary operating point, so the staged
// descent encoded by the hour-0 ramp rows has no feasible anchor.
inline bool pmin_escalated(const BoundaryState& b, double pmin_mw) {
  return b.committed && b.p_mw < pmin_mw - 1e-9;
}

inline void validate(const UCInstance& inst) {
  if (inst.T <= 0) throw precondition_error("window length must be positive");
  if (static_cast<int>(inst.demand_mw.size()) != inst.T)
    throw precondition_error("demand series length mismatch");
  if (!inst.vre_avail_mw.empty() &&
      static_cast<int>(inst.vre_avail_mw.size()) != inst.T)
    throw precondition_error("vre series length mismatch");
  if (inst.gens.size() != inst.limits.size() || inst.gens.size() != inst.boundary.size())
    throw precondition_error("per-generator vectors must align");
  for (double d : inst.demand_mw)
    if (d < 0) throw precondition_error("demand must be non-negative");
  for (double v : inst.vre_avail_mw)
    if (v < 0) throw precondition_error("vre availability must be non-negative");
  for (const auto& gs : inst.gens) {
    if (gs.p_max_mw <= 0) throw precondition_error("generator capacity must be positive");
    if (gs.min_up_hours < 1 || gs.min_dn_base_hours < 1)
      throw precondition_error("minimum up/down times must be at least one hour");
    if (gs.ramp_frac_per_hr <= 0 || gs.ramp_frac_per_hr > 1)
      throw precondition_error("ramp fraction must lie in (0, 1]");
  }
  for (const auto& lim : inst.limits) {
    if (lim.p_min_frac < 0 || lim.p_min_frac > 1)
      throw precondition_error("window floor fraction must lie in [0, 1]");
    if (lim.min_dn_hr < 1) throw precondition_error("window min-down must be positive");
    if (lim.forced_offline_hr < 0)
      throw precondition_error("forced outage hours must be non-negative");
  }
  if (inst.storage.power_mw < 0 || inst.storage.energy_mwh < 0 ||
      inst.storage.round_trip_efficiency <= 0 ||
      inst.storage.round_trip_efficiency > 1)
    throw precondition_error("storage parameters out of range");
  if (inst.sys.storage_soc_mwh < -1e-9 ||
      inst.sys.storage_soc_mwh > inst.storage.energy_mwh + 1e-9)
    throw precondition_error("boundary state of charge outside the reservoir");
  if (inst.stable_hours < 0) throw precondition_error("stable hours must be non-negative");
  if (inst.ramp_threshold_mw <= 0)
    throw precondition_error("ramp threshold must be positive");
}

inline UCBuild build_uc(const UCInstance& inst) {
  validate(inst);
  UCBuild b;
  MilpModel& m = b.model;
  m.name = "uc";
  int T = inst.T;
  b.vars.gens.resize(inst.gens.size());

  for (size_t g = 0; g < inst.gens.size(); ++g) {
    const GeneratorSpec& gs = inst.gens[g];
    const NuclearWindowLimits& lim = inst.limits[g];
    const BoundaryState& bd = inst.boundary[g];
    GenVars& gv = b.vars.gens[g];
    std::string tag = "_g" + std::to_string(g) + "_t";

    double pmax = gs.p_max_mw;
    double pmin = lim.p_min_frac * pmax;
    gv.pmin_mw = pmin;
    gv.reduced = pmin >= pmax - 1e-9;
    gv.forced_hr = std::min(lim.forced_offline_hr, T);
    bool forced_now = gv.forced_hr > 0;
    bool escalated = !forced_now && pmin_escalated(bd, pmin);
    gv.seam_ramp_rows = !forced_now && !escalated;
    if (escalated)
      b.seam_notes.push_back(gs.name +
                             ": committed floor rose above the boundary output; "
                             "hour-0 ramp continuity waived");

    for (int t = 0; t < T; ++t) {
      std::string s = tag + std::to_string(t);
      gv.p.push_back(m.add_var("p" + s, 0, pmax, VarKind::Continuous, gs.variable_cost));
      if (!gv.reduced)
        gv.p_aux.push_back(
            m.add_var("paux" + s, 0, std::max(0.0, pmax - pmin), VarKind::Continuous, 0));
      gv.z_on.push_back(m.add_var("on" + s, 0, 1, VarKind::Binary, 0));
      // start/shut integrality is implied by the commitment transition row
      // once z_on is integral, and their net is pinned there, so a fractional
      // pair only adds a common surplus that tightens the min-up/down rows
      // and never understates cost; declaring them continuous keeps the
      // branching space to the variables that carry real decisions
      gv.z_start.push_back(
          m.add_var("start" + s, 0, 1, VarKind::Continuous, gs.start_cost_per_mw * pmax));
      gv.z_shut.push_back(
          m.add_var("shut" + s, 0, 1, VarKind::Continuous, gs.shut_cost_per_mw * pmax));
      if (!gv.reduced) {
        // rd and up stay binary: fractional rd weakens the stability dwell it
        // triggers and fractional up would legalize sub-threshold moves. st
        // is their integral complement through the hourly partition row.
        gv.rd.push_back(m.add_var("rd" + s, 0, 1, VarKind::Binary, 0));
        gv.up.push_back(m.add_var("up" + s, 0, 1, VarKind::Binary, 0));
        gv.st.push_back(m.add_var("st" + s, 0, 1, VarKind::Continuous, 0));
      }
    }

    // forced outage pins the unit offline and clears every boundary carry
    for (int t = 0; t < gv.forced_hr; ++t) m.vars[gv.z_on[t]].hi = 0;

    if (!forced_now) {
      if (bd.committed)
        for (int t = 0; t < std::min(T, gs.min_up_hours - bd.hours_on); ++t)
          m.vars[gv.z_on[t]].lo = 1;
      if (!bd.committed)
        for (int t = 0; t < std::min(T, lim.min_dn_hr - bd.hours_off); ++t)
          m.vars[gv.z_on[t]].hi = 0;
      if (bd.committed && bd.stable_remaining > 0) {
        for (int t = 0; t < std::min(T, bd.stable_remaining); ++t) {
          if (gv.reduced)
            m.vars[gv.z_on[t]].lo = 1;
          else
            m.vars[gv.st[t]].lo = 1;
        }
      }
      if (bd.committed && bd.ramp_down_active) {
        // a down-ramp ran through the boundary: either it continues at hour 0
        // or the stability dwell starts immediately
        for (int j = 0; j < std::min(T, inst.stable_hours); ++j) {
          if (gv.reduced)
            m.vars[gv.z_on[j]].lo = 1;
          else
            m.add_row(RowSense::GE, 1, {{gv.st[j], 1}, {gv.rd[0], 1}});
        }
      }
    }

    // the transition anchor keeps the true boundary commitment even under a
    // forced outage so that entering refueling charges one shutdown
    double z_prev = bd.committed ? 1.0 : 0.0;
    for (int t = 0; t < T; ++t) {
      // capacity gating
      m.add_row(RowSense::LE, 0, {{gv.p[t], 1}, {gv.z_on[t], -pmax}});
      m.add_row(RowSense::GE, 0, {{gv.p[t], 1}, {gv.z_on[t], -pmin}});
      // commitment transition
      if (t == 0)
        m.add_row(RowSense::EQ, z_prev,
                  {{gv.z_on[0], 1}, {gv.z_start[0], -1}, {gv.z_shut[0], 1}});
      else
        m.add_row(RowSense::EQ, 0,
                  {{gv.z_on[t], 1}, {gv.z_on[t - 1], -1}, {gv.z_start[t], -1},
                   {gv.z_shut[t], 1}});
      // minimum up / down windows over in-window transitions
      {
        std::vector<std::pair<int, double>> terms{{gv.z_on[t], 1}};
        for (int tau = std::max(0, t - gs.min_up_hours + 1); tau <= t; ++tau)
          terms.emplace_back(gv.z_start[tau], -1);
        m.add_row(RowSense::GE, 0, std::move(terms));
      }
      {
        std::vector<std::pair<int, double>> terms{{gv.z_on[t], 1}};
        for (int tau = std::max(0, t - inst.limits[g].min_dn_hr + 1); tau <= t; ++tau)
          terms.emplace_back(gv.z_shut[tau], 1);
        m.add_row(RowSense::LE, 1, std::move(terms));
      }
    }

    if (!gv.reduced) {
      double delta = inst.ramp_threshold_mw;
      double M = pmax;
      double ramp_up = gs.ramp_frac_per_hr * pmax;
      double ramp_dn = gs.ramp_frac_per_hr * pmax;
      double aux_b = bd.committed ? bd.p_mw - pmin : 0.0;

      for (int t = 0; t < T; ++t) {
        // operating-point excess above the committed floor
        m.add_row(RowSense::EQ, 0,
                  {{gv.p[t], 1}, {gv.z_on[t], -pmin}, {gv.p_aux[t], -1}});
        // every committed hour is ramping down, ramping up, or stable
        m.add_row(RowSense::EQ, 0,
                  {{gv.rd[t], 1}, {gv.up[t], 1}, {gv.st[t], 1}, {gv.z_on[t], -1}});

        bool seam = t == 0;
        if (seam && !gv.seam_ramp_rows) continue;
        // rows below reference the hour before t; at the seam that hour's
        // operating point is the boundary constant aux_b folded into the rhs
        auto prev_term = [&](double sign) {
          std::vector<std::pair<int, double>> base;
          if (!seam) base.emplace_back(gv.p_aux[t - 1], sign);
          return base;
        };
        double rhs_prev = seam ? -aux_b : 0.0;

        // down-ramp event detection: rd = 1 exactly when the drop reaches delta
        {
          auto terms = prev_term(1);
          terms.emplace_back(gv.p_aux[t], -1);
          terms.emplace_back(gv.rd[t], -(M + delta));
          m.add_row(RowSense::GE, -M + rhs_prev, std::move(terms));
        }
        {
          auto terms = prev_term(1);
          terms.emplace_back(gv.p_aux[t], -1);
          terms.emplace_back(gv.rd[t], -M);
          m.add_row(RowSense::LE, delta + rhs_prev, std::move(terms));
        }
        // up-ramp event detection, symmetric
        {
          auto terms = prev_term(-1);
          terms.emplace_back(gv.p_aux[t], 1);
          terms.emplace_back(gv.up[t], -(M + delta));
          m.add_row(RowSense::GE, -M - rhs_prev, std::move(terms));
        }
        {
          auto terms = prev_term(-1);
          terms.emplace_back(gv.p_aux[t], 1);
          terms.emplace_back(gv.up[t], -M);
          m.add_row(RowSense::LE, delta - rhs_prev, std::move(terms));
        }
        // stable hours hold the operating point exactly
        {
          auto terms = prev_term(1);
          terms.emplace_back(gv.p_aux[t], -1);
          terms.emplace_back(gv.st[t], M);
          m.add_row(RowSense::LE, M + rhs_prev, std::move(terms));
        }
        {
          auto terms = prev_term(-1);
          terms.emplace_back(gv.p_aux[t], 1);
          terms.emplace_back(gv.st[t], M);
          m.add_row(RowSense::LE, M - rhs_prev, std::move(terms));
        }
        // hourly ramp-rate caps
        {
          auto terms = prev_term(1);
          terms.emplace_back(gv.p_aux[t], -1);
          m.add_row(RowSense::LE, ramp_dn + rhs_prev, std::move(terms));
        }
        {
          auto terms = prev_term(-1);
          terms.emplace_back(gv.p_aux[t], 1);
          m.add_row(RowSense::LE, ramp_up - rhs_prev, std::move(terms));
        }
      }

      // a down-ramp event ending at t opens a stability dwell
      for (int t = 0; t + 1 < T; ++t)
        for (int k = 1; k <= inst.stable_hours && t + k < T; ++k)
          m.add_row(RowSense::GE, 0,
                    {{gv.st[t + k], 1}, {gv.rd[t], -1}, {gv.rd[t + 1], 1}});
    }
  }

  // system variables and the hourly balance
  bool has_vre = !inst.vre_avail_mw.empty();
  bool has_storage = inst.storage.power_mw > 0;
  for (int t = 0; t < T; ++t) {
    std::string s = "_t" + std::to_string(t);
    if (has_vre)
      b.vars.vre_used.push_back(
          m.add_var("vre" + s, 0, inst.vre_avail_mw[t], VarKind::Continuous, 0));
    b.vars.nse.push_back(
        m.add_var("nse" + s, 0, inst.demand_mw[t], VarKind::Continuous, inst.nse_cost));
    if (has_storage) {
      b.vars.ch.push_back(
          m.add_var("ch" + s, 0, inst.storage.power_mw, VarKind::Continuous, 0));
      b.vars.dis.push_back(
          m.add_var("dis" + s, 0, inst.storage.power_mw, VarKind::Continuous, 0));
      b.vars.soc.push_back(
          m.add_var("soc" + s, 0, inst.storage.energy_mwh, VarKind::Continuous, 0));
    }
  }
  for (int t = 0; t < T; ++t) {
    std::vector<std::pair<int, double>> terms;
    for (auto& gv : b.vars.gens) terms.emplace_back(gv.p[t], 1);
    if (has_vre) terms.emplace_back(b.vars.vre_used[t], 1);
    if (has_storage) {
      terms.emplace_back(b.vars.dis[t], 1);
      terms.emplace_back(b.vars.ch[t], -1);
    }
    terms.emplace_back(b.vars.nse[t], 1);
    m.add_row(RowSense::EQ, inst.demand_mw[t], std::move(terms));
    if (has_storage) {
      double eta = inst.storage.round_trip_efficiency;
      if (t == 0)
        m.add_row(RowSense::EQ, inst.sys.storage_soc_mwh,
                  {{b.vars.soc[0], 1}, {b.vars.ch[0], -eta}, {b.vars.dis[0], 1}});
      else
        m.add_row(RowSense::EQ, 0,
                  {{b.vars.soc[t], 1}, {b.vars.soc[t - 1], -1}, {b.vars.ch[t], -eta},
                   {b.vars.dis[t], 1}});
    }
  }
  return b;
}

struct GenHour {
  double p = 0.0;
  int z_on = 0, z_start = 0, z_shut = 0, rd = 0, up = 0, st = 0;
};

struct UCSolution {
  double objective = 0.0;
  double var_cost = 0.0, start_cost = 0.0, shut_cost = 0.0, nse_cost = 0.0;
  std::vector<std::vector<GenHour>> gen;  // [g][t]
  std::vector<double> nse, vre_used, ch, dis, soc;
  SolveReport report;
};

inline UCSolution extract(const UCInstance& inst, const UCBuild& b,
                          const MilpSolution& ms) {
  if (ms.x.empty()) throw solver_error("no solution to extract");
  if (!check_solution(b.model, ms.x))
    throw internal_error("window solution failed verification");
  const std::vector<double>& x = ms.x;
  UCSolution sol;
  sol.report = ms.report;
  sol.gen.resize(inst.gens.size());
  auto bin = [&](int idx) { return static_cast<int>(std::lround(x[idx])); };
  for (size_t g = 0; g < inst.gens.size(); ++g) {
    const GenVars& gv = b.vars.gens[g];
    const GeneratorSpec& gs = inst.gens[g];
    sol.gen[g].resize(inst.T);
    for (int t = 0; t < inst.T; ++t) {
      GenHour& h = sol.gen[g][t];
      h.p = x[gv.p[t]];
      h.z_on = bin(gv.z_on[t]);
      h.z_start = bin(gv.z_start[t]);
      h.z_shut = bin(gv.z_shut[t]);
      if (gv.reduced) {
        h.rd = 0;
        h.up = 0;
        h.st = h.z_on;
      } else {
        h.rd = bin(gv.rd[t]);
        h.up = bin(gv.up[t]);
        h.st = bin(gv.st[t]);
      }
      sol.var_cost += gs.variable_cost * h.p;
      sol.start_cost += gs.start_cost_per_mw * gs.p_max_mw * h.z_start;
      sol.shut_cost += gs.shut_cost_per_mw * gs.p_max_mw * h.z_shut;
    }
  }
  for (int t = 0; t < inst.T; ++t) {
    sol.nse.push_back(x[b.vars.nse[t]]);
    sol.nse_cost += inst.nse_cost * sol.nse.back();
    if (!b.vars.vre_used.empty()) sol.vre_used.push_back(x[b.vars.vre_used[t]]);
    if (!b.vars.soc.empty()) {
      sol.ch.push_back(x[b.vars.ch[t]]);
      sol.dis.push_back(x[b.vars.dis[t]]);
      sol.soc.push_back(x[b.vars.soc[t]]);
    }
  }
  sol.objective = sol.var_cost + sol.start_cost + sol.shut_cost + sol.nse_cost;
  double ref = ms.report.objective;
  if (std::abs(sol.objective - ref) > 1e-6 * std::max(1.0, std::abs(ref)))
    throw internal_error("extracted cost " + fmt_double(sol.objective) +
                         " deviates from solver objective " + fmt_double(ref));
  return sol;
}

inline BoundaryState next_boundary(const UCInstance& inst, const UCSolution& sol,
                                   int g) {
  const auto& hours = sol.gen[g];
  const BoundaryState& prev = inst.boundary[g];
  int T = inst.T;
  BoundaryState nb;
  nb.committed = hours[T - 1].z_on == 1;

  int trail = 0;
  if (nb.committed) {
    while (trail < T && hours[T - 1 - trail].z_on == 1) ++trail;
    nb.hours_on = trail;
    if (trail == T && prev.committed) nb.hours_on += prev.hours_on;
    nb.p_mw = hours[T - 1].p;
  } else {
    while (trail < T && hours[T - 1 - trail].z_on == 0) ++trail;
    nb.hours_off = trail;
    if (trail == T && !prev.committed) nb.hours_off += prev.hours_off;
  }

  if (nb.committed) {
    int last_rd = -1;
    for (int t = 0; t < T; ++t)
      if (hours[t].rd == 1) last_rd = t;
    if (last_rd == T - 1) {
      nb.ramp_down_active = true;
    } else if (last_rd >= 0) {
      nb.stable_remaining = std::max(0, inst.stable_hours - (T - 1 - last_rd));
    } else if (prev.committed && prev.ramp_down_active) {
      nb.stable_remaining = std::max(0, inst.stable_hours - T);
    } else if (prev.committed && prev.stable_remaining > T) {
      nb.stable_remaining = prev.stable_remaining - T;
    }
  }
  return nb;
}

inline SystemBoundary next_system_boundary(const UCInstance& inst,
                                           const UCSolution& sol) {
  if (sol.soc.empty()) return inst.sys;
  return SystemBoundary{sol.soc.back()};
}

}  // namespace nucflex
