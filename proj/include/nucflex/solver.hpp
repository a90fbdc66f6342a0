#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <vector>

#include "nucflex/simplex.hpp"

namespace nucflex {

enum class MilpStatus : uint8_t {
  Optimal,
  GapFeasible,  // stopped at the requested relative gap with an incumbent
  Infeasible,
  Unbounded,
  NodeLimit,
  TimeLimit,
};

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::GapFeasible: return "gap_feasible";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::NodeLimit: return "node_limit";
    case MilpStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

struct SolveOptions {
  double rel_gap = 0.0;
  long node_limit = -1;     // max LP solves, -1 for unlimited
  double time_limit_s = -1.0;
  // candidate binary assignments (variable, value), each tried as an incumbent
  // before branching starts; an infeasible hint is skipped silently
  std::vector<std::vector<std::pair<int, int>>> hints;
};

struct SolveReport {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double best_bound = -kInf;
  double rel_gap = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_ms = 0.0;
};

struct MilpSolution {
  SolveReport report;
  std::vector<double> x;  // empty when no feasible point was found
};

namespace detail {

struct BnbNode {
  double bound;
  long seq;
  std::shared_ptr<const std::vector<std::pair<int, int>>> fixes;  // (var, value)
  std::shared_ptr<const Basis> warm;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    // degenerate instances carry one bound across whole subtrees; taking the
    // newest node plunges toward a leaf instead of sweeping the plateau
    return a.seq < b.seq;
  }
};

}  // namespace detail

// Best-bound branch and bound over the LP relaxation. Each node re-solves the
// relaxation with its branching fixes applied, warm-started from the parent
// basis. Integral relaxations are cleaned by one extra LP with every binary
// pinned to its rounded value so incumbents carry exact 0/1 entries.
inline MilpSolution solve_milp(const MilpModel& model, const SolveOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  SimplexSolver lp(model);
  std::vector<int> bins;
  for (size_t j = 0; j < model.vars.size(); ++j)
    if (model.vars[j].kind == VarKind::Binary) bins.push_back(static_cast<int>(j));

  MilpSolution sol;
  SolveReport& rep = sol.report;

  auto solve_with = [&](const std::vector<std::pair<int, int>>& fixes,
                        const Basis* warm, long iter_limit = 400000) {
    for (auto [v, val] : fixes) lp.set_var_bounds(v, val, val);
    LpResult res = lp.solve(warm, iter_limit);
    for (auto [v, val] : fixes) {
      (void)val;
      lp.set_var_bounds(v, model.vars[v].lo, model.vars[v].hi);
    }
    rep.nodes++;
    rep.lp_iterations += res.iterations;
    return res;
  };

  double inc_obj = kInf;
  std::vector<double> inc_x;

  auto try_incumbent = [&](const std::vector<std::pair<int, int>>& fixes,
                           const LpResult& res, const Basis& basis) {
    auto all = fixes;
    for (int b : bins) {
      bool fixed = false;
      for (auto [v, val] : fixes) {
        (void)val;
        if (v == b) fixed = true;
      }
      if (!fixed) all.emplace_back(b, static_cast<int>(std::lround(res.x[b])));
    }
    LpResult clean = solve_with(all, &basis, 60000);
    if (clean.status != LpStatus::Optimal) return;
    for (auto [v, val] : all) clean.x[v] = val;  // exact binaries
    double obj = clean.objective + model.offset;
    if (obj < inc_obj - 1e-12 && check_solution(model, clean.x)) {
      inc_obj = obj;
      inc_x = std::move(clean.x);
    }
  };

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>,
                      detail::BnbNodeOrder>
      heap;
  long seq = 0;

  auto expand = [&](const LpResult& res, const std::shared_ptr<const Basis>& basis,
                    const std::shared_ptr<const std::vector<std::pair<int, int>>>&
                        fixes) -> bool {
    double obj = res.objective + model.offset;
    if (obj >= inc_obj - 1e-9) return true;
    // branch on the first fractional binary: variables enter the model in
    // stage order, so this resolves the earliest undecided decision and the
    // constraints that cascade from it, instead of hopping around the window
    int frac = -1;
    for (int b : bins) {
      double d = std::abs(res.x[b] - std::round(res.x[b]));
      if (d > kIntTol) {
        frac = b;
        break;
      }
    }
    if (frac < 0) {
      try_incumbent(*fixes, res, *basis);
      return true;
    }
    // the child matching the relaxation's rounding goes last so the plateau
    // tie-break pops it first
    int toward = static_cast<int>(std::lround(res.x[frac]));
    for (int val : {1 - toward, toward}) {
      auto child = std::make_shared<std::vector<std::pair<int, int>>>(*fixes);
      child->emplace_back(frac, val);
      heap.push({obj, seq++, std::move(child), basis});
    }
    return true;
  };

  auto root_fixes = std::make_shared<const std::vector<std::pair<int, int>>>();
  LpResult root = solve_with(*root_fixes, nullptr);
  if (root.status == LpStatus::Infeasible) {
    rep.status = MilpStatus::Infeasible;
    rep.best_bound = kInf;
    rep.wall_ms = elapsed_s() * 1e3;
    return sol;
  }
  if (root.status == LpStatus::Unbounded) {
    rep.status = MilpStatus::Unbounded;
    rep.wall_ms = elapsed_s() * 1e3;
    return sol;
  }
  if (root.status == LpStatus::IterLimit)
    throw solver_error("simplex iteration limit reached");
  auto root_basis = std::make_shared<const Basis>(lp.basis());

  // caller-supplied warm starts: one pinned LP each, kept only if feasible
  for (const auto& hint : opt.hints) try_incumbent(hint, root, *root_basis);

  // Rounding dive for incumbents: pin every binary the relaxation has already
  // settled at an integer (a no-op for the current LP, so always safe), round
  // one fractional binary, re-solve, repeat. Unit-commitment relaxations are
  // close to integral, so repeated rounds usually land a feasible point near
  // the starting bound. Rounded pins are the moves that can go wrong, in two
  // ways: the pin cuts off the subproblem, or it silently commits to a cascade
  // through the commitment logic rows that a later LP can only satisfy at
  // enormous cost. So a genuinely ambiguous binary gets both directions solved
  // and keeps the cheaper one, while a near-integral pin is only flipped if
  // the first choice is infeasible. The dive is advisory and runs on a fixed
  // iteration allowance: re-solving after a pin occasionally strands the warm
  // basis far outside the new bounds and the walk back would eat the whole
  // node budget, so the dive is abandoned rather than nursed. Run from the
  // root and periodically from tree nodes, because on plateau-heavy instances
  // best-bound order keeps switching subtrees and would otherwise never carry
  // a node to a leaf.
  auto dive_from = [&](std::vector<std::pair<int, int>> fixes, LpResult res,
                       Basis warm) {
    std::vector<char> is_fixed(model.vars.size(), 0);
    for (auto [v, val] : fixes) {
      (void)val;
      is_fixed[v] = 1;
    }
    long allowance = 20000;
    int max_rounds = static_cast<int>(bins.size()) + 8;
    for (int round = 0; round < max_rounds && res.status == LpStatus::Optimal; ++round) {
      if (res.objective + model.offset >= inc_obj - 1e-9) break;
      int frac = -1;
      double frac_dist = kIntTol;
      for (int b : bins) {
        if (is_fixed[b]) continue;
        double d = std::abs(res.x[b] - std::round(res.x[b]));
        if (d <= kIntTol) {
          fixes.emplace_back(b, static_cast<int>(std::lround(res.x[b])));
          is_fixed[b] = 1;
        } else if (d > frac_dist + 1e-15) {
          frac_dist = d;
          frac = b;
        }
      }
      if (frac < 0) {
        try_incumbent(fixes, res, warm);
        break;
      }
      if (allowance <= 0) break;
      int toward = static_cast<int>(std::lround(res.x[frac]));
      fixes.emplace_back(frac, toward);
      is_fixed[frac] = 1;
      LpResult first = solve_with(fixes, &warm, allowance);
      allowance -= first.iterations;
      Basis first_basis;
      if (first.status == LpStatus::Optimal) first_basis = lp.basis();
      bool look_other = first.status == LpStatus::Infeasible ||
                        (first.status == LpStatus::Optimal && frac_dist >= 0.25);
      if (look_other && allowance > 0) {
        fixes.back().second = 1 - toward;
        LpResult second = solve_with(fixes, &warm, allowance);
        allowance -= second.iterations;
        if (second.status == LpStatus::Optimal &&
            (first.status != LpStatus::Optimal ||
             second.objective < first.objective - 1e-9)) {
          res = std::move(second);
          warm = lp.basis();
          continue;
        }
        fixes.back().second = toward;
      }
      res = std::move(first);
      if (res.status == LpStatus::Optimal) warm = std::move(first_basis);
    }
  };
  dive_from(*root_fixes, root, *root_basis);
  expand(root, root_basis, root_fixes);

  auto finalize = [&](MilpStatus status, double bound) {
    rep.status = status;
    if (!inc_x.empty()) {
      sol.x = inc_x;
      rep.objective = inc_obj;
      rep.best_bound = std::min(bound, inc_obj);
      rep.rel_gap =
          std::max(0.0, (inc_obj - rep.best_bound) / std::max(std::abs(inc_obj), 1e-9));
    } else {
      rep.best_bound = bound;
    }
    rep.wall_ms = elapsed_s() * 1e3;
    return sol;
  };

  constexpr long kDiveEvery = 50;
  long pops_since_dive = 0;
  while (!heap.empty()) {
    detail::BnbNode node = heap.top();
    if (!inc_x.empty()) {
      double gap = (inc_obj - node.bound) / std::max(std::abs(inc_obj), 1e-9);
      if (node.bound >= inc_obj - 1e-9 || gap <= opt.rel_gap)
        return finalize(gap <= 1e-9 ? MilpStatus::Optimal : MilpStatus::GapFeasible,
                        node.bound);
    }
    if (opt.node_limit >= 0 && rep.nodes >= opt.node_limit)
      return finalize(MilpStatus::NodeLimit, node.bound);
    if (opt.time_limit_s >= 0 && elapsed_s() > opt.time_limit_s)
      return finalize(MilpStatus::TimeLimit, node.bound);
    heap.pop();

    LpResult res = solve_with(*node.fixes, node.warm.get());
    if (res.status == LpStatus::Infeasible) continue;
    if (res.status == LpStatus::Unbounded)
      throw solver_error("unbounded node relaxation");
    if (res.status == LpStatus::IterLimit)
      throw solver_error("simplex iteration limit reached");
    auto basis = std::make_shared<const Basis>(lp.basis());
    expand(res, basis, node.fixes);
    if (++pops_since_dive >= kDiveEvery) {
      pops_since_dive = 0;
      dive_from(*node.fixes, res, *basis);
    }
  }

  if (!inc_x.empty()) {
    sol.x = inc_x;
    rep.status = MilpStatus::Optimal;
    rep.objective = inc_obj;
    rep.best_bound = inc_obj;
    rep.rel_gap = 0.0;
    rep.wall_ms = elapsed_s() * 1e3;
    return sol;
  }
  rep.status = MilpStatus::Infeasible;
  rep.best_bound = kInf;
  rep.wall_ms = elapsed_s() * 1e3;
  return sol;
}

// Exhaustive reference: walks every binary assignment in index order and
// solves the continuous LP at each leaf. Partial assignments are discarded
// only when a fully-assigned row made of binary variables alone is already
// violated, which cannot cut off any completion of the assignment.
inline MilpSolution enumerate_exact(const MilpModel& model) {
  std::vector<int> bins;
  std::vector<int> bin_pos(model.vars.size(), -1);
  for (size_t j = 0; j < model.vars.size(); ++j)
    if (model.vars[j].kind == VarKind::Binary) {
      bin_pos[j] = static_cast<int>(bins.size());
      bins.push_back(static_cast<int>(j));
    }
  if (bins.size() > 24)
    throw precondition_error("exhaustive enumeration limited to 24 binaries");

  std::vector<std::vector<int>> rows_at(bins.size());
  for (size_t r = 0; r < model.rows.size(); ++r) {
    int depth = -1;
    bool pure = !model.rows[r].terms.empty();
    for (auto [idx, coef] : model.rows[r].terms) {
      (void)coef;
      if (bin_pos[idx] < 0) {
        pure = false;
        break;
      }
      depth = std::max(depth, bin_pos[idx]);
    }
    if (pure) rows_at[depth].push_back(static_cast<int>(r));
  }

  SimplexSolver lp(model);
  MilpSolution sol;
  double best = kInf;
  std::vector<double> best_x;
  std::vector<int> val(bins.size(), 0);

  auto leaf = [&] {
    for (size_t k = 0; k < bins.size(); ++k)
      lp.set_var_bounds(bins[k], val[k], val[k]);
    LpResult res = lp.solve();
    sol.report.nodes++;
    sol.report.lp_iterations += res.iterations;
    if (res.status == LpStatus::Unbounded) throw solver_error("unbounded enumeration leaf");
    if (res.status != LpStatus::Optimal) return;
    double obj = res.objective + model.offset;
    if (obj < best - 1e-12) {
      best = obj;
      for (size_t k = 0; k < bins.size(); ++k) res.x[bins[k]] = val[k];
      best_x = std::move(res.x);
    }
  };

  auto row_ok = [&](int r) {
    const auto& row = model.rows[r];
    double a = 0.0;
    for (auto [idx, coef] : row.terms) a += coef * val[bin_pos[idx]];
    switch (row.sense) {
      case RowSense::LE: return a <= row.rhs + 1e-9;
      case RowSense::GE: return a >= row.rhs - 1e-9;
      case RowSense::EQ: return std::abs(a - row.rhs) <= 1e-9;
    }
    return false;
  };

  auto recurse = [&](auto&& self, size_t k) -> void {
    if (k == bins.size()) {
      leaf();
      return;
    }
    int lo = static_cast<int>(std::ceil(model.vars[bins[k]].lo - 1e-9));
    int hi = static_cast<int>(std::floor(model.vars[bins[k]].hi + 1e-9));
    for (int v = std::max(lo, 0); v <= std::min(hi, 1); ++v) {
      val[k] = v;
      bool ok = true;
      for (int r : rows_at[k])
        if (!row_ok(r)) {
          ok = false;
          break;
        }
      if (ok) self(self, k + 1);
    }
  };
  recurse(recurse, 0);

  if (best_x.empty()) {
    sol.report.status = MilpStatus::Infeasible;
    sol.report.best_bound = kInf;
  } else {
    sol.report.status = MilpStatus::Optimal;
    sol.report.objective = best;
    sol.report.best_bound = best;
    sol.x = std::move(best_x);
  }
  return sol;
}

}  // namespace nucflex
