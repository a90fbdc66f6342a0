#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "nucflex/milp.hpp"

namespace nucflex {

inline constexpr double kOptTol = 1e-7;
inline constexpr double kPivotTol = 1e-9;

enum class LpStatus : uint8_t { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::IterLimit;
  double objective = 0.0;
  std::vector<double> x;  // structural variables only
  long iterations = 0;
};

enum class ColState : uint8_t { AtLower, AtUpper, Basic, Free };

struct Basis {
  std::vector<int> basic;       // column index occupying each basis slot
  std::vector<ColState> state;  // one entry per column (structural + slack)
};

// Bounded-variable primal simplex over the computational form
//   [A | I] [x; s] = rhs,  slack bounds encode the row sense.
// The basis inverse is an LU factorization plus product-form eta updates,
// refactorized periodically. Feasibility is reached by a composite
// (artificial-free) phase 1 that prices the sum of bound violations.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpModel& model)
      : n_(static_cast<int>(model.vars.size())),
        m_(static_cast<int>(model.rows.size())) {
    cols_.resize(n_);
    lo_.resize(n_ + m_);
    hi_.resize(n_ + m_);
    cost_.assign(n_ + m_, 0.0);
    rhs_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.vars[j].lo;
      hi_[j] = model.vars[j].hi;
      cost_[j] = model.vars[j].obj;
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = model.rows[i];
      rhs_[i] = row.rhs;
      for (auto [idx, coef] : row.terms)
        if (coef != 0.0) cols_[idx].emplace_back(i, coef);
      int s = n_ + i;
      switch (row.sense) {
        case RowSense::LE: lo_[s] = 0.0; hi_[s] = kInf; break;
        case RowSense::GE: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case RowSense::EQ: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
    }
  }

  int num_rows() const { return m_; }
  int num_structural() const { return n_; }

  void set_var_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    hi_[j] = hi;
  }
  double var_lo(int j) const { return lo_[j]; }
  double var_hi(int j) const { return hi_[j]; }

  Basis basis() const { return Basis{basic_, state_}; }

  LpResult solve(const Basis* warm = nullptr, long iter_limit = 400000) {
    init_basis(warm);
    repairs_ = 0;
    refactor();
    LpResult res;
    long degen_streak = 0;
    for (long iter = 0; iter < iter_limit; ++iter) {
      if (etas_.size() >= kRefactorEvery) refactor();
      bool phase1 = false;
      Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
      for (int i = 0; i < m_; ++i) {
        int v = basic_[i];
        if (x_[v] < lo_[v] - kFeasTol) {
          cb[i] = -1.0;
          phase1 = true;
        } else if (x_[v] > hi_[v] + kFeasTol) {
          cb[i] = 1.0;
          phase1 = true;
        }
      }
      if (!phase1)
        for (int i = 0; i < m_; ++i) cb[i] = cost_[basic_[i]];
      btran(cb);

      bool bland = degen_streak > kBlandAfter;
      int enter = -1, dir = 0;
      double best_score = phase1 ? kOptTol : kOptTol;
      for (int j = 0; j < n_ + m_; ++j) {
        ColState st = state_[j];
        if (st == ColState::Basic) continue;
        if (lo_[j] == hi_[j]) continue;  // fixed, can never move
        double d = (phase1 ? 0.0 : cost_[j]) - dot_col(cb, j);
        int cand_dir = 0;
        if (st == ColState::AtLower && d < -kOptTol)
          cand_dir = 1;
        else if (st == ColState::AtUpper && d > kOptTol)
          cand_dir = -1;
        else if (st == ColState::Free && std::abs(d) > kOptTol)
          cand_dir = d < 0 ? 1 : -1;
        if (!cand_dir) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) {
        if (phase1) {
          res.status = LpStatus::Infeasible;
          res.iterations = iter;
          return res;
        }
        finish(res, iter, LpStatus::Optimal);
        return res;
      }

      Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
      for (auto [r, c] : col_entries(enter)) w[r] = c;
      ftran(w);

      // Two-pass ratio test. In phase 1 an infeasible basic blocks only at
      // the violated bound it is moving toward; feasible basics block at both
      // bounds. Pass 1 finds the tightest step with each blocker relaxed by
      // the feasibility tolerance; pass 2 picks the numerically best pivot
      // among blockers inside that relaxed step, so degenerate ties never
      // force a near-singular basis. Any blocker the step passes is left at
      // most the tolerance outside its bound, which every feasibility check
      // here treats as on the bound. Under Bland's rule the exact smallest
      // ratio and lowest-index tie break are restored; anything looser
      // reintroduces the cycling the rule exists to stop.
      double theta_flip = is_finite_bound(lo_[enter]) && is_finite_bound(hi_[enter])
                              ? hi_[enter] - lo_[enter]
                              : kInf;
      cand_i_.clear();
      cand_t_.clear();
      cand_up_.clear();
      double t_min = kInf;
      double theta_bar = theta_flip;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(w[i]) <= kPivotTol) continue;
        int v = basic_[i];
        double rate = -dir * w[i];  // d x_v / d theta
        double t = kInf;
        bool to_upper = false;
        if (phase1 && x_[v] < lo_[v] - kFeasTol) {
          if (rate <= 0) continue;
          t = (lo_[v] - x_[v]) / rate;
          to_upper = false;
        } else if (phase1 && x_[v] > hi_[v] + kFeasTol) {
          if (rate >= 0) continue;
          t = (hi_[v] - x_[v]) / rate;
          to_upper = true;
        } else if (rate > 0) {
          if (!is_finite_bound(hi_[v])) continue;
          t = (hi_[v] - x_[v]) / rate;
          to_upper = true;
        } else {
          if (!is_finite_bound(lo_[v])) continue;
          t = (lo_[v] - x_[v]) / rate;
          to_upper = false;
        }
        // keep the raw (possibly slightly negative) ratio in the relaxed
        // bound so a blocker already resting just outside its bound cannot
        // be pushed further out by another full tolerance
        theta_bar = std::min(theta_bar, std::max(t + kFeasTol / std::abs(rate), 0.0));
        t = std::max(t, 0.0);
        t_min = std::min(t_min, t);
        cand_i_.push_back(i);
        cand_t_.push_back(t);
        cand_up_.push_back(to_upper);
      }

      if (t_min >= kInf / 2 && theta_flip >= kInf / 2) {
        if (phase1) throw internal_error("phase-1 ray in simplex");
        res.status = LpStatus::Unbounded;
        res.iterations = iter;
        return res;
      }

      int block = -1;
      bool leave_at_upper = false;
      double theta = 0.0;
      if (bland) {
        if (theta_flip > t_min + 1e-12) {
          for (size_t c = 0; c < cand_i_.size(); ++c) {
            if (cand_t_[c] > t_min + 1e-12) continue;
            if (block < 0 || basic_[cand_i_[c]] < basic_[block]) {
              block = cand_i_[c];
              leave_at_upper = cand_up_[c];
            }
          }
          theta = t_min;
        }
      } else {
        double best_piv = 0.0;
        for (size_t c = 0; c < cand_i_.size(); ++c) {
          if (cand_t_[c] > theta_bar) continue;
          double piv = std::abs(w[cand_i_[c]]);
          if (piv > best_piv ||
              (piv == best_piv && block >= 0 && basic_[cand_i_[c]] < basic_[block])) {
            best_piv = piv;
            block = cand_i_[c];
            leave_at_upper = cand_up_[c];
            theta = cand_t_[c];
          }
        }
      }

      if (block < 0) {
        // bound flip: entering travels to its opposite bound, basis unchanged
        theta = theta_flip;
        x_[enter] += dir * theta;
        state_[enter] =
            state_[enter] == ColState::AtLower ? ColState::AtUpper : ColState::AtLower;
        for (int i = 0; i < m_; ++i)
          if (w[i] != 0.0) x_[basic_[i]] -= dir * theta * w[i];
        degen_streak = theta > kDegenTol ? 0 : degen_streak + 1;
        continue;
      }

      x_[enter] += dir * theta;
      for (int i = 0; i < m_; ++i)
        if (w[i] != 0.0) x_[basic_[i]] -= dir * theta * w[i];
      int leaving = basic_[block];
      x_[leaving] = leave_at_upper ? hi_[leaving] : lo_[leaving];
      state_[leaving] = leave_at_upper ? ColState::AtUpper : ColState::AtLower;
      if (!is_finite_bound(leave_at_upper ? hi_[leaving] : lo_[leaving]))
        state_[leaving] = ColState::Free;
      basic_[block] = enter;
      state_[enter] = ColState::Basic;
      Eta eta;
      eta.r = block;
      eta.pivot = w[block];
      for (int i = 0; i < m_; ++i)
        if (w[i] != 0.0) eta.nz.emplace_back(i, w[i]);
      etas_.push_back(std::move(eta));
      // a step that moves the leaving variable less than the feasibility
      // tolerance is progress in name only; count it toward Bland's trigger
      degen_streak = theta * std::abs(w[block]) > kFeasTol ? 0 : degen_streak + 1;
    }
    res.status = LpStatus::IterLimit;
    res.iterations = iter_limit;
    return res;
  }

 private:
  static constexpr size_t kRefactorEvery = 100;
  static constexpr long kBlandAfter = 500;
  static constexpr double kDegenTol = 1e-10;
  static constexpr int kMaxRepairs = 16;

  // pivot column stored sparse: ftran/btran cost scales with fill, not m
  struct Eta {
    int r;
    double pivot;
    std::vector<std::pair<int, double>> nz;
  };

  int n_, m_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo_, hi_, cost_, rhs_;

  std::vector<int> basic_;
  std::vector<ColState> state_;
  std::vector<double> x_;
  std::vector<Eta> etas_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  int repairs_ = 0;
  std::vector<int> cand_i_;
  std::vector<double> cand_t_;
  std::vector<char> cand_up_;

  std::vector<std::pair<int, double>> slack_col(int j) const {
    return {{j - n_, 1.0}};
  }
  const std::vector<std::pair<int, double>>& struct_col(int j) const { return cols_[j]; }

  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_)
      for (auto [r, c] : cols_[j]) f(r, c);
    else
      f(j - n_, 1.0);
  }

  std::vector<std::pair<int, double>> col_entries(int j) const {
    if (j < n_) return cols_[j];
    return slack_col(j);
  }

  double dot_col(const Eigen::VectorXd& y, int j) const {
    double d = 0.0;
    for_col(j, [&](int r, double c) { d += y[r] * c; });
    return d;
  }

  void init_basis(const Basis* warm) {
    bool ok = false;
    if (warm && static_cast<int>(warm->basic.size()) == m_ &&
        warm->state.size() == static_cast<size_t>(n_ + m_)) {
      basic_ = warm->basic;
      state_ = warm->state;
      ok = try_factorize();
    }
    if (!ok) {
      basic_.resize(m_);
      state_.assign(n_ + m_, ColState::AtLower);
      for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        state_[n_ + i] = ColState::Basic;
      }
      for (int j = 0; j < n_; ++j) state_[j] = default_nonbasic_state(j);
      if (!try_factorize()) throw internal_error("slack basis failed to factorize");
    }
  }

  ColState default_nonbasic_state(int j) const {
    if (is_finite_bound(lo_[j])) return ColState::AtLower;
    if (is_finite_bound(hi_[j])) return ColState::AtUpper;
    return ColState::Free;
  }

  bool try_factorize() {
    if (m_ == 0) return true;
    Eigen::SparseMatrix<double> B(m_, m_);
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i)
      for_col(basic_[i], [&](int r, double c) { trips.emplace_back(r, i, c); });
    B.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(B);
    return lu_.info() == Eigen::Success;
  }

  // Factorize the current basis and recompute basic values from the bound
  // values of the nonbasic columns. A numerically singular basis is repaired
  // by restarting from the all-slack basis; phase 1 then walks back to
  // feasibility from the recomputed point.
  void refactor() {
    if (!try_factorize()) {
      if (++repairs_ > kMaxRepairs) throw internal_error("basis repair did not converge");
      for (int j = 0; j < n_; ++j)
        if (state_[j] == ColState::Basic) state_[j] = default_nonbasic_state(j);
      basic_.resize(m_);
      for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        state_[n_ + i] = ColState::Basic;
      }
      if (!try_factorize()) throw internal_error("slack basis failed to factorize");
    }
    etas_.clear();
    x_.assign(n_ + m_, 0.0);
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), m_);
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == ColState::Basic) continue;
      double v;
      switch (state_[j]) {
        case ColState::AtLower: v = lo_[j]; break;
        case ColState::AtUpper: v = hi_[j]; break;
        default: v = 0.0; break;
      }
      if (!is_finite_bound(v)) {
        // a branch moved the bound this column was resting on
        state_[j] = default_nonbasic_state(j);
        v = state_[j] == ColState::AtLower ? lo_[j]
            : state_[j] == ColState::AtUpper ? hi_[j]
                                             : 0.0;
      }
      x_[j] = v;
      if (v != 0.0) for_col(j, [&](int row, double c) { r[row] -= c * v; });
    }
    if (m_ > 0) {
      Eigen::VectorXd xb = lu_.solve(r);
      for (int i = 0; i < m_; ++i) x_[basic_[i]] = xb[i];
    }
  }

  void ftran(Eigen::VectorXd& v) {
    if (m_ == 0) return;
    v = lu_.solve(v);
    for (const auto& e : etas_) {
      double t = v[e.r] / e.pivot;
      if (t != 0.0)
        for (auto [i, c] : e.nz) v[i] -= t * c;
      v[e.r] = t;
    }
  }

  void btran(Eigen::VectorXd& v) {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;  // leaves out the r term via acc below
      for (auto [i, c] : it->nz) dot += c * v[i];
      double acc = v[it->r] * it->pivot;
      v[it->r] = (v[it->r] - (dot - acc)) / it->pivot;
    }
    v = lu_.adjoint().solve(v);
  }

  void finish(LpResult& res, long iter, LpStatus status) {
    // snap nonbasic columns exactly onto their bounds before reporting
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == ColState::AtLower) x_[j] = lo_[j];
      if (state_[j] == ColState::AtUpper) x_[j] = hi_[j];
    }
    res.status = status;
    res.iterations = iter;
    res.x.assign(x_.begin(), x_.begin() + n_);
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += cost_[j] * x_[j];
  }
};

}  // namespace nucflex
