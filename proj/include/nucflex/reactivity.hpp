#pragma once

#include <cmath>
#include <vector>

#include "nucflex/common.hpp"

namespace nucflex {

// Linear burnup model: k_eff starts at k_bol and loses m_per_fpd per
// equivalent full-power day. block_scale converts one dispatch window into
// full-power days (3.0 for 72 h windows).
struct DegradationParams {
  double k_bol = 1.045;
  double m_per_fpd = (1.045 - 1.0) / 540.0;
  double block_scale = 3.0;
};

inline void validate(const DegradationParams& d) {
  if (!(d.k_bol > 1.0)) throw precondition_error("k_bol must exceed 1");
  if (!(d.m_per_fpd > 0.0)) throw precondition_error("degradation rate must be positive");
  if (!(d.block_scale > 0.0)) throw precondition_error("block scale must be positive");
}

// k_eff values this close to (or below) 1 count as end of cycle; keeps the
// refueling trigger robust to accumulated floating-point drift.
inline constexpr double kCriticalTol = 1e-9;

struct CoreState {
  double k_eff = 1.045;
  int refuel_countdown_days = 0;
};

// Rod-free excess reactivity in pcm. Only defined for critical-or-better
// cores; the orchestrator refuels before k_eff drops below 1.
inline double reactivity_margin_pcm(double k_eff) {
  if (k_eff < 1.0 - kCriticalTol)
    throw precondition_error("reactivity margin undefined for k_eff < 1");
  if (k_eff <= 1.0) return 0.0;
  return (k_eff - 1.0) / k_eff * 1e5;
}

inline double capacity_factor(const std::vector<double>& p_mw, double p_max_mw) {
  if (p_mw.empty()) throw precondition_error("capacity factor needs at least one hour");
  if (!(p_max_mw > 0.0)) throw precondition_error("p_max must be positive");
  double sum = 0.0;
  for (double v : p_mw) {
    if (v < -1e-9) throw precondition_error("generation must be non-negative");
    sum += v;
  }
  double alpha = sum / (p_max_mw * static_cast<double>(p_mw.size()));
  return std::min(std::max(alpha, 0.0), 1.0);
}

// One dispatch block of burnup at capacity factor alpha.
inline double degrade(double k_eff, const DegradationParams& d, double alpha) {
  validate(d);
  if (alpha < -1e-9 || alpha > 1.0 + 1e-9)
    throw precondition_error("capacity factor must lie in [0, 1]");
  return k_eff - d.m_per_fpd * d.block_scale * alpha;
}

// Days of uninterrupted full-power operation until k_eff reaches 1.
inline double full_power_cycle_days(const DegradationParams& d) {
  validate(d);
  return (d.k_bol - 1.0) / d.m_per_fpd;
}

}  // namespace nucflex
