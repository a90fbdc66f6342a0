#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nucflex/common.hpp"

namespace nucflex {

// Nuclide constants for the iodine-135 / xenon-135 balance.
// Units: decay constants 1/hr, fission yields dimensionless, flux n/cm2-hr,
// macroscopic fission cross section 1/cm, microscopic absorption cm2.
//
// Note: the shipped lambda_i (0.01033/hr) follows the tabulated AP1000-class
// parameter set this tool defaults to; the physical I-135 half-life of 6.58 h
// would give ~0.105/hr. It is a plain config input, override it if wanted.
struct NuclideParams {
  double lambda_i = 0.01033;
  double lambda_xe = 0.0753;
  double gamma_i = 0.0639;
  double gamma_xe = 0.00237;
  double sigma_f = 0.39497;
  double sigma_xe = 2.65e-18;
  double phi0 = 1.8e17;
  double nu = 2.42;
};

inline NuclideParams ap1000_params() { return NuclideParams{}; }

inline void validate(const NuclideParams& p) {
  auto pos = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
      throw precondition_error(std::string("nuclide parameter ") + name + " must be positive");
  };
  pos(p.lambda_i, "lambda_i");
  pos(p.lambda_xe, "lambda_xe");
  pos(p.gamma_i, "gamma_i");
  pos(p.gamma_xe, "gamma_xe");
  pos(p.sigma_f, "sigma_f");
  pos(p.sigma_xe, "sigma_xe");
  pos(p.phi0, "phi0");
  pos(p.nu, "nu");
}

inline std::string params_hash(const NuclideParams& p) {
  std::string s = fmt_double(p.lambda_i) + "," + fmt_double(p.lambda_xe) + "," +
                  fmt_double(p.gamma_i) + "," + fmt_double(p.gamma_xe) + "," +
                  fmt_double(p.sigma_f) + "," + fmt_double(p.sigma_xe) + "," +
                  fmt_double(p.phi0) + "," + fmt_double(p.nu);
  return hash_hex(fnv1a64(s));
}

// Concentrations in atoms/cm3.
struct XenonState {
  double iodine = 0.0;
  double xenon = 0.0;
};

// Normalized power profile: breakpoints (t_hr, fraction of rated power),
// strictly increasing times, linear interpolation between points, constant
// beyond either end.
struct PowerProfile {
  std::vector<double> t_hr;
  std::vector<double> frac;
};

inline void validate(const PowerProfile& p) {
  if (p.t_hr.empty() || p.t_hr.size() != p.frac.size())
    throw precondition_error("power profile needs matching, non-empty breakpoint vectors");
  for (size_t i = 0; i < p.t_hr.size(); ++i) {
    if (i > 0 && !(p.t_hr[i] > p.t_hr[i - 1]))
      throw precondition_error("power profile times must be strictly increasing");
    if (p.frac[i] < 0.0 || p.frac[i] > 1.0 || !std::isfinite(p.frac[i]))
      throw precondition_error("power fractions must lie in [0, 1]");
  }
}

inline double power_at(const PowerProfile& p, double t) {
  if (t <= p.t_hr.front()) return p.frac.front();
  if (t >= p.t_hr.back()) return p.frac.back();
  size_t hi = std::upper_bound(p.t_hr.begin(), p.t_hr.end(), t) - p.t_hr.begin();
  size_t lo = hi - 1;
  double w = (t - p.t_hr[lo]) / (p.t_hr[hi] - p.t_hr[lo]);
  return p.frac[lo] + w * (p.frac[hi] - p.frac[lo]);
}

// Flux scales linearly with power.
inline double flux_at(const NuclideParams& p, const PowerProfile& prof, double t) {
  return p.phi0 * power_at(prof, t);
}

// Closed-form equilibrium at a constant power fraction.
inline XenonState equilibrium_state(const NuclideParams& p, double power_frac) {
  if (power_frac < 0.0 || power_frac > 1.0)
    throw precondition_error("power fraction must lie in [0, 1]");
  double phi = p.phi0 * power_frac;
  XenonState s;
  s.iodine = p.gamma_i * phi * p.sigma_f / p.lambda_i;
  s.xenon = phi * p.sigma_f * (p.gamma_i + p.gamma_xe) / (p.lambda_xe + p.sigma_xe * phi);
  return s;
}

// Reactivity defect of the current xenon inventory, in pcm.
inline double xenon_defect_pcm(const NuclideParams& p, double xenon) {
  return p.sigma_xe * xenon / (p.nu * p.sigma_f) * 1e5;
}

inline constexpr double kMaxStepHr = 0.1;

// One fixed-size RK4 step under constant flux. Concentrations are clamped at
// zero afterwards so roundoff can never produce a negative inventory.
inline XenonState step(const XenonState& s, const NuclideParams& p, double flux, double dt) {
  if (!(dt > 0.0) || dt > kMaxStepHr + 1e-12)
    throw precondition_error("step size must lie in (0, 0.1] hours");
  if (flux < 0.0) throw precondition_error("flux must be non-negative");
  double src_i = p.gamma_i * flux * p.sigma_f;
  double src_xe = p.gamma_xe * flux * p.sigma_f;
  double sink_xe = p.lambda_xe + p.sigma_xe * flux;
  auto f = [&](double I, double X, double& dI, double& dX) {
    dI = -p.lambda_i * I + src_i;
    dX = p.lambda_i * I - sink_xe * X + src_xe;
  };
  double k1i, k1x, k2i, k2x, k3i, k3x, k4i, k4x;
  f(s.iodine, s.xenon, k1i, k1x);
  f(s.iodine + 0.5 * dt * k1i, s.xenon + 0.5 * dt * k1x, k2i, k2x);
  f(s.iodine + 0.5 * dt * k2i, s.xenon + 0.5 * dt * k2x, k3i, k3x);
  f(s.iodine + dt * k3i, s.xenon + dt * k3x, k4i, k4x);
  XenonState out;
  out.iodine = s.iodine + dt / 6.0 * (k1i + 2 * k2i + 2 * k3i + k4i);
  out.xenon = s.xenon + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
  out.iodine = std::max(0.0, out.iodine);
  out.xenon = std::max(0.0, out.xenon);
  return out;
}

struct KineticsSeries {
  std::vector<double> t_hr;
  std::vector<double> iodine;
  std::vector<double> xenon;
  std::vector<double> defect_pcm;
};

// Integrates the profile with fixed RK4 steps, sampling every step. Flux is
// held constant within a step at its midpoint value. The default initial
// state is the equilibrium matching the profile's starting power.
inline KineticsSeries simulate(const NuclideParams& p, const PowerProfile& prof,
                               double horizon_hr, double dt,
                               const XenonState* initial = nullptr) {
  validate(p);
  validate(prof);
  if (!(horizon_hr > 0)) throw precondition_error("horizon must be positive");
  if (!(dt > 0.0) || dt > kMaxStepHr + 1e-12)
    throw precondition_error("step size must lie in (0, 0.1] hours");
  size_t n = static_cast<size_t>(std::floor(horizon_hr / dt + 1e-9));
  XenonState s = initial ? *initial : equilibrium_state(p, power_at(prof, prof.t_hr.front()));
  KineticsSeries out;
  out.t_hr.reserve(n + 1);
  out.iodine.reserve(n + 1);
  out.xenon.reserve(n + 1);
  out.defect_pcm.reserve(n + 1);
  auto push = [&](double t, const XenonState& st) {
    out.t_hr.push_back(t);
    out.iodine.push_back(st.iodine);
    out.xenon.push_back(st.xenon);
    out.defect_pcm.push_back(xenon_defect_pcm(p, st.xenon));
  };
  push(0.0, s);
  for (size_t k = 0; k < n; ++k) {
    double t = static_cast<double>(k) * dt;
    double flux = flux_at(p, prof, t + 0.5 * dt);
    s = step(s, p, flux, dt);
    push(static_cast<double>(k + 1) * dt, s);
  }
  return out;
}

inline constexpr double kRampFracPerHr = 0.25;
inline constexpr double kPeakHorizonHr = 96.0;

// Ramp protocol: full power at t=0, down at 25%/hr until the target fraction
// is reached, then hold.
inline PowerProfile ramp_down_profile(double p0_frac) {
  if (p0_frac < 0.0 || p0_frac > 1.0)
    throw precondition_error("ramp target fraction must lie in [0, 1]");
  if (p0_frac >= 1.0) return PowerProfile{{0.0}, {1.0}};
  double t_end = (1.0 - p0_frac) / kRampFracPerHr;
  return PowerProfile{{0.0, t_end}, {1.0, p0_frac}};
}

// Largest xenon defect (pcm) seen while ramping from full-power equilibrium
// down to p0 and holding. A 96 h horizon brackets the transient peak for every
// grid point; for p0 = 1 the trajectory is stationary and the peak equals the
// full-power equilibrium defect.
inline double peak_defect_pcm(const NuclideParams& p, double p0_frac, double dt = 0.02) {
  KineticsSeries s = simulate(p, ramp_down_profile(p0_frac), kPeakHorizonHr, dt);
  double peak = 0.0;
  for (double d : s.defect_pcm) peak = std::max(peak, d);
  return peak;
}

inline std::string series_csv(const KineticsSeries& s) {
  std::string out = "t_hr,iodine,xenon,defect_pcm\n";
  for (size_t i = 0; i < s.t_hr.size(); ++i) {
    out += fmt_double(s.t_hr[i]);
    out += ',';
    out += fmt_double(s.iodine[i]);
    out += ',';
    out += fmt_double(s.xenon[i]);
    out += ',';
    out += fmt_double(s.defect_pcm[i]);
    out += '\n';
  }
  return out;
}

inline void write_series_csv(const KineticsSeries& s, const std::string& path) {
  write_file(path, series_csv(s));
}

}  // namespace nucflex
