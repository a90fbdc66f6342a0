#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "nucflex/common.hpp"
#include "nucflex/xenon.hpp"

namespace nucflex {

struct PminCurvePoint {
  double p0_frac;
  double peak_pcm;
};

inline void validate_grid(const std::vector<double>& grid, double lo, double hi,
                          const char* what) {
  if (grid.empty()) throw precondition_error(std::string(what) + " grid is empty");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < lo - 1e-12 || grid[i] > hi + 1e-12)
      throw precondition_error(std::string(what) + " grid value out of range");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw precondition_error(std::string(what) + " grid must be strictly increasing");
  }
}

inline std::vector<double> default_p0_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i * 0.05);
  return g;
}

inline std::vector<double> default_margin_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i * 50.0);
  return g;
}

// Peak transient defect for each hold level of the ramp protocol. Grid points
// are independent, so the evaluation may fan out across threads; results land
// in index-addressed slots and are bitwise identical for any thread count.
inline std::vector<PminCurvePoint> build_pmin_curve(const NuclideParams& params,
                                                    const std::vector<double>& p0_grid,
                                                    double dt = 0.02, int threads = 1) {
  validate(params);
  validate_grid(p0_grid, 0.0, 1.0, "p0");
  std::vector<PminCurvePoint> curve(p0_grid.size());
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(p0_grid.size())));
  auto work = [&](int tid) {
    for (size_t i = tid; i < p0_grid.size(); i += nt)
      curve[i] = {p0_grid[i], peak_defect_pcm(params, p0_grid[i], dt)};
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return curve;
}

// Smallest grid hold level whose transient peak stays strictly below the
// margin; 1.0 (no maneuvering allowed) when no grid point qualifies.
inline double select_pmin(double margin_pcm, const std::vector<PminCurvePoint>& curve) {
  if (curve.empty()) throw precondition_error("empty curve");
  for (const auto& pt : curve)
    if (margin_pcm - pt.peak_pcm > 0.0) return pt.p0_frac;
  return 1.0;
}

struct Deadtime {
  int hours = 0;
  bool indefinite = false;
};

inline constexpr double kDeadtimeHorizonHr = 2400.0;

// Defect trajectory after an instantaneous trip from full-power equilibrium.
inline KineticsSeries shutdown_series(const NuclideParams& params, double dt = 0.02,
                                      double horizon_hr = kDeadtimeHorizonHr) {
  PowerProfile trip{{0.0}, {0.0}};
  XenonState eq = equilibrium_state(params, 1.0);
  return simulate(params, trip, horizon_hr, dt, &eq);
}

// Hours after a trip during which the xenon defect exceeds the margin: the
// last sample above the margin, rounded up to a whole hour. Margins above the
// post-trip peak give zero; margins the trajectory never re-clears within the
// horizon are capped and flagged indefinite.
inline Deadtime deadtime_from_series(const KineticsSeries& s, double margin_pcm) {
  size_t last = s.t_hr.size();
  for (size_t i = s.t_hr.size(); i-- > 0;) {
    if (s.defect_pcm[i] > margin_pcm) {
      last = i;
      break;
    }
  }
  if (last == s.t_hr.size()) return {0, false};
  if (last + 1 == s.t_hr.size())
    return {static_cast<int>(std::ceil(s.t_hr.back() - 1e-9)), true};
  if (!(s.defect_pcm[last + 1] <= s.defect_pcm[last]))
    throw internal_error("deadtime crossing is not on a decaying tail");
  return {static_cast<int>(std::ceil(s.t_hr[last] - 1e-9)), false};
}

inline Deadtime deadtime(const NuclideParams& params, double margin_pcm, double dt = 0.02,
                         double horizon_hr = kDeadtimeHorizonHr) {
  if (margin_pcm < 0.0) throw precondition_error("margin must be non-negative");
  return deadtime_from_series(shutdown_series(params, dt, horizon_hr), margin_pcm);
}

struct TableRow {
  double margin_pcm;
  double pmin_frac;
  int deadtime_hr;
};

struct FlexibilityTable {
  std::vector<TableRow> rows;
  std::vector<double> p0_grid;
  std::string params_hash;
  double buffer_pcm = 0.0;
  int deadtime_cap_hr = static_cast<int>(kDeadtimeHorizonHr);
};

// Re-simulates every row that claims a feasible maneuver and demands the
// transient peak stays strictly under the (buffered) margin. Rows that fell
// back to 1.0 promise nothing and are skipped.
inline void verify_table(const FlexibilityTable& t, const NuclideParams& params,
                         double dt = 0.02) {
  for (const auto& row : t.rows) {
    double margin_eff = std::max(0.0, row.margin_pcm - t.buffer_pcm);
    double peak = peak_defect_pcm(params, row.pmin_frac, dt);
    bool claims_feasible = margin_eff - peak > 0.0;
    if (row.pmin_frac >= 1.0 && !claims_feasible) continue;
    if (!claims_feasible)
      throw internal_error("table row at margin " + fmt_double(row.margin_pcm) +
                           " permits a maneuver whose peak defect " + fmt_double(peak) +
                           " reaches the margin");
  }
}

inline FlexibilityTable build_table(const NuclideParams& params,
                                    const std::vector<double>& p0_grid,
                                    const std::vector<double>& margin_grid,
                                    double buffer_pcm = 0.0, bool verify = true,
                                    double dt = 0.02, int threads = 1) {
  validate_grid(margin_grid, 0.0, 1e9, "margin");
  if (buffer_pcm < 0.0) throw precondition_error("buffer must be non-negative");
  auto curve = build_pmin_curve(params, p0_grid, dt, threads);
  KineticsSeries trip = shutdown_series(params, dt);
  FlexibilityTable t;
  t.p0_grid = p0_grid;
  t.params_hash = params_hash(params);
  t.buffer_pcm = buffer_pcm;
  t.deadtime_cap_hr = static_cast<int>(std::ceil(trip.t_hr.back() - 1e-9));
  t.rows.reserve(margin_grid.size());
  for (double m : margin_grid) {
    double m_eff = std::max(0.0, m - buffer_pcm);
    Deadtime dtm = deadtime_from_series(trip, m_eff);
    t.rows.push_back({m, select_pmin(m_eff, curve), dtm.hours});
  }
  if (verify) verify_table(t, params, dt);
  return t;
}

// Conservative lookup: the row with the largest grid margin not exceeding the
// query; margins below the first row clamp to it.
inline const TableRow& query(const FlexibilityTable& t, double margin_pcm) {
  if (t.rows.empty()) throw precondition_error("empty flexibility table");
  const TableRow* best = &t.rows.front();
  for (const auto& row : t.rows) {
    if (row.margin_pcm <= margin_pcm + 1e-9)
      best = &row;
    else
      break;
  }
  return *best;
}

inline std::string table_csv(const FlexibilityTable& t) {
  std::string grid;
  for (size_t i = 0; i < t.p0_grid.size(); ++i) {
    if (i) grid += ',';
    grid += fmt_double(t.p0_grid[i]);
  }
  std::string out = "# flexibility-table v1 params=" + t.params_hash +
                    " buffer_pcm=" + fmt_double(t.buffer_pcm) +
                    " deadtime_cap_hr=" + std::to_string(t.deadtime_cap_hr) +
                    " p0_grid=" + grid + "\n";
  out += "margin_pcm,pmin_frac,deadtime_hr\n";
  for (const auto& row : t.rows) {
    out += fmt_double(row.margin_pcm);
    out += ',';
    out += fmt_double(row.pmin_frac);
    out += ',';
    out += std::to_string(row.deadtime_hr);
    out += '\n';
  }
  return out;
}

inline void save_table(const FlexibilityTable& t, const std::string& path) {
  write_file(path, table_csv(t));
}

inline FlexibilityTable load_table(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.size() < 3 || lines[0].rfind("# flexibility-table v1 ", 0) != 0)
    throw input_error("not a flexibility table: " + path);
  FlexibilityTable t;
  for (auto tok : split(std::string_view(lines[0]).substr(2), ' ')) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    auto key = tok.substr(0, eq);
    auto val = tok.substr(eq + 1);
    if (key == "params") {
      t.params_hash = std::string(val);
    } else if (key == "buffer_pcm") {
      t.buffer_pcm = parse_double(val, path);
    } else if (key == "deadtime_cap_hr") {
      t.deadtime_cap_hr = static_cast<int>(parse_long(val, path));
    } else if (key == "p0_grid") {
      for (auto g : split(val, ',')) t.p0_grid.push_back(parse_double(g, path));
    }
  }
  if (trim(lines[1]) != "margin_pcm,pmin_frac,deadtime_hr")
    throw input_error("unexpected table header in " + path);
  for (size_t i = 2; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cells = split(lines[i], ',');
    std::string ctx = path + ":" + std::to_string(i + 1);
    if (cells.size() != 3) throw input_error("expected 3 columns in " + ctx);
    TableRow row{parse_double(cells[0], ctx), parse_double(cells[1], ctx),
                 static_cast<int>(parse_long(cells[2], ctx))};
    if (!t.rows.empty() && row.margin_pcm <= t.rows.back().margin_pcm)
      throw input_error("margins must increase in " + ctx);
    t.rows.push_back(row);
  }
  if (t.rows.empty()) throw input_error("table has no rows: " + path);
  return t;
}

}  // namespace nucflex
