#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nucflex/common.hpp"

namespace nucflex {

inline constexpr double kInf = 1e30;
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kIntTol = 1e-6;

inline bool is_finite_bound(double b) { return std::abs(b) < kInf / 2; }

enum class VarKind : uint8_t { Continuous, Binary };
enum class RowSense : uint8_t { LE, GE, EQ };

struct MilpVar {
  std::string name;
  double lo = 0.0;
  double hi = kInf;
  VarKind kind = VarKind::Continuous;
  double obj = 0.0;
};

struct MilpRow {
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
};

struct MilpModel {
  std::string name = "model";
  double offset = 0.0;
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;

  int add_var(std::string vname, double lo, double hi, VarKind kind, double obj) {
    if (vname.empty() || vname.find(' ') != std::string::npos)
      throw precondition_error("variable name must be non-empty without spaces");
    if (kind == VarKind::Binary && (lo < -kIntTol || hi > 1.0 + kIntTol))
      throw precondition_error("binary variable bounds must lie within [0, 1]");
    if (lo > hi + 1e-12) throw precondition_error("variable lower bound exceeds upper");
    vars.push_back({std::move(vname), lo, hi, kind, obj});
    return static_cast<int>(vars.size()) - 1;
  }

  void add_row(RowSense sense, double rhs, std::vector<std::pair<int, double>> terms) {
    for (auto& [idx, coef] : terms) {
      (void)coef;
      if (idx < 0 || idx >= static_cast<int>(vars.size()))
        throw precondition_error("row references unknown variable");
    }
    rows.push_back({sense, rhs, std::move(terms)});
  }

  int num_binaries() const {
    int n = 0;
    for (const auto& v : vars) n += v.kind == VarKind::Binary;
    return n;
  }
};

inline double row_activity(const MilpRow& row, const std::vector<double>& x) {
  double a = 0.0;
  for (auto [idx, coef] : row.terms) a += coef * x[idx];
  return a;
}

inline bool row_satisfied(const MilpRow& row, const std::vector<double>& x, double tol) {
  double a = row_activity(row, x);
  switch (row.sense) {
    case RowSense::LE: return a <= row.rhs + tol;
    case RowSense::GE: return a >= row.rhs - tol;
    case RowSense::EQ: return std::abs(a - row.rhs) <= tol;
  }
  return false;
}

// Tolerance is scaled per row by the magnitude of the terms involved so that
// large-activity rows (MW balances) are not held to an absolute 1e-7.
inline bool check_solution(const MilpModel& model, const std::vector<double>& x,
                           double tol = kFeasTol) {
  if (x.size() != model.vars.size()) return false;
  for (size_t j = 0; j < model.vars.size(); ++j) {
    const auto& v = model.vars[j];
    double scale = std::max({1.0, std::abs(v.lo) < kInf / 2 ? std::abs(v.lo) : 0.0,
                             std::abs(v.hi) < kInf / 2 ? std::abs(v.hi) : 0.0});
    if (x[j] < v.lo - tol * scale || x[j] > v.hi + tol * scale) return false;
    if (v.kind == VarKind::Binary && std::abs(x[j] - std::round(x[j])) > kIntTol)
      return false;
  }
  for (const auto& row : model.rows) {
    double scale = std::max(1.0, std::abs(row.rhs));
    for (auto [idx, coef] : row.terms)
      scale = std::max(scale, std::abs(coef * x[idx]));
    if (!row_satisfied(row, x, tol * scale)) return false;
  }
  return true;
}

inline double objective_value(const MilpModel& model, const std::vector<double>& x) {
  double obj = model.offset;
  for (size_t j = 0; j < model.vars.size(); ++j) obj += model.vars[j].obj * x[j];
  return obj;
}

inline std::string dump_milp(const MilpModel& model) {
  std::string out = "milp 1\nminimize\noffset " + fmt_double(model.offset) + "\n";
  out += "vars " + std::to_string(model.vars.size()) + "\n";
  for (size_t j = 0; j < model.vars.size(); ++j) {
    const auto& v = model.vars[j];
    out += "v" + std::to_string(j) + " " + v.name + " " + fmt_double(v.lo) + " " +
           fmt_double(v.hi) + " " + (v.kind == VarKind::Binary ? "B" : "C") + " " +
           fmt_double(v.obj) + "\n";
  }
  out += "rows " + std::to_string(model.rows.size()) + "\n";
  for (size_t i = 0; i < model.rows.size(); ++i) {
    const auto& r = model.rows[i];
    char sc = r.sense == RowSense::LE ? 'L' : r.sense == RowSense::GE ? 'G' : 'E';
    out += "r" + std::to_string(i) + " " + sc + " " + fmt_double(r.rhs) + " " +
           std::to_string(r.terms.size());
    for (auto [idx, coef] : r.terms)
      out += " " + std::to_string(idx) + ":" + fmt_double(coef);
    out += "\n";
  }
  out += "end\n";
  return out;
}

inline MilpModel load_milp(const std::string& text, const std::string& ctx = "milp") {
  auto lines = split(text, '\n');
  size_t pos = 0;
  auto next = [&]() -> std::string_view {
    while (pos < lines.size() && trim(lines[pos]).empty()) ++pos;
    if (pos >= lines.size()) throw input_error("truncated model in " + ctx);
    return trim(lines[pos++]);
  };
  if (next() != "milp 1") throw input_error("unknown model format in " + ctx);
  if (next() != "minimize") throw input_error("expected minimize in " + ctx);
  MilpModel model;
  {
    auto toks = split(next(), ' ');
    if (toks.size() != 2 || toks[0] != "offset")
      throw input_error("expected offset in " + ctx);
    model.offset = parse_double(toks[1], ctx);
  }
  auto toks = split(next(), ' ');
  if (toks.size() != 2 || toks[0] != "vars") throw input_error("expected vars in " + ctx);
  long nv = parse_long(toks[1], ctx);
  for (long j = 0; j < nv; ++j) {
    auto t = split(next(), ' ');
    if (t.size() != 6 || t[0] != "v" + std::to_string(j))
      throw input_error("malformed variable line in " + ctx);
    VarKind kind;
    if (t[4] == "B")
      kind = VarKind::Binary;
    else if (t[4] == "C")
      kind = VarKind::Continuous;
    else
      throw input_error("unknown variable kind in " + ctx);
    model.add_var(std::string(t[1]), parse_double(t[2], ctx), parse_double(t[3], ctx),
                  kind, parse_double(t[5], ctx));
  }
  toks = split(next(), ' ');
  if (toks.size() != 2 || toks[0] != "rows") throw input_error("expected rows in " + ctx);
  long nr = parse_long(toks[1], ctx);
  for (long i = 0; i < nr; ++i) {
    auto t = split(next(), ' ');
    if (t.size() < 4 || t[0] != "r" + std::to_string(i))
      throw input_error("malformed row line in " + ctx);
    RowSense sense;
    if (t[1] == "L")
      sense = RowSense::LE;
    else if (t[1] == "G")
      sense = RowSense::GE;
    else if (t[1] == "E")
      sense = RowSense::EQ;
    else
      throw input_error("unknown row sense in " + ctx);
    double rhs = parse_double(t[2], ctx);
    long k = parse_long(t[3], ctx);
    if (static_cast<long>(t.size()) != 4 + k)
      throw input_error("row term count mismatch in " + ctx);
    std::vector<std::pair<int, double>> terms;
    terms.reserve(k);
    for (long e = 0; e < k; ++e) {
      auto tv = t[4 + e];
      auto colon = tv.find(':');
      if (colon == std::string_view::npos)
        throw input_error("malformed row term in " + ctx);
      terms.emplace_back(static_cast<int>(parse_long(tv.substr(0, colon), ctx)),
                         parse_double(tv.substr(colon + 1), ctx));
    }
    model.add_row(sense, rhs, std::move(terms));
  }
  if (next() != "end") throw input_error("expected end in " + ctx);
  return model;
}

}  // namespace nucflex
