#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nucflex/common.hpp"

namespace nucflex {

struct TimeSeriesBundle {
  std::vector<double> demand_mw;
  std::vector<double> wind_cf;   // empty when the case carries no renewables
  std::vector<double> solar_cf;

  int hours() const { return static_cast<int>(demand_mw.size()); }
  bool has_vre() const { return !wind_cf.empty(); }
};

inline void validate(const TimeSeriesBundle& ts) {
  if (ts.demand_mw.empty()) throw precondition_error("empty demand series");
  if (ts.wind_cf.size() != ts.solar_cf.size())
    throw precondition_error("wind and solar series must align");
  if (!ts.wind_cf.empty() && ts.wind_cf.size() != ts.demand_mw.size())
    throw precondition_error("vre series must match demand length");
  for (double d : ts.demand_mw)
    if (!(d >= 0)) throw precondition_error("demand must be non-negative");
  for (double c : ts.wind_cf)
    if (!(c >= 0 && c <= 1)) throw precondition_error("wind factors must lie in [0, 1]");
  for (double c : ts.solar_cf)
    if (!(c >= 0 && c <= 1)) throw precondition_error("solar factors must lie in [0, 1]");
}

inline std::string demand_csv(const std::vector<double>& demand) {
  std::string out = "timestamp,demand_mw\n";
  for (size_t t = 0; t < demand.size(); ++t)
    out += std::to_string(t) + "," + fmt_double(demand[t]) + "\n";
  return out;
}

inline std::string vre_csv(const std::vector<double>& wind,
                           const std::vector<double>& solar) {
  std::string out = "timestamp,wind_cf,solar_cf\n";
  for (size_t t = 0; t < wind.size(); ++t)
    out += std::to_string(t) + "," + fmt_double(wind[t]) + "," +
           fmt_double(solar[t]) + "\n";
  return out;
}

inline std::vector<double> load_demand_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "timestamp,demand_mw")
    throw input_error("expected 'timestamp,demand_mw' header in " + path);
  std::vector<double> demand;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(i + 1);
    auto cells = split(lines[i], ',');
    if (cells.size() != 2) throw input_error("expected 2 columns in " + ctx);
    if (parse_long(cells[0], ctx) != static_cast<long>(demand.size()))
      throw input_error("timestamps must count hours from zero in " + ctx);
    double d = parse_double(cells[1], ctx);
    if (!(d >= 0)) throw input_error("negative demand in " + ctx);
    demand.push_back(d);
  }
  if (demand.empty()) throw input_error("no demand rows in " + path);
  return demand;
}

inline std::pair<std::vector<double>, std::vector<double>> load_vre_csv(
    const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "timestamp,wind_cf,solar_cf")
    throw input_error("expected 'timestamp,wind_cf,solar_cf' header in " + path);
  std::vector<double> wind, solar;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(i + 1);
    auto cells = split(lines[i], ',');
    if (cells.size() != 3) throw input_error("expected 3 columns in " + ctx);
    if (parse_long(cells[0], ctx) != static_cast<long>(wind.size()))
      throw input_error("timestamps must count hours from zero in " + ctx);
    double w = parse_double(cells[1], ctx);
    double s = parse_double(cells[2], ctx);
    if (!(w >= 0 && w <= 1) || !(s >= 0 && s <= 1))
      throw input_error("capacity factors must lie in [0, 1] in " + ctx);
    wind.push_back(w);
    solar.push_back(s);
  }
  if (wind.empty()) throw input_error("no vre rows in " + path);
  return {std::move(wind), std::move(solar)};
}

struct SynthSpec {
  uint64_t seed = 0;
  int days = 7;
  double base_demand_mw = 5200.0;
};

namespace detail {

// Deterministic across platforms: raw engine words mapped by hand rather than
// through std::uniform_real_distribution, whose stream is unspecified.
class RandStream {
 public:
  explicit RandStream(uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }
  double gauss() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = std::max(uniform(), 0x1p-53);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_ = false;
};

}  // namespace detail

// Synthetic system case: a diurnal and weekly demand shape with noise, a
// daylight solar arc with day-to-day brightness, and slow AR(1) wind.
inline TimeSeriesBundle synth_case(const SynthSpec& spec) {
  if (spec.days < 3) throw precondition_error("synthetic cases need at least 3 days");
  if (spec.base_demand_mw <= 0)
    throw precondition_error("base demand must be positive");
  detail::RandStream rs_demand(spec.seed ^ 0xD1B54A32D192ED03ull);
  detail::RandStream rs_solar(spec.seed ^ 0xA0761D6478BD642Full);
  detail::RandStream rs_wind(spec.seed ^ 0xE7037ED1A0B428DBull);

  const double pi = 3.14159265358979323846;
  int hours = spec.days * 24;
  TimeSeriesBundle ts;
  ts.demand_mw.reserve(hours);
  ts.wind_cf.reserve(hours);
  ts.solar_cf.reserve(hours);

  double wind = 0.35;
  double day_bright = 0.75 + 0.25 * rs_solar.uniform();
  for (int h = 0; h < hours; ++h) {
    int hod = h % 24;
    if (h > 0 && hod == 0) day_bright = 0.75 + 0.25 * rs_solar.uniform();

    double diurnal = std::sin(2.0 * pi * (hod - 9) / 24.0);
    double weekly = std::sin(2.0 * pi * h / 168.0);
    double d = spec.base_demand_mw * (1.0 + 0.22 * diurnal + 0.06 * weekly) +
               0.03 * spec.base_demand_mw * rs_demand.gauss();
    ts.demand_mw.push_back(std::max(d, 0.35 * spec.base_demand_mw));

    double arc = std::sin(pi * (hod - 6) / 12.0);
    ts.solar_cf.push_back(std::max(0.0, arc) * day_bright);

    wind = 0.35 + 0.97 * (wind - 0.35) + 0.04 * rs_wind.gauss();
    wind = std::min(1.0, std::max(0.0, wind));
    ts.wind_cf.push_back(wind);
  }
  validate(ts);
  return ts;
}

}  // namespace nucflex
