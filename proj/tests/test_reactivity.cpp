#include <catch2/catch_amalgamated.hpp>

#include "nucflex/reactivity.hpp"

using namespace nucflex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("margin formula", "[reactivity]") {
  // 0.02/1.02 * 1e5 = 1960.784... by hand.
  CHECK_THAT(reactivity_margin_pcm(1.02), WithinRel(1960.7843137, 1e-9));
  CHECK(reactivity_margin_pcm(1.0) == 0.0);
  CHECK_THROWS_AS(reactivity_margin_pcm(0.99), precondition_error);
  // Monotone in k_eff.
  CHECK(reactivity_margin_pcm(1.03) > reactivity_margin_pcm(1.02));
}

TEST_CASE("degradation step", "[reactivity]") {
  DegradationParams d;
  d.k_bol = 1.03;
  d.m_per_fpd = 8e-5;
  d.block_scale = 3.0;
  CHECK_THAT(degrade(1.03, d, 1.0), WithinRel(1.02976, 1e-12));
  CHECK(degrade(1.03, d, 0.0) == 1.03);
  // Zero output never degrades; higher alpha degrades more.
  CHECK(degrade(1.03, d, 0.5) > degrade(1.03, d, 1.0));
  CHECK_THROWS_AS(degrade(1.03, d, 1.5), precondition_error);
}

TEST_CASE("default calibration spends the core in 540 full-power days", "[reactivity]") {
  DegradationParams d;
  CHECK_THAT(full_power_cycle_days(d), WithinRel(540.0, 1e-9));
  // Window-by-window accumulation lands at (or numerically below) critical
  // after 180 three-day blocks.
  double k = d.k_bol;
  for (int w = 0; w < 180; ++w) k = degrade(k, d, 1.0);
  CHECK_THAT(k, WithinAbs(1.0, 1e-9));
  CHECK(k <= 1.0 + kCriticalTol);
}

TEST_CASE("capacity factor", "[reactivity]") {
  CHECK_THAT(capacity_factor({500.0, 500.0}, 1000.0), WithinRel(0.5, 1e-12));
  CHECK(capacity_factor({0.0, 0.0, 0.0}, 1000.0) == 0.0);
  CHECK_THAT(capacity_factor({1000.0}, 1000.0), WithinRel(1.0, 1e-12));
  CHECK_THROWS_AS(capacity_factor({}, 1000.0), precondition_error);
  CHECK_THROWS_AS(capacity_factor({-5.0}, 1000.0), precondition_error);
}
