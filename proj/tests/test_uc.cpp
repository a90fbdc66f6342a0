#include <catch2/catch_amalgamated.hpp>

#include "nucflex/uc.hpp"

using namespace nucflex;

namespace {

GeneratorSpec reactor(double pmax = 100, double var = 10, double start = 0,
                      double shut = 0) {
  GeneratorSpec g;
  g.name = "r0";
  g.p_max_mw = pmax;
  g.variable_cost = var;
  g.start_cost_per_mw = start;
  g.shut_cost_per_mw = shut;
  g.min_up_hours = 1;
  g.min_dn_base_hours = 1;
  g.ramp_frac_per_hr = 0.25;
  return g;
}

UCInstance single(std::vector<double> demand, GeneratorSpec gs, double pmin_frac,
                  BoundaryState bd, int stable = 2, int min_dn = 1, int forced = 0) {
  UCInstance inst;
  inst.T = static_cast<int>(demand.size());
  inst.demand_mw = std::move(demand);
  inst.stable_hours = stable;
  inst.gens = {gs};
  inst.limits = {{pmin_frac, min_dn, forced}};
  inst.boundary = {bd};
  return inst;
}

BoundaryState running(double p) {
  BoundaryState b;
  b.committed = true;
  b.p_mw = p;
  b.hours_on = 100;
  return b;
}

UCSolution dispatch(const UCInstance& inst) {
  auto b = build_uc(inst);
  auto ms = solve_milp(b.model);
  REQUIRE(ms.report.status == MilpStatus::Optimal);
  return extract(inst, b, ms);
}

}  // namespace

TEST_CASE("flat window at sixty percent costs exactly the energy") {
  auto inst = single({60, 60}, reactor(), 0.5, running(60));
  auto sol = dispatch(inst);
  CHECK(sol.objective == Catch::Approx(1200.0).margin(1e-6));
  CHECK(sol.gen[0][0].p == Catch::Approx(60).margin(1e-7));
  CHECK(sol.gen[0][1].p == Catch::Approx(60).margin(1e-7));
  CHECK(sol.nse_cost == 0.0);

  auto nb = next_boundary(inst, sol, 0);
  CHECK(nb.committed);
  CHECK(nb.hours_on == 102);  // whole window on extends the boundary streak
  CHECK(nb.p_mw == Catch::Approx(60).margin(1e-7));
}

TEST_CASE("shutdown requires a staged descent through the floor") {
  auto gs = reactor(100, 10, 0, 5);
  auto inst = single({75, 50, 50, 50, 0, 0, 0, 0}, gs, 0.5, running(100));
  auto sol = dispatch(inst);

  std::vector<double> want_p{75, 50, 50, 50, 0, 0, 0, 0};
  std::vector<int> want_on{1, 1, 1, 1, 0, 0, 0, 0};
  std::vector<int> want_rd{1, 1, 0, 0, 0, 0, 0, 0};
  std::vector<int> want_st{0, 0, 1, 1, 0, 0, 0, 0};
  for (int t = 0; t < 8; ++t) {
    CAPTURE(t);
    CHECK(sol.gen[0][t].p == Catch::Approx(want_p[t]).margin(1e-6));
    CHECK(sol.gen[0][t].z_on == want_on[t]);
    CHECK(sol.gen[0][t].rd == want_rd[t]);
    CHECK(sol.gen[0][t].st == want_st[t]);
    CHECK(sol.gen[0][t].up == 0);
  }
  CHECK(sol.gen[0][4].z_shut == 1);
  CHECK(sol.var_cost == Catch::Approx(2250.0).margin(1e-6));
  CHECK(sol.shut_cost == Catch::Approx(500.0).margin(1e-9));
  CHECK(sol.objective == Catch::Approx(2750.0).margin(1e-6));

  auto nb = next_boundary(inst, sol, 0);
  CHECK_FALSE(nb.committed);
  CHECK(nb.hours_off == 4);
  CHECK(nb.stable_remaining == 0);
  CHECK_FALSE(nb.ramp_down_active);
}

TEST_CASE("an immediate full shed from high output is infeasible") {
  auto inst = single({0, 0}, reactor(), 0.5, running(100));
  auto b = build_uc(inst);
  auto ms = solve_milp(b.model);
  CHECK(ms.report.status == MilpStatus::Infeasible);
}

TEST_CASE("a floor rising past the boundary point waives seam continuity") {
  auto gs = reactor(100, 10, 0, 5);
  BoundaryState bd = running(60);
  CHECK(pmin_escalated(bd, 90.0));
  CHECK_FALSE(pmin_escalated(bd, 50.0));

  auto inst = single({0, 0}, gs, 0.9, bd);
  auto b = build_uc(inst);
  REQUIRE(b.seam_notes.size() == 1);
  auto ms = solve_milp(b.model);
  REQUIRE(ms.report.status == MilpStatus::Optimal);
  auto sol = extract(inst, b, ms);
  CHECK(sol.gen[0][0].z_on == 0);
  CHECK(sol.gen[0][0].z_shut == 1);
  CHECK(sol.objective == Catch::Approx(500.0).margin(1e-9));
}

TEST_CASE("a floor at capacity drops the ramp machinery") {
  auto inst = single({100, 100}, reactor(), 1.0, running(100));
  auto b = build_uc(inst);
  CHECK(b.vars.gens[0].reduced);
  CHECK(b.vars.gens[0].p_aux.empty());
  CHECK(b.vars.gens[0].rd.empty());
  auto ms = solve_milp(b.model);
  REQUIRE(ms.report.status == MilpStatus::Optimal);
  auto sol = extract(inst, b, ms);
  CHECK(sol.objective == Catch::Approx(2000.0).margin(1e-6));
  CHECK(sol.gen[0][0].st == 1);  // stable alias of commitment when reduced
  CHECK(sol.gen[0][1].p == Catch::Approx(100).margin(1e-7));
}

TEST_CASE("storage shifts surplus renewables with the charging loss") {
  UCInstance inst;
  inst.T = 2;
  inst.demand_mw = {0, 85};
  inst.vre_avail_mw = {100, 0};
  inst.storage = {100, 400, 0.85};
  auto b = build_uc(inst);
  auto ms = solve_milp(b.model);
  REQUIRE(ms.report.status == MilpStatus::Optimal);
  auto sol = extract(inst, b, ms);
  CHECK(sol.objective == Catch::Approx(0.0).margin(1e-6));
  CHECK(sol.vre_used[0] == Catch::Approx(100).margin(1e-6));
  CHECK(sol.ch[0] == Catch::Approx(100).margin(1e-6));
  CHECK(sol.soc[0] == Catch::Approx(85).margin(1e-6));
  CHECK(sol.dis[1] == Catch::Approx(85).margin(1e-6));
  CHECK(sol.soc[1] == Catch::Approx(0).margin(1e-6));
  CHECK(next_system_boundary(inst, sol).storage_soc_mwh ==
        Catch::Approx(0).margin(1e-6));
}

TEST_CASE("forced outage charges the shutdown and allows a later restart") {
  auto gs = reactor(100, 10, 2, 5);
  auto inst = single({0, 0, 0, 60}, gs, 0.5, running(100), 2, 1, 2);
  auto sol = dispatch(inst);
  CHECK(sol.gen[0][0].z_on == 0);
  CHECK(sol.gen[0][0].z_shut == 1);
  CHECK(sol.gen[0][2].z_on == 0);  // zero demand keeps it down an extra hour
  CHECK(sol.gen[0][3].z_start == 1);
  CHECK(sol.gen[0][3].p == Catch::Approx(60).margin(1e-6));
  CHECK(sol.shut_cost == Catch::Approx(500).margin(1e-9));
  CHECK(sol.start_cost == Catch::Approx(200).margin(1e-9));
  CHECK(sol.objective == Catch::Approx(1300.0).margin(1e-6));

  auto nb = next_boundary(inst, sol, 0);
  CHECK(nb.committed);
  CHECK(nb.hours_on == 1);
}

TEST_CASE("a ramp crossing the window edge owes the dwell to the next window") {
  auto gs = reactor(100, 10, 0, 0);
  auto instA = single({100, 100, 100, 75}, gs, 0.5, running(100), 3);
  auto solA = dispatch(instA);
  CHECK(solA.gen[0][3].rd == 1);
  auto nb = next_boundary(instA, solA, 0);
  CHECK(nb.ramp_down_active);
  CHECK(nb.stable_remaining == 0);
  CHECK(nb.p_mw == Catch::Approx(75).margin(1e-6));

  auto instB = single({75, 75, 75, 75}, gs, 0.5, nb, 3);
  auto solB = dispatch(instB);
  for (int t = 0; t < 4; ++t) {
    CAPTURE(t);
    CHECK(solB.gen[0][t].rd == 0);
    CHECK(solB.gen[0][t].st == 1);
    CHECK(solB.gen[0][t].p == Catch::Approx(75).margin(1e-6));
  }
  auto nbB = next_boundary(instB, solB, 0);
  CHECK(nbB.stable_remaining == 0);
  CHECK_FALSE(nbB.ramp_down_active);
}

TEST_CASE("owed stability hours arrive as fixed stable flags") {
  auto gs = reactor(100, 10, 0, 0);
  BoundaryState bd = running(50);
  bd.stable_remaining = 2;
  auto inst = single({50, 50, 50, 50}, gs, 0.5, bd, 3);
  auto b = build_uc(inst);
  CHECK(b.model.vars[b.vars.gens[0].st[0]].lo == 1);
  CHECK(b.model.vars[b.vars.gens[0].st[1]].lo == 1);
  CHECK(b.model.vars[b.vars.gens[0].st[2]].lo == 0);
  auto ms = solve_milp(b.model);
  REQUIRE(ms.report.status == MilpStatus::Optimal);
}

TEST_CASE("boundary carries pin commitment bounds directly") {
  auto gs = reactor();
  gs.min_up_hours = 4;
  BoundaryState bd = running(60);
  bd.hours_on = 2;
  auto inst = single({60, 60, 60, 60}, gs, 0.5, bd);
  auto b = build_uc(inst);
  CHECK(b.model.vars[b.vars.gens[0].z_on[0]].lo == 1);
  CHECK(b.model.vars[b.vars.gens[0].z_on[1]].lo == 1);
  CHECK(b.model.vars[b.vars.gens[0].z_on[2]].lo == 0);

  BoundaryState off;
  off.committed = false;
  off.hours_off = 1;
  auto inst2 = single({0, 0, 0, 60}, gs, 0.5, off, 2, 3);
  auto b2 = build_uc(inst2);
  CHECK(b2.model.vars[b2.vars.gens[0].z_on[0]].hi == 0);
  CHECK(b2.model.vars[b2.vars.gens[0].z_on[1]].hi == 0);
  CHECK(b2.model.vars[b2.vars.gens[0].z_on[2]].hi == 1);
}

TEST_CASE("window solve agrees with exhaustive enumeration") {
  auto gs = reactor(100, 10, 3, 4);
  gs.min_up_hours = 2;
  auto inst = single({80, 60, 70, 90}, gs, 0.5, running(80), 2, 2);
  auto b = build_uc(inst);
  REQUIRE(b.model.num_binaries() == 12);  // z_on, rd, up per committed-capable hour
  auto bb = solve_milp(b.model);
  auto ex = enumerate_exact(b.model);
  REQUIRE(bb.report.status == MilpStatus::Optimal);
  REQUIRE(ex.report.status == MilpStatus::Optimal);
  CHECK(bb.report.objective == Catch::Approx(ex.report.objective).margin(1e-6));
  CHECK(check_solution(b.model, bb.x));
}

TEST_CASE("instance validation rejects inconsistent shapes") {
  UCInstance inst;
  inst.T = 2;
  inst.demand_mw = {1, 2, 3};
  CHECK_THROWS_AS(build_uc(inst), precondition_error);
  inst.demand_mw = {1, 2};
  inst.gens = {reactor()};
  CHECK_THROWS_AS(build_uc(inst), precondition_error);  // missing limits/boundary
  inst.limits = {{0.5, 1, 0}};
  inst.boundary = {{}};
  CHECK_NOTHROW(build_uc(inst));
  inst.storage = {100, 400, 1.5};
  CHECK_THROWS_AS(build_uc(inst), precondition_error);
}
