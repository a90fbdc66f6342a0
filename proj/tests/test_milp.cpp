#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nucflex/solver.hpp"

using namespace nucflex;

TEST_CASE("pure LP with a binding packing row") {
  // min -x - 2y  s.t. x + y <= 4, x <= 3, y <= 2  ->  x = 2, y = 2, obj -6
  MilpModel m;
  int x = m.add_var("x", 0, 3, VarKind::Continuous, -1);
  int y = m.add_var("y", 0, 2, VarKind::Continuous, -2);
  m.add_row(RowSense::LE, 4, {{x, 1}, {y, 1}});
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(-6.0).margin(1e-7));
  CHECK(sol.x[x] == Catch::Approx(2.0).margin(1e-7));
  CHECK(sol.x[y] == Catch::Approx(2.0).margin(1e-7));
}

TEST_CASE("row-free model optimizes at the bounds") {
  MilpModel m;
  m.add_var("a", 1, 4, VarKind::Continuous, 3);
  m.add_var("b", -2, 7, VarKind::Continuous, -5);
  m.offset = 10.0;
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(3 * 1 - 5 * 7 + 10).margin(1e-9));
}

TEST_CASE("phase 1 reaches a point satisfying GE and EQ rows") {
  // min x + y  s.t. x + y >= 3, x - y = 1  ->  x = 2, y = 1
  MilpModel m;
  int x = m.add_var("x", 0, kInf, VarKind::Continuous, 1);
  int y = m.add_var("y", 0, kInf, VarKind::Continuous, 1);
  m.add_row(RowSense::GE, 3, {{x, 1}, {y, 1}});
  m.add_row(RowSense::EQ, 1, {{x, 1}, {y, -1}});
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(3.0).margin(1e-7));
  CHECK(sol.x[x] == Catch::Approx(2.0).margin(1e-7));
  CHECK(sol.x[y] == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("conflicting rows report infeasible") {
  MilpModel m;
  int x = m.add_var("x", 0, 10, VarKind::Continuous, 1);
  m.add_row(RowSense::LE, 1, {{x, 1}});
  m.add_row(RowSense::GE, 2, {{x, 1}});
  auto sol = solve_milp(m);
  CHECK(sol.report.status == MilpStatus::Infeasible);
  CHECK(sol.x.empty());
}

TEST_CASE("missing upper bound with improving cost is unbounded") {
  MilpModel m;
  m.add_var("x", 0, kInf, VarKind::Continuous, -1);
  auto sol = solve_milp(m);
  CHECK(sol.report.status == MilpStatus::Unbounded);
}

TEST_CASE("degenerate pivoting terminates on the classic cycling example") {
  // Beale's example cycles under naive most-negative pricing.
  MilpModel m;
  int x1 = m.add_var("x1", 0, kInf, VarKind::Continuous, -0.75);
  int x2 = m.add_var("x2", 0, kInf, VarKind::Continuous, 150);
  int x3 = m.add_var("x3", 0, kInf, VarKind::Continuous, -0.02);
  int x4 = m.add_var("x4", 0, kInf, VarKind::Continuous, 6);
  m.add_row(RowSense::LE, 0, {{x1, 0.25}, {x2, -60}, {x3, -0.04}, {x4, 9}});
  m.add_row(RowSense::LE, 0, {{x1, 0.5}, {x2, -90}, {x3, -0.02}, {x4, 3}});
  m.add_row(RowSense::LE, 1, {{x3, 1}});
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(-0.05).margin(1e-7));
}

TEST_CASE("binary knapsack agrees with the known optimum") {
  // max 6a + 10b + 12c  s.t. a + 2b + 3c <= 5  ->  b + c, value 22
  MilpModel m;
  int a = m.add_var("a", 0, 1, VarKind::Binary, -6);
  int b = m.add_var("b", 0, 1, VarKind::Binary, -10);
  int c = m.add_var("c", 0, 1, VarKind::Binary, -12);
  m.add_row(RowSense::LE, 5, {{a, 1}, {b, 2}, {c, 3}});
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(-22.0).margin(1e-7));
  CHECK(sol.x[a] == 0.0);
  CHECK(sol.x[b] == 1.0);
  CHECK(sol.x[c] == 1.0);
  CHECK(sol.report.rel_gap == 0.0);

  auto ex = enumerate_exact(m);
  REQUIRE(ex.report.status == MilpStatus::Optimal);
  CHECK(ex.report.objective == Catch::Approx(sol.report.objective).margin(1e-9));
}

TEST_CASE("fractional relaxation branches to the integer optimum") {
  MilpModel m;
  int a = m.add_var("a", 0, 1, VarKind::Binary, -1);
  int b = m.add_var("b", 0, 1, VarKind::Binary, -1);
  m.add_row(RowSense::LE, 1.5, {{a, 1}, {b, 1}});
  auto sol = solve_milp(m);
  REQUIRE(sol.report.status == MilpStatus::Optimal);
  CHECK(sol.report.objective == Catch::Approx(-1.0).margin(1e-9));
  CHECK(sol.report.nodes > 1);
}

TEST_CASE("node limit interrupts the search") {
  MilpModel m;
  int a = m.add_var("a", 0, 1, VarKind::Binary, -1);
  int b = m.add_var("b", 0, 1, VarKind::Binary, -1);
  m.add_row(RowSense::LE, 1.5, {{a, 1}, {b, 1}});
  SolveOptions opt;
  opt.node_limit = 1;
  auto sol = solve_milp(m, opt);
  CHECK(sol.report.status == MilpStatus::NodeLimit);
}

TEST_CASE("model text form round-trips byte for byte") {
  MilpModel m;
  m.offset = 2.5;
  int x = m.add_var("x", 0, 3, VarKind::Continuous, -1.25);
  int z = m.add_var("z_on", 0, 1, VarKind::Binary, 4);
  int f = m.add_var("f", -kInf, kInf, VarKind::Continuous, 0);
  m.add_row(RowSense::LE, 4, {{x, 1}, {z, -2.5}});
  m.add_row(RowSense::GE, -1, {{f, 0.125}});
  m.add_row(RowSense::EQ, 0, {{x, 1}, {f, -1}});
  std::string text = dump_milp(m);
  MilpModel back = load_milp(text);
  CHECK(dump_milp(back) == text);
  CHECK(back.vars[1].name == "z_on");
  CHECK(back.vars[1].kind == VarKind::Binary);
  CHECK(back.vars[2].lo == -kInf);

  auto s1 = solve_milp(m);
  auto s2 = solve_milp(back);
  REQUIRE(s1.report.status == MilpStatus::Optimal);
  CHECK(s1.report.objective == Catch::Approx(s2.report.objective).margin(1e-9));

  CHECK_THROWS_AS(load_milp("milp 2\n"), input_error);
  CHECK_THROWS_AS(load_milp("milp 1\nminimize\noffset 0\nvars 1\n"), input_error);
}

TEST_CASE("solution checker flags each violation class") {
  MilpModel m;
  int x = m.add_var("x", 0, 2, VarKind::Continuous, 1);
  int z = m.add_var("z", 0, 1, VarKind::Binary, 1);
  m.add_row(RowSense::LE, 2, {{x, 1}, {z, 1}});
  CHECK(check_solution(m, {1.0, 1.0}));
  CHECK_FALSE(check_solution(m, {3.0, 0.0}));   // bound
  CHECK_FALSE(check_solution(m, {0.0, 0.4}));   // integrality
  CHECK_FALSE(check_solution(m, {2.0, 1.0}));   // row
  CHECK_FALSE(check_solution(m, {1.0}));        // wrong arity
  CHECK(objective_value(m, {1.0, 1.0}) == 2.0);
}

namespace {

MilpModel random_instance(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return lo + (rng() >> 11) * 0x1p-53 * (hi - lo);
  };
  MilpModel m;
  int nb = 2 + static_cast<int>(rng() % 7);   // 2..8 binaries
  int nc = 1 + static_cast<int>(rng() % 3);   // 1..3 continuous
  std::vector<double> x0;
  for (int j = 0; j < nb; ++j) {
    m.add_var("b" + std::to_string(j), 0, 1, VarKind::Binary, uni(-10, 10));
    x0.push_back(static_cast<double>(rng() % 2));
  }
  for (int j = 0; j < nc; ++j) {
    double hi = uni(1, 5);
    m.add_var("c" + std::to_string(j), 0, hi, VarKind::Continuous, uni(-5, 5));
    x0.push_back(uni(0, hi));
  }
  int nrows = 2 + static_cast<int>(rng() % 4);
  int n = nb + nc;
  for (int r = 0; r < nrows; ++r) {
    std::vector<std::pair<int, double>> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (rng() % 2) {
        double coef = uni(-3, 3);
        terms.emplace_back(j, coef);
        act += coef * x0[j];
      }
    if (terms.empty()) continue;
    switch (rng() % 3) {
      case 0: m.add_row(RowSense::LE, act + uni(0, 2), std::move(terms)); break;
      case 1: m.add_row(RowSense::GE, act - uni(0, 2), std::move(terms)); break;
      default: m.add_row(RowSense::EQ, act, std::move(terms)); break;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("branch and bound matches exhaustive enumeration on random mixes") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    MilpModel m = random_instance(seed);
    auto bb = solve_milp(m);
    auto ex = enumerate_exact(m);
    REQUIRE(bb.report.status == MilpStatus::Optimal);
    REQUIRE(ex.report.status == MilpStatus::Optimal);
    CHECK(bb.report.objective ==
          Catch::Approx(ex.report.objective).margin(1e-6));
    CHECK(check_solution(m, bb.x));
    CHECK(check_solution(m, ex.x));
  }
}
