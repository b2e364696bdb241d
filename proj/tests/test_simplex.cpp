#include <doctest.h>

#include "generators.hpp"
#include "lookahead/simplex.hpp"

using namespace lookahead;

namespace {

double row_value(const LpRow& row, const std::vector<double>& x) {
  double v = 0.0;
  for (auto [j, c] : row.coeffs) v += c * x[j];
  return v;
}

// KKT certificate for a maximization with 0 <= x <= upper.
void check_kkt(const LinearProgram& lp, const LpSolution& sol, double tol) {
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.x.size() == std::size_t(lp.num_vars));
  REQUIRE(sol.duals.size() == lp.rows.size());
  double obj = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    CHECK(sol.x[j] >= -tol);
    CHECK(sol.x[j] <= lp.upper[j] + tol);
    obj += lp.objective[j] * sol.x[j];
  }
  CHECK(obj == doctest::Approx(sol.objective).epsilon(1e-9));
  std::vector<double> reduced = lp.objective;
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& row = lp.rows[i];
    const double y = sol.duals[i], v = row_value(row, sol.x);
    switch (row.sense) {
      case RowSense::kLessEqual:
        CHECK(v <= row.rhs + tol);
        CHECK(y >= -tol);
        break;
      case RowSense::kGreaterEqual:
        CHECK(v >= row.rhs - tol);
        CHECK(y <= tol);
        break;
      case RowSense::kEqual: CHECK(std::fabs(v - row.rhs) <= tol); break;
    }
    CHECK(std::fabs(y * (v - row.rhs)) <= tol);  // complementary slackness
    dual_obj += y * row.rhs;
    for (auto [j, c] : row.coeffs) reduced[j] -= y * c;
  }
  for (int j = 0; j < lp.num_vars; ++j) {
    if (sol.x[j] <= tol) CHECK(reduced[j] <= tol);
    else if (sol.x[j] >= lp.upper[j] - tol) {
      CHECK(reduced[j] >= -tol);
      dual_obj += reduced[j] * lp.upper[j];
    } else {
      CHECK(std::fabs(reduced[j]) <= tol);
    }
  }
  CHECK(dual_obj == doctest::Approx(sol.objective).epsilon(1e-8));
}

}  // namespace

TEST_CASE("textbook maximization") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
  LinearProgram lp;
  const int x = lp.add_var(3.0), y = lp.add_var(5.0);
  lp.add_row({{{x, 1.0}}, RowSense::kLessEqual, 4.0});
  lp.add_row({{{y, 2.0}}, RowSense::kLessEqual, 12.0});
  lp.add_row({{{x, 3.0}, {y, 2.0}}, RowSense::kLessEqual, 18.0});
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(36.0));
  CHECK(sol.x[x] == doctest::Approx(2.0));
  CHECK(sol.x[y] == doctest::Approx(6.0));
  CHECK(sol.duals[0] == doctest::Approx(0.0));
  CHECK(sol.duals[1] == doctest::Approx(1.5));
  CHECK(sol.duals[2] == doctest::Approx(1.0));
  check_kkt(lp, sol, 1e-9);
}

TEST_CASE("equality and >= rows need phase one") {
  // max x + y, x + y = 1, x >= 0.3 (as a row), y <= 0.4 (bound).
  LinearProgram lp;
  const int x = lp.add_var(1.0), y = lp.add_var(2.0, 0.4);
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::kEqual, 1.0});
  lp.add_row({{{x, 1.0}}, RowSense::kGreaterEqual, 0.3});
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(1.4));
  CHECK(sol.x[y] == doctest::Approx(0.4));
  check_kkt(lp, sol, 1e-9);
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram inf;
  const int x = inf.add_var(1.0);
  inf.add_row({{{x, 1.0}}, RowSense::kGreaterEqual, 2.0});
  inf.add_row({{{x, 1.0}}, RowSense::kLessEqual, 1.0});
  CHECK(solve_lp(inf).status == LpStatus::kInfeasible);

  LinearProgram unb;
  const int u = unb.add_var(1.0), v = unb.add_var(0.0);
  unb.add_row({{{u, 1.0}, {v, -1.0}}, RowSense::kLessEqual, 1.0});
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);
  CHECK(std::string(to_string(LpStatus::kUnbounded)) == "unbounded");
}

TEST_CASE("degenerate program that cycles without an anti-cycling rule") {
  // Beale's example, written as a maximization. Optimum 1/20 at x = (1/25, 0, 1, 0).
  LinearProgram lp;
  const int x1 = lp.add_var(0.75), x2 = lp.add_var(-150.0), x3 = lp.add_var(0.02), x4 = lp.add_var(-6.0);
  lp.add_row({{{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, RowSense::kLessEqual, 0.0});
  lp.add_row({{{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, RowSense::kLessEqual, 0.0});
  lp.add_row({{{x3, 1.0}}, RowSense::kLessEqual, 1.0});
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(0.05));
  check_kkt(lp, sol, 1e-9);
}

TEST_CASE("property: random bounded programs carry a KKT certificate") {
  gen::Rng g(41);
  for (int trial = 0; trial < 300; ++trial) {
    LinearProgram lp;
    const int n = g.integer(1, 6), m = g.integer(1, 6);
    for (int j = 0; j < n; ++j)
      lp.add_var(g.uniform() * 2 - 0.5, g.coin(0.3) ? 0.5 + g.uniform() : std::numeric_limits<double>::infinity());
    for (int i = 0; i < m; ++i) {
      LpRow row;
      for (int j = 0; j < n; ++j)
        if (!g.coin(0.3)) row.coeffs.push_back({j, g.uniform() * 2 - 0.3});
      const double pick = g.uniform();
      row.sense = pick < 0.7 ? RowSense::kLessEqual : pick < 0.85 ? RowSense::kEqual : RowSense::kGreaterEqual;
      row.rhs = row.sense == RowSense::kLessEqual ? 0.5 + g.uniform() : 0.3 * g.uniform();
      lp.add_row(row);
    }
    // Bound every variable through one row so the program is never unbounded.
    LpRow cap;
    for (int j = 0; j < n; ++j) cap.coeffs.push_back({j, 1.0});
    cap.rhs = 10.0;
    lp.add_row(cap);
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::kInfeasible) continue;
    check_kkt(lp, sol, 1e-8);
  }
}
