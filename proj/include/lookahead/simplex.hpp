#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace lookahead {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

/// maximize c.x subject to rows and 0 <= x <= upper.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> upper;  // +inf when unbounded above
  std::vector<LpRow> rows;

  int add_var(double cost, double ub = std::numeric_limits<double>::infinity());
  void add_row(LpRow row) { rows.push_back(std::move(row)); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  /// One dual per row of the original program; y >= 0 on <= rows,
  /// y <= 0 on >= rows for a maximization.
  std::vector<double> duals;
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-11;
  long max_iterations = 1000000;
};

/// Two-phase primal simplex on a dense tableau with bounded variables and
/// Bland's rule for both entering and leaving choices.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace lookahead
