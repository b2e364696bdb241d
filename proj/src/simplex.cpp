#include "lookahead/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace lookahead {

int LinearProgram::add_var(double cost, double ub) {
  objective.push_back(cost);
  upper.push_back(ub);
  return num_vars++;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class VarStatus : unsigned char { kBasic, kLower, kUpper };

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    m_ = static_cast<int>(lp.rows.size());
    n_struct_ = lp.num_vars;
    sign_.assign(m_, 1.0);
    std::vector<RowSense> sense(m_);
    int extra = 0;
    for (int i = 0; i < m_; ++i) {
      sense[i] = lp.rows[i].sense;
      if (lp.rows[i].rhs < 0.0) {
        sign_[i] = -1.0;
        if (sense[i] == RowSense::kLessEqual) sense[i] = RowSense::kGreaterEqual;
        else if (sense[i] == RowSense::kGreaterEqual) sense[i] = RowSense::kLessEqual;
      }
      extra += sense[i] == RowSense::kGreaterEqual ? 2 : 1;
    }
    n_ = n_struct_ + extra;
    T_.assign(std::size_t(m_) * n_, 0.0);
    ub_.assign(n_, std::numeric_limits<double>::infinity());
    artificial_.assign(n_, false);
    status_.assign(n_, VarStatus::kLower);
    basis_.assign(m_, -1);
    init_col_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    for (int j = 0; j < n_struct_; ++j) ub_[j] = lp.upper[j];

    int col = n_struct_;
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : lp.rows[i].coeffs) at(i, j) += sign_[i] * v;
      xb_[i] = sign_[i] * lp.rows[i].rhs;
      if (sense[i] == RowSense::kGreaterEqual) at(i, col++) = -1.0;
      at(i, col) = 1.0;
      artificial_[col] = sense[i] != RowSense::kLessEqual;
      init_col_[i] = col;
      basis_[i] = col;
      status_[col] = VarStatus::kBasic;
      ++col;
    }
    cost_.assign(n_, 0.0);
    objective_.assign(n_, 0.0);
    for (int j = 0; j < n_struct_; ++j) objective_[j] = lp.objective[j];
  }

  LpSolution run() {
    LpSolution out;
    bool any_artificial = false;
    for (int j = 0; j < n_; ++j)
      if (artificial_[j]) {
        cost_[j] = -1.0;
        any_artificial = true;
      }
    if (any_artificial) {
      const LpStatus s1 = iterate(out.iterations);
      if (s1 == LpStatus::kIterationLimit) {
        out.status = s1;
        return out;
      }
      double infeas = 0.0, scale = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (artificial_[basis_[i]]) infeas += xb_[i];
        scale = std::max(scale, std::abs(xb_[i]));
      }
      if (infeas > opt_.feasibility_tol * scale) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      for (int j = 0; j < n_; ++j)
        if (artificial_[j]) {
          ub_[j] = 0.0;
          if (status_[j] != VarStatus::kBasic) status_[j] = VarStatus::kLower;
        }
      for (int i = 0; i < m_; ++i)
        if (artificial_[basis_[i]]) xb_[i] = 0.0;
    }
    cost_ = objective_;
    out.status = iterate(out.iterations);
    if (out.status != LpStatus::kOptimal) return out;

    out.x.assign(n_struct_, 0.0);
    for (int j = 0; j < n_struct_; ++j)
      if (status_[j] == VarStatus::kUpper) out.x[j] = ub_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_struct_) out.x[basis_[i]] = xb_[i];
    for (int j = 0; j < n_struct_; ++j) out.objective += objective_[j] * out.x[j];
    out.duals.resize(m_);
    for (int i = 0; i < m_; ++i) out.duals[i] = -sign_[i] * d_[init_col_[i]];
    return out;
  }

 private:
  double& at(int i, int j) { return T_[std::size_t(i) * n_ + j]; }

  void reduced_costs() {
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &T_[std::size_t(i) * n_];
      for (int j = 0; j < n_; ++j) d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  LpStatus iterate(long& iterations) {
    reduced_costs();
    const double inf = std::numeric_limits<double>::infinity();
    while (true) {
      if (iterations >= opt_.max_iterations) return LpStatus::kIterationLimit;
      int q = -1;
      double dir = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (status_[j] == VarStatus::kLower && ub_[j] > 0.0 && d_[j] > opt_.optimality_tol) {
          q = j;
          dir = 1.0;
          break;
        }
        if (status_[j] == VarStatus::kUpper && d_[j] < -opt_.optimality_tol) {
          q = j;
          dir = -1.0;
          break;
        }
      }
      if (q < 0) return LpStatus::kOptimal;
      ++iterations;

      double theta = ub_[q];
      int leave = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double a = dir * at(i, q);
        double lim;
        bool to_upper;
        if (a > opt_.pivot_tol) {
          lim = xb_[i] / a;
          to_upper = false;
        } else if (a < -opt_.pivot_tol && std::isfinite(ub_[basis_[i]])) {
          lim = (ub_[basis_[i]] - xb_[i]) / -a;
          to_upper = true;
        } else {
          continue;
        }
        lim = std::max(lim, 0.0);
        if (lim < theta || (leave >= 0 && lim == theta && basis_[i] < basis_[leave])) {
          theta = lim;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (theta == inf) return LpStatus::kUnbounded;

      for (int i = 0; i < m_; ++i) xb_[i] -= dir * theta * at(i, q);

      if (leave < 0) {
        status_[q] = dir > 0 ? VarStatus::kUpper : VarStatus::kLower;
        continue;
      }
      const int p = basis_[leave];
      const double entering_value = dir > 0 ? theta : ub_[q] - theta;
      pivot(leave, q);
      basis_[leave] = q;
      status_[q] = VarStatus::kBasic;
      status_[p] = leave_to_upper ? VarStatus::kUpper : VarStatus::kLower;
      xb_[leave] = entering_value;
      for (int i = 0; i < m_; ++i) {
        const double u = ub_[basis_[i]];
        if (xb_[i] < 0.0 && xb_[i] > -opt_.feasibility_tol) xb_[i] = 0.0;
        if (std::isfinite(u) && xb_[i] > u && xb_[i] < u + opt_.feasibility_tol) xb_[i] = u;
      }
    }
  }

  void pivot(int r, int q) {
    double* prow = &T_[std::size_t(r) * n_];
    const double inv = 1.0 / prow[q];
    for (int j = 0; j < n_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &T_[std::size_t(i) * n_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j = 0; j < n_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int j = 0; j < n_; ++j) d_[j] -= f * prow[j];
      d_[q] = 0.0;
    }
  }

  SimplexOptions opt_;
  int m_ = 0, n_ = 0, n_struct_ = 0;
  std::vector<double> T_, xb_, ub_, cost_, objective_, d_, sign_;
  std::vector<bool> artificial_;
  std::vector<VarStatus> status_;
  std::vector<int> basis_, init_col_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  if (static_cast<int>(lp.objective.size()) != lp.num_vars ||
      static_cast<int>(lp.upper.size()) != lp.num_vars)
    return {LpStatus::kInfeasible, 0.0, {}, {}, 0};
  Tableau t(lp, options);
  return t.run();
}

}  // namespace lookahead
