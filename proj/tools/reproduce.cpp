#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "lookahead/cr_solver.hpp"
#include "lookahead/env_zoo.hpp"
#include "lookahead/sim.hpp"

namespace lookahead::cli {

namespace {

std::string label(const std::string& what, const std::map<std::string, double>& p) {
  std::ostringstream s;
  s << what;
  for (const auto& [k, v] : p) s << " " << k << "=" << format_number(v);
  return s.str();
}

ReproRow equal_row(std::string q, double computed, double ref, double tol) {
  return {std::move(q), computed, ref, std::fabs(computed - ref) <= tol, tol};
}
ReproRow at_least(std::string q, double computed, double bound, double tol) {
  return {std::move(q) + " >=", computed, bound, computed >= bound - tol, tol};
}
ReproRow at_most(std::string q, double computed, double bound, double tol) {
  return {std::move(q) + " <=", computed, bound, computed <= bound + tol, tol};
}

std::vector<ReproRow> bandit() {
  std::vector<ReproRow> rows;
  for (int A = 2; A <= 5; ++A) {
    const int S = 2, H = 2;
    const TabularMDP m = disguised_bandit(S, A, H, std::uint64_t(A));
    for (int L : {1, H}) {
      const double cr = cr_worst_expectations(m, L, false).ratio;
      rows.push_back(equal_row(label("bandit cr_worst", {{"S", S}, {"A", A}, {"H", H}, {"L", L}}),
                               cr, 1.0 / A, 1e-9));
    }
  }
  return rows;
}

std::vector<ReproRow> chain_rows() {
  std::vector<ReproRow> rows;
  for (int A : {2, 3})
    for (int H = 2; H <= 6; ++H) {
      const Environment env = chain(H, A, ChainRewards::kProphetEqual);
      const double ref = 1.0 / ((A - 1) * H);
      for (int L : {1, H})
        rows.push_back(equal_row(label("chain cr_fixed", {{"A", A}, {"H", H}, {"L", L}}),
                                 cr_fixed(env.mdp, *env.rewards, L).ratio, ref, 1e-9));
    }
  return rows;
}

std::vector<ReproRow> grid_rows() {
  std::vector<ReproRow> rows;
  for (int n = 3; n <= 6; ++n) {
    const Environment env = grid(n);
    const TabularMDP& m = env.mdp;
    const OccupancyMeasure d = occupancy_of_policy(m, grid_flow_policy(n));
    const ReachTable reach(m);
    double min_flow = std::numeric_limits<double>::infinity(), interior_dev = 0.0;
    for (int h = 0; h < m.horizon(); ++h)
      for (int s = 0; s < m.num_states(); ++s)
        for (int a = 0; a < m.num_actions(); ++a)
          if (reach.optimal(h, s) > 0.0 && m.available(h, s, a)) min_flow = std::min(min_flow, d(h, s, a));
    for (int i = 2; i <= n - 1; ++i)
      for (int j = 2; j <= n - 1; ++j)
        interior_dev = std::max(
            interior_dev, std::fabs(d.state_mass(i + j - 2, grid_state(n, i, j)) - 1.0 / (n - 1)));
    rows.push_back(at_least(label("grid min edge flow", {{"n", n}}), min_flow, 0.5 / (n - 1), 1e-9));
    rows.push_back(equal_row(label("grid interior occupancy deviation", {{"n", n}}), interior_dev, 0.0, 1e-9));
    const int H = m.horizon();
    rows.push_back(at_least(label("grid cr_worst", {{"n", n}, {"L", H}}),
                            cr_worst_expectations(m, H, false).ratio, 1.0 / (H - 1), 1e-8));
  }
  return rows;
}

std::vector<ReproRow> tree_rows() {
  std::vector<ReproRow> rows;
  const int A = 2, H = 6;
  const double eps = 0.01;
  for (int n : {0, 1}) {
    const Environment env = delayed_tree(A, n, H, eps);
    const double K = (H - n) * (A - 1) * std::pow(A, n);
    const double delta = 1.0 / (1.0 - K * eps) - 1.0;
    const std::map<std::string, double> p{{"A", A}, {"n", n}, {"H", H}, {"eps", eps}};
    rows.push_back(at_most(label("tree cr_fixed", p), cr_fixed(env.mdp, *env.rewards, H).ratio,
                           (1.0 + delta) / K, 1e-9));
    rows.push_back(at_least(label("tree exact lookahead value", p),
                            exact_lookahead_value(env.mdp, *env.rewards, H),
                            1.0 - std::pow(1.0 - eps, K), 1e-9));
  }
  return rows;
}

std::vector<ReproRow> ergodic_rows() {
  std::vector<ReproRow> rows;
  const int S = 3, A = 2, H = 3;
  const double alpha = 0.8, beta = 0.5;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const TabularMDP m = ergodic_kernel(S, A, H, alpha, beta, seed);
    int members = 0, total = 0;
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a, ++total)
          members += in_ergodic_family(m.next_state_row(h, s, a), alpha, beta) ? 1 : 0;
    const std::map<std::string, double> p{{"S", S}, {"A", A}, {"H", H}, {"seed", double(seed)}};
    rows.push_back(equal_row(label("ergodic rows outside family", p), total - members, 0.0, 0.0));
    const double bound = (1.0 - std::pow(S, beta - 1.0)) / (A * std::pow(S, alpha));
    rows.push_back(at_least(label("ergodic cr_worst L=1", p), cr_worst_expectations(m, 1, false).ratio,
                            bound, 1e-9));
  }
  return rows;
}

std::vector<ReproRow> transition_rows() {
  const int A = 3, H = 9;
  const auto e = simulate_transition_lookahead(A, H, 100000, 7);
  const std::map<std::string, double> p{{"A", A}, {"H", H}};
  const double bound = 2.0 / std::pow(A - 1.0, (1.0 - std::exp(-1.0)) * H - 3.0);
  return {
      at_least(label("transition V1", p), e.one_step.mean, 1.0 - std::exp(-2.0), 3 * e.one_step.std_error),
      at_most(label("transition V0", p), e.no_lookahead.mean, 1.0 / e.leaves, 3 * e.no_lookahead.std_error),
      at_most(label("transition ratio", p), e.ratio, bound, 3 * e.ratio_std_error),
  };
}

}  // namespace

std::vector<std::string> reproduce_sections() {
  return {"bandit", "chain", "grid", "tree", "ergodic", "transition"};
}

std::vector<ReproRow> reproduce(const std::string& section) {
  if (section == "bandit") return bandit();
  if (section == "chain") return chain_rows();
  if (section == "grid") return grid_rows();
  if (section == "tree") return tree_rows();
  if (section == "ergodic") return ergodic_rows();
  if (section == "transition") return transition_rows();
  throw DomainError("unknown section '" + section + "'");
}

CsvTable reproduce_table(const std::vector<ReproRow>& rows) {
  CsvTable t;
  t.header = {"quantity", "computed", "reference_value_or_bound", "pass", "tolerance"};
  for (const auto& r : rows)
    t.rows.push_back({r.quantity, format_number(r.computed), format_number(r.reference),
                      r.pass ? "pass" : "fail", format_number(r.tolerance)});
  return t;
}

}  // namespace lookahead::cli
