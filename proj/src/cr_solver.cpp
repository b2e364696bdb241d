#include "lookahead/cr_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "lookahead/parallel.hpp"
#include "lookahead/random.hpp"
#include "lookahead/simplex.hpp"

namespace lookahead {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-10;

double ratio_of(double num, double den, bool& degenerate) {
  degenerate = false;
  if (den > 0.0) return num / den;
  if (num == 0.0) degenerate = true;
  return kInf;
}

// Deterministic base policy: `rules` holds actions for steps [0, K); later
// steps use the first available action.
MarkovPolicy base_policy(const TabularMDP& mdp, const std::vector<int>& rules, int K) {
  const int S = mdp.num_states(), H = mdp.horizon();
  IntArray2 act({std::size_t(H), std::size_t(S)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      act(h, s) = h < K ? rules[std::size_t(h) * S + s] : mdp.first_available(h, s);
  return MarkovPolicy::from_actions(act, mdp.num_actions());
}

struct Candidate {
  std::vector<int> rules;  // K * S actions
};

// Distinct state-marginal sequences d_0..d_K of deterministic base policies,
// in lexicographic order of the decision rules.
class MarginalEnumerator {
 public:
  MarginalEnumerator(const TabularMDP& mdp, int K, std::uint64_t cap)
      : mdp_(mdp), K_(K), cap_(cap), S_(mdp.num_states()) {}

  std::vector<Candidate> run() {
    std::vector<int> rules(std::size_t(K_) * S_, 0);
    for (int h = 0; h < K_; ++h)
      for (int s = 0; s < S_; ++s) rules[std::size_t(h) * S_ + s] = mdp_.first_available(h, s);
    recurse(0, mdp_.initial(), rules);
    return std::move(out_);
  }

 private:
  void recurse(int k, const std::vector<double>& mass, std::vector<int>& rules) {
    if (k == K_) {
      if (out_.size() >= cap_)
        throw CapExceeded("base-policy enumeration exceeds cap of " + std::to_string(cap_));
      out_.push_back({rules});
      return;
    }
    std::vector<int> support;
    for (int s = 0; s < S_; ++s)
      if (mass[s] > 0.0) support.push_back(s);
    std::vector<std::vector<int>> choices(support.size());
    double combos = 1.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      for (int a = 0; a < mdp_.num_actions(); ++a)
        if (mdp_.available(k, support[i], a)) choices[i].push_back(a);
      combos *= double(choices[i].size());
    }
    if (combos > double(cap_))
      throw CapExceeded("decision rules at one step exceed cap of " + std::to_string(cap_));

    std::map<std::vector<double>, bool> seen;
    std::vector<std::size_t> digit(support.size(), 0);
    while (true) {
      for (std::size_t i = 0; i < support.size(); ++i)
        rules[std::size_t(k) * S_ + support[i]] = choices[i][digit[i]];
      std::vector<double> next(S_, 0.0);
      for (int s : support) {
        const auto row = mdp_.next_state_row(k, s, rules[std::size_t(k) * S_ + s]);
        for (int n = 0; n < S_; ++n) next[n] += mass[s] * row[n];
      }
      if (seen.emplace(next, true).second) recurse(k + 1, next, rules);
      std::size_t i = support.size();
      bool more = false;
      while (i-- > 0) {
        if (++digit[i] < choices[i].size()) {
          more = true;
          break;
        }
        digit[i] = 0;
      }
      if (!more) break;
    }
    for (int s : support) rules[std::size_t(k) * S_ + s] = mdp_.first_available(k, s);
  }

  const TabularMDP& mdp_;
  int K_;
  std::uint64_t cap_;
  int S_;
  std::vector<Candidate> out_;
};

void fill_bounds(CRReport& rep, const TabularMDP& mdp, int L) {
  const AnalyticBounds b =
      analytic_bounds(mdp.num_states(), mdp.num_actions(), mdp.horizon(), L);
  rep.lower_bound = b.lower;
  rep.upper_bounds.push_back({"trivial", 1.0});
}

}  // namespace

std::string to_string(CRMode mode) {
  switch (mode) {
    case CRMode::kFixedReward: return "fixed";
    case CRMode::kWorstNonstationary: return "worst-r";
    case CRMode::kWorstStationary: return "worst-r-stationary";
  }
  return "unknown";
}

Array3 alpha_weights(const TabularMDP& mdp, const ReachTable& reach, int L, const Array2& base) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (base.extent(0) != std::size_t(H) || base.extent(1) != std::size_t(S))
    throw DimensionError("base marginals must have shape (H, S)");
  const LookaheadSpec spec(L, H);
  Array3 alpha({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h) {
    const int t = spec.reveal_step(h);
    for (int s = 0; s < S; ++s) {
      double w = 0.0;
      for (int n = 0; n < S; ++n) w += base(t, n) * reach.conditional(h, s, t, n);
      for (int a = 0; a < A; ++a)
        if (mdp.available(h, s, a)) alpha(h, s, a) = w;
    }
  }
  return alpha;
}

double coverage_ratio(const OccupancyMeasure& d, const Array3& alpha, bool stationary) {
  double best = kInf;
  const std::size_t H = alpha.extent(0), S = alpha.extent(1), A = alpha.extent(2);
  if (stationary) {
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t a = 0; a < A; ++a) {
        double w = 0.0, m = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
          w += alpha(h, s, a);
          m += d(int(h), int(s), int(a));
        }
        if (w > 0.0) best = std::min(best, m / w);
      }
    return best;
  }
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t a = 0; a < A; ++a)
        if (alpha(h, s, a) > 0.0) best = std::min(best, d(int(h), int(s), int(a)) / alpha(h, s, a));
  return best;
}

MaxMinResult maxmin_occupancy_lp(const TabularMDP& mdp, const Array3& alpha, bool stationary,
                                 const ReachTable& reach) {
  check_same_shape(mdp, alpha, "alpha");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  MaxMinResult out;
  out.coverage_duals = Array3(alpha.shape());

  LinearProgram lp;
  DenseArray<int, 3> var({std::size_t(H), std::size_t(S), std::size_t(A)}, -1);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const double cap = reach.optimal(h, s);
      if (!(cap > 0.0)) continue;
      for (int a = 0; a < A; ++a)
        if (mdp.available(h, s, a)) var(h, s, a) = lp.add_var(0.0, cap);
    }
  const int tvar = lp.add_var(1.0);

  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (!(reach.optimal(h, s) > 0.0)) continue;
      LpRow row;
      row.sense = RowSense::kEqual;
      for (int a = 0; a < A; ++a)
        if (var(h, s, a) >= 0) row.coeffs.push_back({var(h, s, a), 1.0});
      if (h == 0) {
        row.rhs = mdp.initial()[s];
      } else {
        for (int p = 0; p < S; ++p)
          for (int a = 0; a < A; ++a) {
            const int j = var(h - 1, p, a);
            if (j < 0) continue;
            const double pr = mdp.transition(h - 1, p, a, s);
            if (pr != 0.0) row.coeffs.push_back({j, -pr});
          }
      }
      lp.add_row(std::move(row));
    }
  const std::size_t first_cover = lp.rows.size();

  struct Group {
    int h, s, a;
  };
  std::vector<Group> groups;
  if (stationary) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        LpRow row;
        double w = 0.0;
        for (int h = 0; h < H; ++h) {
          w += alpha(h, s, a);
          if (var(h, s, a) >= 0) row.coeffs.push_back({var(h, s, a), -1.0});
        }
        if (!(w > 0.0)) continue;
        row.coeffs.push_back({tvar, w});
        lp.add_row(std::move(row));
        groups.push_back({0, s, a});
      }
  } else {
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const double w = alpha(h, s, a);
          if (!(w > 0.0)) continue;
          LpRow row;
          if (var(h, s, a) >= 0) row.coeffs.push_back({var(h, s, a), -1.0});
          row.coeffs.push_back({tvar, w});
          lp.add_row(std::move(row));
          groups.push_back({h, s, a});
        }
  }

  if (groups.empty()) {
    out.t_star = kInf;
    out.occupancy = occupancy_of_policy(mdp, MarkovPolicy::uniform(mdp));
    return out;
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error(std::string("coverage LP not solved: ") + to_string(sol.status));
  out.iterations = sol.iterations;
  out.t_star = sol.x[tvar];
  Array3 d({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        if (var(h, s, a) >= 0) d(h, s, a) = std::max(sol.x[var(h, s, a)], 0.0);
  out.occupancy = OccupancyMeasure(std::move(d));
  for (std::size_t g = 0; g < groups.size(); ++g)
    out.coverage_duals(groups[g].h, groups[g].s, groups[g].a) = sol.duals[first_cover + g];
  return out;
}

CRReport cr_fixed(const TabularMDP& mdp, const Array3& r, int L, const ReachTable& reach) {
  CRReport rep;
  rep.mode = CRMode::kFixedReward;
  rep.window = L;
  PlanResult plan = plan_expected_rewards(mdp, r);
  LookaheadValue sup = sup_lookahead_value(mdp, r, L, reach);
  rep.numerator = plan.value;
  rep.denominator = sup.value;
  rep.ratio = ratio_of(rep.numerator, rep.denominator, rep.degenerate);
  rep.witness_no_lookahead = std::move(plan.policy);
  rep.witness_lookahead_base = std::move(sup.witness);
  rep.candidates = 1;
  rep.minimizer_ties = 1;
  fill_bounds(rep, mdp, L);
  return rep;
}

CRReport cr_fixed(const TabularMDP& mdp, const RewardSpec& rewards, int L) {
  return cr_fixed(mdp, rewards.expectation(), L, ReachTable(mdp));
}

CRReport cr_worst_expectations(const TabularMDP& mdp, int L, bool stationary,
                               const CROptions& options) {
  const int H = mdp.horizon();
  LookaheadSpec spec(L, H);
  CRReport rep;
  rep.mode = stationary ? CRMode::kWorstStationary : CRMode::kWorstNonstationary;
  rep.window = L;
  fill_bounds(rep, mdp, L);
  if (L == 0) {
    rep.numerator = rep.denominator = rep.ratio = 1.0;
    rep.witness_no_lookahead = rep.witness_lookahead_base = MarkovPolicy::uniform(mdp);
    rep.candidates = rep.minimizer_ties = 1;
    return rep;
  }
  const ReachTable reach(mdp);
  const int K = H - L;
  const std::vector<Candidate> cands = MarginalEnumerator(mdp, K, options.enumeration_cap).run();

  std::vector<double> value(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) {
    const MarkovPolicy base = base_policy(mdp, cands[i].rules, K);
    const Array3 alpha = alpha_weights(mdp, reach, L, state_distribution(mdp, base));
    value[i] = maxmin_occupancy_lp(mdp, alpha, stationary, reach).t_star;
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < value.size(); ++i)
    if (value[i] < value[best]) best = i;
  for (double v : value)
    if (std::abs(v - value[best]) <= kTieTol) ++rep.minimizer_ties;

  const MarkovPolicy base = base_policy(mdp, cands[best].rules, K);
  const Array3 alpha = alpha_weights(mdp, reach, L, state_distribution(mdp, base));
  const MaxMinResult mm = maxmin_occupancy_lp(mdp, alpha, stationary, reach);
  rep.ratio = mm.t_star;
  rep.numerator = mm.t_star;
  rep.denominator = 1.0;
  rep.witness_lookahead_base = base;
  rep.witness_no_lookahead = policy_from_occupancy(mdp, mm.occupancy);
  rep.candidates = cands.size();
  rep.certified = true;
  return rep;
}

CRReport cr_worst_expectations_heuristic(const TabularMDP& mdp, int L, bool stationary,
                                         int restarts, std::uint64_t seed) {
  const int S = mdp.num_states(), H = mdp.horizon();
  LookaheadSpec spec(L, H);
  CRReport rep;
  rep.mode = stationary ? CRMode::kWorstStationary : CRMode::kWorstNonstationary;
  rep.window = L;
  rep.certified = false;
  fill_bounds(rep, mdp, L);
  if (L == 0) {
    rep.numerator = rep.denominator = rep.ratio = 1.0;
    rep.witness_no_lookahead = rep.witness_lookahead_base = MarkovPolicy::uniform(mdp);
    return rep;
  }
  const ReachTable reach(mdp);
  const int K = H - L;

  auto evaluate = [&](const std::vector<int>& rules, Array3* alpha_out, MaxMinResult* mm_out) {
    const MarkovPolicy base = base_policy(mdp, rules, K);
    Array3 alpha = alpha_weights(mdp, reach, L, state_distribution(mdp, base));
    MaxMinResult mm = maxmin_occupancy_lp(mdp, alpha, stationary, reach);
    ++rep.candidates;
    const double v = mm.t_star;
    if (alpha_out) *alpha_out = std::move(alpha);
    if (mm_out) *mm_out = std::move(mm);
    return v;
  };

  double best_value = kInf;
  std::vector<int> best_rules;
  CounterRng rng(seed, 0);
  for (int run = 0; run < std::max(restarts, 1); ++run) {
    std::vector<int> rules(std::size_t(K) * S);
    for (int h = 0; h < K; ++h)
      for (int s = 0; s < S; ++s) {
        std::vector<int> avail;
        for (int a = 0; a < mdp.num_actions(); ++a)
          if (mdp.available(h, s, a)) avail.push_back(a);
        rules[std::size_t(h) * S + s] =
            run == 0 ? avail.front() : avail[rng.uniform_int(avail.size())];
      }
    MaxMinResult mm;
    double current = evaluate(rules, nullptr, &mm);
    bool improved = true;
    while (improved) {
      improved = false;
      // Rank single swaps by the fixed-witness score, then accept the first
      // whose own LP value is strictly smaller.
      std::vector<std::pair<double, std::pair<int, int>>> moves;
      for (int h = 0; h < K; ++h)
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < mdp.num_actions(); ++a) {
            if (!mdp.available(h, s, a) || a == rules[std::size_t(h) * S + s]) continue;
            std::vector<int> trial = rules;
            trial[std::size_t(h) * S + s] = a;
            const MarkovPolicy base = base_policy(mdp, trial, K);
            const Array3 alpha = alpha_weights(mdp, reach, L, state_distribution(mdp, base));
            moves.push_back({coverage_ratio(mm.occupancy, alpha, stationary), {h * S + s, a}});
          }
      std::stable_sort(moves.begin(), moves.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& mv : moves) {
        std::vector<int> trial = rules;
        trial[std::size_t(mv.second.first)] = mv.second.second;
        MaxMinResult trial_mm;
        const double v = evaluate(trial, nullptr, &trial_mm);
        if (v < current - 1e-12) {
          rules = std::move(trial);
          current = v;
          mm = std::move(trial_mm);
          improved = true;
          break;
        }
      }
    }
    if (current < best_value) {
      best_value = current;
      best_rules = rules;
    }
  }
  const MarkovPolicy base = base_policy(mdp, best_rules, K);
  const Array3 alpha = alpha_weights(mdp, reach, L, state_distribution(mdp, base));
  const MaxMinResult mm = maxmin_occupancy_lp(mdp, alpha, stationary, reach);
  rep.ratio = rep.numerator = mm.t_star;
  rep.denominator = 1.0;
  rep.witness_lookahead_base = base;
  rep.witness_no_lookahead = policy_from_occupancy(mdp, mm.occupancy);
  rep.minimizer_ties = 1;
  return rep;
}

AnalyticBounds analytic_bounds(int S, int A, int H, int L, double delta) {
  if (S < 1 || A < 1 || H < 1 || L < 0 || L > H) throw DomainError("invalid (S, A, H, L)");
  AnalyticBounds b;
  if (L == 0) {
    b.lower = 1.0;
    b.tree_upper = 1.0;
    return b;
  }
  b.lower = std::max(1.0 / (double(S) * A * H), 1.0 / ((H - L + 1) * std::pow(double(A), L)));
  if (A < 2 || S < 2) return b;
  // Largest complete tree with at most S - 1 nodes whose leaves stay inside
  // the lookahead window from the root.
  int n = 0;
  double nodes = 1.0;
  while (n + 1 <= L - 1 && nodes * A <= S - 1) {
    nodes *= A;
    ++n;
  }
  const double complete = (1.0 + delta) / ((H - n) * (A - 1) * std::pow(double(A), n));
  b.tree_upper = complete;
  const bool power_of_a = nodes == double(S - 1);
  if (!power_of_a && S >= A + 2 && S <= std::pow(double(A), L) + 1) {
    const int depth = n + 1;
    const double leaves_actions = double(S) * (A - 1) - 2.0 * A;
    if (H - depth > 0 && leaves_actions > 0)
      b.tree_upper = std::min(complete, (1.0 + delta) / ((H - depth) * leaves_actions));
  }
  const double full_window = std::pow(double(A), L);
  if (S >= full_window + 1)
    b.tree_upper = std::min(b.tree_upper, (1.0 + delta) / ((H - L + 1) * (full_window - 1.0)));
  return b;
}

double reward_grid_oracle(const TabularMDP& mdp, int L, int g, std::uint64_t cap) {
  if (g < 1) throw DomainError("grid resolution must be positive");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const ReachTable reach(mdp);
  const LookaheadSpec spec(L, H);
  std::vector<std::array<int, 3>> coords;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      if (reach.optimal(h, s) > 0.0)
        for (int a = 0; a < A; ++a)
          if (mdp.available(h, s, a)) coords.push_back({h, s, a});
  const std::size_t m = coords.size();
  if (std::pow(double(g + 1), double(m)) > double(cap))
    throw CapExceeded("reward grid exceeds cap");
  if (m == 0) return kInf;

  // Per-coordinate contribution of a unit reward to the state reward r~.
  std::vector<int> reveal(m);
  for (std::size_t k = 0; k < m; ++k) reveal[k] = L == 0 ? coords[k][0] : spec.reveal_step(coords[k][0]);

  auto evaluate = [&](const std::vector<int>& level, Array3& r, Array2& tilde,
                      std::vector<double>& V, std::vector<double>& Vn) {
    std::fill(r.flat().begin(), r.flat().end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) r(coords[k][0], coords[k][1], coords[k][2]) = double(level[k]) / g;
    // No-lookahead optimum.
    std::fill(Vn.begin(), Vn.end(), 0.0);
    for (int h = H - 1; h >= 0; --h) {
      for (int s = 0; s < S; ++s) {
        double best = -kInf;
        for (int a = 0; a < A; ++a) {
          if (!mdp.available(h, s, a)) continue;
          double q = r(h, s, a);
          const auto row = mdp.next_state_row(h, s, a);
          for (int n = 0; n < S; ++n) q += row[n] * Vn[n];
          best = std::max(best, q);
        }
        V[s] = best;
      }
      std::swap(V, Vn);
    }
    double num = 0.0;
    for (int s = 0; s < S; ++s) num += mdp.initial()[s] * Vn[s];
    // Lookahead supremum.
    double den;
    if (L == 0) {
      den = num;
    } else {
      std::fill(tilde.flat().begin(), tilde.flat().end(), 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        if (level[k] == 0) continue;
        const int h = coords[k][0], s = coords[k][1], t = reveal[k];
        const double x = double(level[k]) / g;
        for (int n = 0; n < S; ++n) tilde(t, n) += reach.conditional(h, s, t, n) * x;
      }
      std::fill(Vn.begin(), Vn.end(), 0.0);
      for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
          double best = -kInf;
          for (int a = 0; a < A; ++a) {
            if (!mdp.available(h, s, a)) continue;
            double q = 0.0;
            const auto row = mdp.next_state_row(h, s, a);
            for (int n = 0; n < S; ++n) q += row[n] * Vn[n];
            best = std::max(best, q);
          }
          V[s] = tilde(h, s) + best;
        }
        std::swap(V, Vn);
      }
      den = 0.0;
      for (int s = 0; s < S; ++s) den += mdp.initial()[s] * Vn[s];
    }
    return den > 0.0 ? num / den : kInf;
  };

  std::vector<double> best(g + 1, kInf);
  parallel_for(std::size_t(g + 1), [&](std::size_t first) {
    std::vector<int> level(m, 0);
    level[0] = int(first);
    Array3 r({std::size_t(H), std::size_t(S), std::size_t(A)});
    Array2 tilde({std::size_t(H), std::size_t(S)});
    std::vector<double> V(S), Vn(S);
    double local = kInf;
    while (true) {
      local = std::min(local, evaluate(level, r, tilde, V, Vn));
      std::size_t k = 1;
      while (k < m && ++level[k] > g) level[k++] = 0;
      if (k >= m) break;
    }
    best[first] = local;
  });
  return *std::min_element(best.begin(), best.end());
}

}  // namespace lookahead
