#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lookahead/simplex.hpp"

namespace lookahead::oracle {
namespace {

constexpr double kCap = 2e6;

// Odometer over deterministic decision rules on steps [t0, t1) for all states.
class RuleOdometer {
 public:
  RuleOdometer(const TabularMDP& m, int t0, int t1) : m_(m), t0_(t0), t1_(t1) {
    double combos = 1.0;
    for (int h = t0; h < t1; ++h)
      for (int s = 0; s < m.num_states(); ++s) {
        std::vector<int> av;
        for (int a = 0; a < m.num_actions(); ++a)
          if (m.available(h, s, a)) av.push_back(a);
        choices_.push_back(av);
        combos *= double(av.size());
      }
    if (combos > kCap) throw CapExceeded("oracle enumeration too large");
    digit_.assign(choices_.size(), 0);
  }
  int action(int h, int s) const {
    const std::size_t k = std::size_t(h - t0_) * m_.num_states() + s;
    return choices_[k][digit_[k]];
  }
  bool next() {
    for (std::size_t k = 0; k < digit_.size(); ++k) {
      if (++digit_[k] < choices_[k].size()) return true;
      digit_[k] = 0;
    }
    return false;
  }

 private:
  const TabularMDP& m_;
  int t0_, t1_;
  std::vector<std::vector<int>> choices_;
  std::vector<std::size_t> digit_;
};

std::vector<double> step(const TabularMDP& m, int h, const std::vector<double>& mass,
                         const RuleOdometer& rules) {
  std::vector<double> next(m.num_states(), 0.0);
  for (int s = 0; s < m.num_states(); ++s) {
    if (mass[s] == 0.0) continue;
    const int a = rules.action(h, s);
    for (int n = 0; n < m.num_states(); ++n) next[n] += mass[s] * m.transition(h, s, a, n);
  }
  return next;
}

// max over occupancies of min over alpha > 0 of d / alpha, built from scratch.
double coverage_lp(const TabularMDP& m, const Array3& alpha) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  LinearProgram lp;
  DenseArray<int, 3> var({std::size_t(H), std::size_t(S), std::size_t(A)}, -1);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        if (m.available(h, s, a)) var(h, s, a) = lp.add_var(0.0);
  const int t = lp.add_var(1.0);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      LpRow row;
      row.sense = RowSense::kEqual;
      for (int a = 0; a < A; ++a)
        if (var(h, s, a) >= 0) row.coeffs.push_back({var(h, s, a), 1.0});
      if (h == 0) row.rhs = m.initial()[s];
      else
        for (int p = 0; p < S; ++p)
          for (int a = 0; a < A; ++a)
            if (var(h - 1, p, a) >= 0 && m.transition(h - 1, p, a, s) != 0.0)
              row.coeffs.push_back({var(h - 1, p, a), -m.transition(h - 1, p, a, s)});
      lp.add_row(row);
    }
  bool any = false;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        if (alpha(h, s, a) > 0.0 && var(h, s, a) >= 0) {
          lp.add_row({{{var(h, s, a), -1.0}, {t, alpha(h, s, a)}}, RowSense::kLessEqual, 0.0});
          any = true;
        }
  if (!any) return std::numeric_limits<double>::infinity();
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) throw std::runtime_error("oracle LP failed");
  return sol.objective;
}

template <typename F>
void for_each_realization(const std::vector<std::vector<Outcome>>& supports, F&& fn) {
  double combos = 1.0;
  for (const auto& s : supports) combos *= double(s.size());
  if (combos > kCap) throw CapExceeded("oracle realization enumeration too large");
  std::vector<std::size_t> digit(supports.size(), 0);
  std::vector<double> values(supports.size());
  while (true) {
    double p = 1.0;
    for (std::size_t k = 0; k < supports.size(); ++k) {
      p *= supports[k][digit[k]].prob;
      values[k] = supports[k][digit[k]].value;
    }
    fn(p, values);
    std::size_t k = 0;
    for (; k < digit.size(); ++k) {
      if (++digit[k] < supports[k].size()) break;
      digit[k] = 0;
    }
    if (k == digit.size()) break;
  }
}

}  // namespace

double policy_enumeration_value(const TabularMDP& m, const Array3& r) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  RuleOdometer rules(m, 0, H);
  double best = -std::numeric_limits<double>::infinity();
  do {
    std::vector<double> mass = m.initial();
    double v = 0.0;
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) v += mass[s] * r(h, s, rules.action(h, s));
      mass = step(m, h, mass, rules);
    }
    best = std::max(best, v);
  } while (rules.next());
  (void)A;
  return best;
}

double enumerated_reach(const TabularMDP& m, int target_h, int target_s, int t, int from) {
  if (t > target_h) return 0.0;
  RuleOdometer rules(m, t, target_h);
  double best = 0.0;
  do {
    std::vector<double> mass(m.num_states(), 0.0);
    mass[from] = 1.0;
    for (int h = t; h < target_h; ++h) mass = step(m, h, mass, rules);
    best = std::max(best, mass[target_s]);
  } while (rules.next());
  return best;
}

Array2 enumerated_optimal_reach(const TabularMDP& m) {
  const int S = m.num_states(), H = m.horizon();
  Array2 out({std::size_t(H), std::size_t(S)});
  RuleOdometer rules(m, 0, H - 1);
  do {
    std::vector<double> mass = m.initial();
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) out(h, s) = std::max(out(h, s), mass[s]);
      if (h + 1 < H) mass = step(m, h, mass, rules);
    }
  } while (rules.next());
  return out;
}

Array2 direct_modified_reward(const TabularMDP& m, const Array3& r, int L) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  Array2 out({std::size_t(H), std::size_t(S)});
  for (int h = 0; h < H; ++h) {
    const int t = std::max(h - std::max(L, 1) + 1, 0);
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) total += r(h, s, a);
      if (total == 0.0) continue;
      for (int from = 0; from < S; ++from)
        out(t, from) += enumerated_reach(m, h, s, t, from) * total;
    }
  }
  return out;
}

double full_information_value(const TabularMDP& m, const RewardSpec& rewards) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  std::vector<std::vector<Outcome>> supports;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) supports.push_back(rewards.outcomes(h, s, a));
  double total = 0.0;
  for_each_realization(supports, [&](double p, const std::vector<double>& R) {
    if (p == 0.0) return;
    std::vector<double> V(S, 0.0), W(S);
    for (int h = H - 1; h >= 0; --h) {
      for (int s = 0; s < S; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a) {
          if (!m.available(h, s, a)) continue;
          double q = R[(std::size_t(h) * S + s) * A + a];
          for (int n = 0; n < S; ++n) q += m.transition(h, s, a, n) * V[n];
          best = std::max(best, q);
        }
        W[s] = best;
      }
      V = W;
    }
    double v = 0.0;
    for (int s = 0; s < S; ++s) v += m.initial()[s] * V[s];
    total += p * v;
  });
  return total;
}

double one_step_value(const TabularMDP& m, const RewardSpec& rewards) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  std::vector<double> V(S, 0.0), W(S);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      std::vector<double> future(A);
      std::vector<std::vector<Outcome>> supports;
      std::vector<int> acts;
      for (int a = 0; a < A; ++a) {
        if (!m.available(h, s, a)) continue;
        double q = 0.0;
        for (int n = 0; n < S; ++n) q += m.transition(h, s, a, n) * V[n];
        future[a] = q;
        supports.push_back(rewards.outcomes(h, s, a));
        acts.push_back(a);
      }
      double e = 0.0;
      for_each_realization(supports, [&](double p, const std::vector<double>& R) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < acts.size(); ++k) best = std::max(best, R[k] + future[acts[k]]);
        e += p * best;
      });
      W[s] = e;
    }
    V = W;
  }
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += m.initial()[s] * V[s];
  return v;
}

double state_sum_sup(const TabularMDP& m, const Array3& r) {
  Array3 broad(r.shape());
  for (std::size_t h = 0; h < r.extent(0); ++h)
    for (std::size_t s = 0; s < r.extent(1); ++s) {
      double total = 0.0;
      for (std::size_t a = 0; a < r.extent(2); ++a) total += r(h, s, a);
      for (std::size_t a = 0; a < r.extent(2); ++a) broad(h, s, a) = total;
    }
  return policy_enumeration_value(m, broad);
}

double reach_weighted_sum(const TabularMDP& m, const Array3& r) {
  const Array2 d = enumerated_optimal_reach(m);
  double v = 0.0;
  for (std::size_t h = 0; h < r.extent(0); ++h)
    for (std::size_t s = 0; s < r.extent(1); ++s)
      for (std::size_t a = 0; a < r.extent(2); ++a) v += d(h, s) * r(h, s, a);
  return v;
}

double one_step_cr(const TabularMDP& m) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  RuleOdometer rules(m, 0, H);
  double best = std::numeric_limits<double>::infinity();
  do {
    Array3 alpha({std::size_t(H), std::size_t(S), std::size_t(A)});
    std::vector<double> mass = m.initial();
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
          if (m.available(h, s, a)) alpha(h, s, a) = mass[s];
      mass = step(m, h, mass, rules);
    }
    best = std::min(best, coverage_lp(m, alpha));
  } while (rules.next());
  return best;
}

double full_lookahead_cr(const TabularMDP& m) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  const Array2 d = enumerated_optimal_reach(m);
  Array3 alpha({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        if (m.available(h, s, a)) alpha(h, s, a) = d(h, s);
  return coverage_lp(m, alpha);
}

double chain_maxmin_grid(int H, int resolution) {
  if (std::pow(resolution + 1.0, H) > 5e7) throw CapExceeded("chain grid too large");
  std::vector<int> digit(H, 0);
  double best = 0.0;
  while (true) {
    double m = 1.0, terminal = 0.0, worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < H; ++k) {
      if (k >= 1) worst = std::min(worst, terminal / 2.0);
      const double p = double(digit[k]) / resolution;
      worst = std::min({worst, m * p, m * (1.0 - p)});
      terminal += m * (1.0 - p);
      m *= p;
    }
    best = std::max(best, worst);
    int k = 0;
    for (; k < H; ++k) {
      if (++digit[k] <= resolution) break;
      digit[k] = 0;
    }
    if (k == H) break;
  }
  return best;
}

Array3 monte_carlo_occupancy(const TabularMDP& m, const MarkovPolicy& policy,
                             std::uint64_t episodes, std::uint64_t seed) {
  const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pick = [&](auto&& prob, int n) {
    const double u = unif(gen);
    double acc = 0.0;
    int last = 0;
    for (int i = 0; i < n; ++i) {
      if (prob(i) <= 0.0) continue;
      acc += prob(i);
      last = i;
      if (u < acc) return i;
    }
    return last;
  };
  Array3 count({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (std::uint64_t e = 0; e < episodes; ++e) {
    int s = pick([&](int i) { return m.initial()[i]; }, S);
    for (int h = 0; h < H; ++h) {
      const int a = pick([&](int i) { return policy.prob(h, s, i); }, A);
      count(h, s, a) += 1.0;
      s = pick([&](int i) { return m.transition(h, s, a, i); }, S);
    }
  }
  for (double& x : count.flat()) x /= double(episodes);
  return count;
}

}  // namespace lookahead::oracle
