#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "lookahead/cr_solver.hpp"
#include "lookahead/lookahead_value.hpp"
#include "lookahead/random.hpp"
#include "lookahead/reach.hpp"
#include "lookahead/sim.hpp"
#include "oracle.hpp"

namespace lookahead::cli {

namespace {

class Checker {
 public:
  explicit Checker(CheckReport& r) : r_(r) {}

  void expect(bool ok, const std::string& what) {
    ++r_.checks;
    if (!ok) r_.failures.push_back(what);
  }
  void near(double a, double b, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": " << format_number(a) << " vs " << format_number(b);
    expect(std::fabs(a - b) <= tol || (std::isinf(a) && a == b), s.str());
  }
  void le(double a, double b, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": " << format_number(a) << " > " << format_number(b);
    expect(a <= b + tol, s.str());
  }
  // Runs a check body and records an exception as a failure.
  template <typename F>
  void guard(const std::string& what, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      expect(false, what + ": " + e.what());
    }
  }

 private:
  CheckReport& r_;
};

MarkovPolicy random_policy(const TabularMDP& m, CounterRng& rng) {
  Array3 pi({std::size_t(m.horizon()), std::size_t(m.num_states()), std::size_t(m.num_actions())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s) {
      double total = 0.0;
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a)) total += pi(h, s, a) = rng.exponential();
      for (int a = 0; a < m.num_actions(); ++a) pi(h, s, a) /= total;
    }
  return MarkovPolicy(std::move(pi));
}

Array3 random_rewards(const TabularMDP& m, CounterRng& rng) {
  Array3 r({std::size_t(m.horizon()), std::size_t(m.num_states()), std::size_t(m.num_actions())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s)
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a)) r(h, s, a) = rng.uniform();
  return r;
}

std::string tag(const std::string& what, std::uint64_t seed) {
  return what + " [seed " + std::to_string(seed) + "]";
}

void generator_suite(Checker& c) {
  struct Case {
    std::string name;
    Environment env;
    int S, A, H;
  };
  std::vector<Case> cases;
  cases.push_back({"delayed-tree", delayed_tree(2, 1, 5, 0.05), 3, 2, 5});
  cases.push_back({"delayed-tree n=0", delayed_tree(2, 0, 4, 0.05), 2, 2, 4});
  cases.push_back({"chain", chain(3, 2, ChainRewards::kProphetEqual), 4, 2, 3});
  cases.push_back({"grid", grid(4), 16, 2, 7});
  cases.push_back({"transition-tree", transition_lookahead_tree(3, 9).env, 0, 3, 9});
  cases.push_back({"bandit", {disguised_bandit(3, 2, 3, 1), std::nullopt, {}}, 3, 2, 3});
  cases.push_back({"ergodic", {ergodic_kernel(4, 2, 3, 0.8, 0.5, 1), std::nullopt, {}}, 4, 2, 3});
  cases.push_back({"random", {random_mdp(3, 3, 3, 1), std::nullopt, {}}, 3, 3, 3});
  for (const auto& k : cases) {
    auto v = validate(k.env.mdp);
    if (k.env.rewards) {
      auto rv = validate(k.env.mdp, *k.env.rewards);
      v.insert(v.end(), rv.begin(), rv.end());
    }
    c.expect(v.empty(), k.name + " validates: " + describe(v));
    if (k.S) c.expect(k.env.mdp.num_states() == k.S, k.name + " state count");
    c.expect(k.env.mdp.num_actions() == k.A && k.env.mdp.horizon() == k.H, k.name + " A and H");
  }
  c.expect(delayed_tree_leaves(delayed_tree(3, 2, 5, 0.05)).size() == 6, "delayed-tree leaf count");
}

void random_suite(Checker& c, int instances) {
  for (std::uint64_t seed = 1; seed <= std::uint64_t(instances); ++seed) {
    CounterRng rng(seed, 99);
    const int S = 1 + int(rng.uniform_int(3)), A = 1 + int(rng.uniform_int(3)),
              H = 1 + int(rng.uniform_int(3));
    const TabularMDP m = random_mdp(S, A, H, seed);
    c.guard(tag("random suite", seed), [&] {
      const MarkovPolicy pi = random_policy(m, rng);
      const OccupancyMeasure d = occupancy_of_policy(m, pi);
      c.expect(occupancy_violations(m, d).empty(), tag("policy occupancy is a flow", seed));
      const OccupancyMeasure back = occupancy_of_policy(m, policy_from_occupancy(m, d));
      double diff = 0.0;
      for (std::size_t k = 0; k < d.values().size(); ++k)
        diff = std::max(diff, std::fabs(d.values().flat()[k] - back.values().flat()[k]));
      c.le(diff, 0.0, 1e-12, tag("occupancy round trip", seed));

      const ReachTable reach(m);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
          c.le(d.state_mass(h, s), reach.optimal(h, s), 1e-12, tag("d^pi <= d*", seed));
          c.le(reach.optimal(h, s), 1.0, 1e-12, tag("d* <= 1", seed));
        }

      const Array3 r = random_rewards(m, rng);
      const RewardSpec rs = RewardSpec::long_shot(r, 0.1);
      double bound = 0.0;
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < A; ++a) bound += reach.optimal(h, s) * r(h, s, a);
      const double v0 = optimal_value_no_lookahead(m, rs).value;
      double prev_sup = v0, prev_cr = 1.0;
      for (int L = 1; L <= H; ++L) {
        const double sup = sup_lookahead_value(m, rs, L).value;
        c.le(prev_sup, sup, 1e-9, tag("sup nondecreasing in L", seed));
        c.le(sup, bound, 1e-9, tag("sup <= reach-weighted sum", seed));
        const CRReport w = cr_worst_expectations(m, L, false);
        c.le(w.lower_bound, w.ratio, 1e-8, tag("universal lower bound", seed));
        c.le(w.ratio, prev_cr, 1e-9, tag("worst CR nonincreasing in L", seed));
        const CRReport f = cr_fixed(m, rs, L);
        if (!f.degenerate) c.le(w.ratio, f.ratio, 1e-8, tag("worst CR <= fixed CR", seed));
        const CRReport st = cr_worst_expectations(m, L, true);
        c.le(w.ratio, st.ratio, 1e-8, tag("stationary worst CR >= nonstationary", seed));
        prev_sup = sup;
        prev_cr = w.ratio;
      }
    });
  }
}

void bandit_suite(Checker& c) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const TabularMDP m = disguised_bandit(3, 3, 3, seed);
    CounterRng rng(seed, 7);
    const Array2 base = state_distribution(m, random_policy(m, rng));
    for (int k = 0; k < 5; ++k) {
      const Array2 other = state_distribution(m, random_policy(m, rng));
      double diff = 0.0;
      for (std::size_t i = 0; i < base.size(); ++i)
        diff = std::max(diff, std::fabs(base.flat()[i] - other.flat()[i]));
      c.le(diff, 0.0, 1e-12, tag("bandit occupancy is policy independent", seed));
    }
    c.near(cr_worst_expectations(m, 1, false).ratio, 1.0 / 3, 1e-8, tag("bandit CR = 1/A", seed));
  }
}

void oracle_suite(Checker& c, int instances) {
  for (std::uint64_t seed = 1; seed <= std::uint64_t(instances); ++seed) {
    CounterRng rng(seed, 1234);
    const int S = 1 + int(rng.uniform_int(2)) + 1, A = 2, H = 1 + int(rng.uniform_int(3));
    const TabularMDP m = random_mdp(S, A, H, seed + 1000);
    c.guard(tag("oracle suite", seed), [&] {
      const Array3 r = random_rewards(m, rng);
      const RewardSpec rs = RewardSpec::long_shot(r, 0.3);
      c.near(plan_expected_rewards(m, r).value, oracle::policy_enumeration_value(m, r), 1e-10,
             tag("planning vs enumeration", seed));
      const ReachTable reach(m);
      const Array2 d = oracle::enumerated_optimal_reach(m);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) c.near(reach.optimal(h, s), d(h, s), 1e-12, tag("d* vs enumeration", seed));
      for (int L = 1; L <= H; ++L) {
        const Array2 a = modified_reward(m, r, L, reach), b = oracle::direct_modified_reward(m, r, L);
        for (std::size_t k = 0; k < a.size(); ++k)
          c.near(a.flat()[k], b.flat()[k], 1e-10, tag("modified reward vs direct", seed));
        const double exact = exact_lookahead_value(m, rs, L);
        const auto sup = sup_lookahead_value(m, rs, L);
        c.le(exact, sup.value, 1e-9, tag("exact <= sup", seed));
        c.le(*sup.certified_factor * sup.value, exact, 1e-9, tag("certified factor sandwich", seed));
      }
      c.near(exact_lookahead_value(m, rs, 1), oracle::one_step_value(m, rs), 1e-10,
             tag("one-step value vs Bellman oracle", seed));
      c.near(exact_lookahead_value(m, rs, H), oracle::full_information_value(m, rs), 1e-10,
             tag("full lookahead vs full information", seed));
      c.near(cr_worst_expectations(m, 1, false).ratio, oracle::one_step_cr(m), 1e-8,
             tag("one-step CR vs enumeration", seed));
      c.near(cr_worst_expectations(m, H, false).ratio, oracle::full_lookahead_cr(m), 1e-8,
             tag("full-lookahead CR vs coverability", seed));
    });
  }
}

void file_suite(Checker& c, const std::string& path) {
  Environment env;
  try {
    env = environment_from_json(read_json_file(path));
  } catch (const std::exception& e) {
    c.expect(false, path + ": " + e.what());
    return;
  }
  auto v = validate(env.mdp);
  if (env.rewards) {
    auto rv = validate(env.mdp, *env.rewards);
    v.insert(v.end(), rv.begin(), rv.end());
  }
  c.expect(v.empty(), path + ": " + describe(v));
  if (!v.empty()) return;
  c.guard(path, [&] {
    const MarkovPolicy pi = MarkovPolicy::uniform(env.mdp);
    c.expect(occupancy_violations(env.mdp, occupancy_of_policy(env.mdp, pi)).empty(),
             path + ": uniform policy occupancy is a flow");
    const ReachTable reach(env.mdp);
    for (double x : reach.optimal().flat()) c.le(x, 1.0, 1e-12, path + ": d* <= 1");
    if (env.rewards) {
      const double v0 = optimal_value_no_lookahead(env.mdp, *env.rewards).value;
      const double sup = sup_lookahead_value(env.mdp, *env.rewards, env.mdp.horizon()).value;
      c.le(v0, sup, 1e-9, path + ": V0 <= full lookahead supremum");
    }
  });
}

}  // namespace

CheckReport run_check(const std::string& level, const std::string& mdp_path) {
  if (level != "fast" && level != "full") throw DomainError("level must be fast or full");
  CheckReport report;
  Checker c(report);
  c.guard("generators", [&] { generator_suite(c); });
  c.guard("bandit", [&] { bandit_suite(c); });
  random_suite(c, level == "full" ? 60 : 20);
  if (level == "full") oracle_suite(c, 30);
  if (!mdp_path.empty()) file_suite(c, mdp_path);
  return report;
}

}  // namespace lookahead::cli
