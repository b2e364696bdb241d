#include <doctest.h>

#include "generators.hpp"
#include "lookahead/cr_solver.hpp"
#include "lookahead/env_zoo.hpp"

using namespace lookahead;

namespace {

void check_valid(const Environment& env) {
  CHECK(validate(env.mdp).empty());
  if (env.rewards) CHECK(validate(env.mdp, *env.rewards).empty());
}

double bound(const EnvDescriptor& d, const std::string& name) {
  for (const auto& b : d.expected_bounds)
    if (b.name == name) return b.value;
  FAIL("missing bound " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("delayed tree sizes and leaves") {
  const Environment t0 = delayed_tree(2, 0, 4, 0.05);
  check_valid(t0);
  CHECK(t0.mdp.num_states() == 2);
  CHECK(t0.rewards->expectation(0, 0, 0) == 0.0);  // the stay action pays nothing
  CHECK(t0.rewards->expectation(0, 0, 1) == doctest::Approx(0.05));

  const Environment t1 = delayed_tree(2, 1, 5, 0.05);
  check_valid(t1);
  CHECK(t1.mdp.num_states() == 3);
  CHECK(delayed_tree_leaves(t1).size() == 1);
  const double K = 4 * 1 * 2;
  CHECK(bound(t1.descriptor, "cr_fixed_upper") == doctest::Approx(1.0 / (K - K * K * 0.05)));

  for (int A : {2, 3})
    for (int n = 1; n <= 3; ++n) {
      const Environment t = delayed_tree(A, n, n + 2, 0.1);
      check_valid(t);
      CHECK(t.mdp.num_states() == int(std::pow(A, n)) + 1);
      CHECK(delayed_tree_leaves(t).size() == std::size_t((A - 1) * std::pow(A, n - 1)));
    }
  CHECK_THROWS_AS(delayed_tree(1, 1, 4, 0.1), DomainError);
  CHECK_THROWS_AS(delayed_tree(2, 1, 4, 1.0), DomainError);
}

TEST_CASE("incomplete delayed tree keeps enough leaves") {
  for (int S : {4, 6, 7, 9, 12}) {
    const Environment t = delayed_tree_with_states(2, S, 6, 0.05);
    check_valid(t);
    CHECK(t.mdp.num_states() == S);
    CHECK(double(delayed_tree_leaves(t).size()) >= S * 0.5 - 2);
  }
}

TEST_CASE("chain structure and prophet ratio") {
  const Environment c = chain(3, 2, ChainRewards::kProphetEqual);
  check_valid(c);
  CHECK(c.mdp.num_states() == 4);
  CHECK(c.mdp.transition(0, 0, 0, 1) == 1.0);
  CHECK(c.mdp.transition(0, 0, 1, 3) == 1.0);
  CHECK(cr_fixed(c.mdp, *c.rewards, 3).ratio == doctest::Approx(1.0 / 3));
  const Environment one = chain(1, 2, ChainRewards::kProphetEqual);
  check_valid(one);
  CHECK(cr_fixed(one.mdp, *one.rewards, 1).ratio == doctest::Approx(1.0));
}

TEST_CASE("chain witness policy covers every exit") {
  for (int H = 2; H <= 6; ++H)
    for (int A : {2, 3}) {
      const TabularMDP m = chain(H, A, ChainRewards::kProphetEqual).mdp;
      const MarkovPolicy pi = chain_witness_policy(m);
      CHECK(validate(m, pi).empty());
      const OccupancyMeasure d = occupancy_of_policy(m, pi);
      const ReachTable reach(m);
      double worst = 1.0;
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < m.num_states(); ++s)
          if (reach.optimal(h, s) > 0)
            for (int a = 0; a < A; ++a) worst = std::min(worst, d(h, s, a) / reach.optimal(h, s));
      // The weakest exit is the last chain node, (1 - 1/H)^(H-1) / ((A-1) H).
      CHECK(worst >= 1.0 / (std::exp(1.0) * (A - 1) * H) - 1e-12);
      if (A == 2) CHECK(worst >= (1 - std::exp(-1.0)) / (A * H) - 1e-12);
      // The optimal coverage meets the (1 - 1/e) / (AH) level for every A.
      CHECK(cr_worst_expectations(m, H, false).ratio >= (1 - std::exp(-1.0)) / (A * H) - 1e-12);
    }
}

TEST_CASE("grid flow policy table") {
  const MarkovPolicy p3 = grid_flow_policy(3);
  CHECK(p3.prob(0, grid_state(3, 1, 1), 0) == doctest::Approx(0.5));
  CHECK(p3.prob(1, grid_state(3, 1, 2), 0) == doctest::Approx(0.5));
  CHECK(p3.prob(1, grid_state(3, 2, 1), 0) == doctest::Approx(0.5));

  const int n = 5;
  const Environment g = grid(n);
  check_valid(g);
  CHECK(g.mdp.num_states() == n * n);
  CHECK(g.mdp.horizon() == 2 * n - 1);
  CHECK(g.mdp.num_available(0, grid_state(n, n, 2)) == 1);
  CHECK(g.mdp.num_available(0, grid_state(n, 2, n)) == 1);
  CHECK(g.mdp.num_available(0, grid_state(n, n, n)) == 2);
  const MarkovPolicy p = grid_flow_policy(n);
  CHECK(validate(g.mdp, p).empty());
  CHECK(p.prob(1, grid_state(n, 1, 2), 0) == doctest::Approx(double(n - 2) / (n - 1)));
  CHECK(p.prob(1, grid_state(n, 2, 1), 0) == doctest::Approx(1.0 / (n - 1)));
  CHECK(p.prob(3, grid_state(n, 2, 3), 0) == doctest::Approx(0.5));
}

TEST_CASE("grid flow reaches the advertised minimum") {
  for (int n = 3; n <= 6; ++n) {
    const Environment g = grid(n);
    const OccupancyMeasure d = occupancy_of_policy(g.mdp, grid_flow_policy(n));
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const int h = i + j - 2, s = grid_state(n, i, j);
        for (int a = 0; a < 2; ++a)
          if (g.mdp.available(h, s, a)) CHECK(d(h, s, a) >= 0.5 / (n - 1) - 1e-12);
        if (i >= 2 && j >= 2 && i <= n - 1 && j <= n - 1)
          CHECK(d.state_mass(h, s) == doctest::Approx(1.0 / (n - 1)));
      }
  }
}

TEST_CASE("disguised bandit occupancy does not depend on the policy") {
  gen::Rng g(61);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMDP m = disguised_bandit(3, 3, 3, seed);
    CHECK(validate(m).empty());
    const Array2 base = state_distribution(m, gen::policy(g, m));
    for (int k = 0; k < 20; ++k)
      CHECK(gen::max_abs_diff(base.flat(), state_distribution(m, gen::policy(g, m)).flat()) < 1e-12);
  }
  CHECK(disguised_bandit(2, 2, 2, 9).kernel() == disguised_bandit(2, 2, 2, 9).kernel());
}

TEST_CASE("ergodic family membership and sampling") {
  CHECK(in_ergodic_family(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0.6, 0.3));
  CHECK(in_ergodic_family(std::vector<double>{0.2, 0.5, 0.3}, 0.999, 0.999));
  CHECK_FALSE(in_ergodic_family(std::vector<double>{0.9, 0.05, 0.05}, 0.5, 0.2));
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const TabularMDP m = ergodic_kernel(4, 2, 3, 0.7, 0.4, seed);
    CHECK(validate(m).empty());
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) CHECK(in_ergodic_family(m.next_state_row(h, s, a), 0.7, 0.4));
    const double lower = (1 - std::pow(4.0, 0.4 - 1)) / (2 * std::pow(4.0, 0.7));
    CHECK(cr_worst_expectations(m, 1, false).ratio >= lower - 1e-9);
  }
  CHECK_THROWS_AS(ergodic_kernel(3, 2, 2, 0.3, 0.5, 0), DomainError);
}

TEST_CASE("transition lookahead tree") {
  const TransitionTree t = transition_lookahead_tree(3, 9);
  check_valid(t.env);
  CHECK(t.depth == 4);
  CHECK(t.leaves == 8);
  CHECK(t.env.descriptor.expected_bounds.size() == 3);
  CHECK(bound(t.env.descriptor, "ratio_upper") == doctest::Approx(0.310).epsilon(0.001));
  const TransitionTree small = transition_lookahead_tree(2, 5);
  CHECK(small.depth == 2);
  CHECK(small.leaves == 1);
  CHECK(small.env.descriptor.params.at("vacuous_ratio_bound") == 1);
  CHECK_THROWS_AS(transition_lookahead_tree(3, 4), DomainError);
}

TEST_CASE("generic builder") {
  CHECK(make_environment("grid", {{"n", 3}}).mdp.num_states() == 9);
  CHECK(make_environment("delayed-tree", {{"A", 2}, {"n", 1}, {"H", 5}}).mdp.num_states() == 3);
  CHECK(make_environment("delayed-tree", {{"A", 2}, {"S", 6}, {"H", 6}}).mdp.num_states() == 6);
  CHECK(make_environment("random", {{"S", 2}, {"A", 2}, {"H", 2}, {"seed", 3}}).descriptor.kind ==
        EnvKind::kRandom);
  CHECK_THROWS_AS(make_environment("nope", {}), DomainError);
  CHECK_THROWS_AS(make_environment("grid", {}), DomainError);
  CHECK_THROWS_AS(make_environment("grid", {{"n", 2.5}}), DomainError);
  for (const char* k : {"delayed-tree", "chain", "grid", "bandit", "ergodic", "transition-tree", "random"})
    CHECK(to_string(env_kind_from_string(k)) == k);
}
