#include <doctest.h>

#include "generators.hpp"
#include "lookahead/cr_solver.hpp"
#include "lookahead/env_zoo.hpp"
#include "lookahead/lookahead_value.hpp"
#include "lookahead/sim.hpp"

using namespace lookahead;

// Cross-module invariants on random instances.

TEST_CASE("ratios are invariant to reward scaling") {
  gen::Rng g(91);
  for (int trial = 0; trial < 60; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    Array3 r = gen::rewards(g, m, 0.1);
    const int L = g.integer(1, m.horizon());
    const CRReport a = cr_fixed(m, RewardSpec::long_shot(r, 0.2), L);
    for (double& x : r.flat()) x *= 7.5;
    const CRReport b = cr_fixed(m, RewardSpec::long_shot(r, 0.2), L);
    if (!a.degenerate) CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-10));
  }
}

TEST_CASE("worst-case ratio lower-bounds random fixed rewards") {
  gen::Rng g(92);
  for (int trial = 0; trial < 40; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const int L = g.integer(1, m.horizon());
    const double w = cr_worst_expectations(m, L, false).ratio;
    for (int k = 0; k < 10; ++k) {
      const CRReport f = cr_fixed(m, RewardSpec::deterministic(gen::rewards(g, m, 0.5)), L);
      if (!f.degenerate) CHECK(f.ratio >= w - 1e-9);
    }
  }
}

TEST_CASE("the max-min occupancy is realized by its recovered policy") {
  gen::Rng g(93);
  for (int trial = 0; trial < 40; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const ReachTable reach(m);
    const int L = g.integer(1, m.horizon());
    const Array3 alpha = alpha_weights(m, reach, L, state_distribution(m, gen::deterministic_policy(g, m)));
    const MaxMinResult r = maxmin_occupancy_lp(m, alpha, false, reach);
    const MarkovPolicy pi = policy_from_occupancy(m, r.occupancy);
    CHECK(coverage_ratio(occupancy_of_policy(m, pi), alpha, false) == doctest::Approx(r.t_star).epsilon(1e-9));
  }
}

TEST_CASE("disguised bandits have ratio 1/A for every window") {
  for (int A = 2; A <= 4; ++A)
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const TabularMDP m = disguised_bandit(2, A, 3, seed);
      for (int L = 1; L <= 3; ++L) CHECK(cr_worst_expectations(m, L, false).ratio == doctest::Approx(1.0 / A));
    }
}

TEST_CASE("stationary kernels keep the stationary-mode ordering") {
  gen::Rng g(94);
  for (int trial = 0; trial < 30; ++trial) {
    const int S = g.integer(1, 3), A = g.integer(1, 3), H = g.integer(1, 3);
    const TabularMDP m = random_mdp(S, A, H, 100 + trial, true);
    CHECK(validate(m).empty());
    for (int L = 1; L <= H; ++L)
      CHECK(cr_worst_expectations(m, L, true).ratio >= cr_worst_expectations(m, L, false).ratio - 1e-9);
  }
}

TEST_CASE("lookahead values sit between the no-lookahead and full-lookahead optima") {
  gen::Rng g(95);
  for (int trial = 0; trial < 40; ++trial) {
    const TabularMDP m = gen::small_mdp(g, 2, 2, 3);
    const RewardSpec ls = RewardSpec::long_shot(gen::rewards(g, m), 0.3);
    const double v0 = optimal_value_no_lookahead(m, ls).value;
    const double vh = exact_lookahead_value(m, ls, m.horizon());
    for (int L = 1; L <= m.horizon(); ++L) {
      const double v = exact_lookahead_value(m, ls, L);
      CHECK(v >= v0 - 1e-12);
      CHECK(v <= vh + 1e-12);
    }
  }
}

TEST_CASE("heuristic worst case never undercuts the certified minimum") {
  gen::Rng g(96);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const int L = g.integer(1, m.horizon());
    const double exact = cr_worst_expectations(m, L, false).ratio;
    const CRReport h = cr_worst_expectations_heuristic(m, L, false, 4, 7 + trial);
    CHECK(h.ratio >= exact - 1e-9);
    CHECK(h.ratio <= 1.0 + 1e-9);
  }
}
