#include <doctest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "lookahead/cr_solver.hpp"
#include "lookahead/env_zoo.hpp"
#include "oracle.hpp"

using namespace lookahead;

TEST_CASE("frozen worst-case ratios") {
  const TabularMDP chain3 = chain(3, 2, ChainRewards::kProphetEqual).mdp;
  CHECK(cr_worst_expectations(chain3, 3, false).ratio == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(oracle::chain_maxmin_grid(3, 60) == doctest::Approx(0.2).epsilon(1e-12));

  const TabularMDP m = fixtures::two_state();
  CHECK(cr_worst_expectations(m, 1, false).ratio == doctest::Approx(15.0 / 47.0).epsilon(1e-12));
  CHECK(oracle::one_step_cr(m) == doctest::Approx(15.0 / 47.0).epsilon(1e-12));
  CHECK(cr_worst_expectations(m, 3, false).ratio == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(oracle::full_lookahead_cr(m) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("fixed-reward ratio of the two-state fixture") {
  const TabularMDP m = fixtures::two_state();
  const CRReport rep = cr_fixed(m, RewardSpec::long_shot(fixtures::two_state_rewards(), 0.1), 3);
  CHECK(rep.numerator == doctest::Approx(1.3));
  CHECK(rep.denominator == doctest::Approx(2.475));
  CHECK(rep.ratio == doctest::Approx(1.3 / 2.475));
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.mode == CRMode::kFixedReward);
  CHECK(to_string(rep.mode) == "fixed");

  const CRReport zero = cr_fixed(m, RewardSpec::deterministic(Array3({3, 2, 2})), 2);
  CHECK(zero.degenerate);
}

TEST_CASE("L = 0 has ratio one") {
  gen::Rng g(50);
  const TabularMDP m = gen::mdp(g, 3, 2, 3);
  CHECK(cr_worst_expectations(m, 0, false).ratio == doctest::Approx(1.0));
  CHECK(cr_fixed(m, RewardSpec::deterministic(gen::rewards(g, m)), 0).ratio == doctest::Approx(1.0));
}

TEST_CASE("property: worst case matches the specialized one-step and full-lookahead oracles") {
  gen::Rng g(51);
  for (int trial = 0; trial < 60; ++trial) {
    const TabularMDP m = gen::small_mdp(g, 3, 2, 3);
    const CRReport one = cr_worst_expectations(m, 1, false);
    const CRReport full = cr_worst_expectations(m, m.horizon(), false);
    CHECK(one.certified);
    CHECK(one.ratio == doctest::Approx(oracle::one_step_cr(m)).epsilon(1e-9));
    CHECK(full.ratio == doctest::Approx(oracle::full_lookahead_cr(m)).epsilon(1e-9));
  }
}

TEST_CASE("property: bounds, monotonicity and mode ordering") {
  gen::Rng g(52);
  for (int trial = 0; trial < 80; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const RewardSpec rs = RewardSpec::long_shot(gen::rewards(g, m, 0.0), 0.2);
    double prev = 1.0;
    for (int L = 1; L <= m.horizon(); ++L) {
      const CRReport w = cr_worst_expectations(m, L, false);
      const AnalyticBounds b = analytic_bounds(m.num_states(), m.num_actions(), m.horizon(), L);
      CHECK(w.ratio >= b.lower - 1e-9);
      CHECK(w.ratio <= prev + 1e-9);
      CHECK(w.ratio <= 1.0 + 1e-9);
      CHECK(cr_worst_expectations(m, L, true).ratio >= w.ratio - 1e-9);
      const CRReport f = cr_fixed(m, rs, L);
      CHECK(f.ratio >= w.ratio - 1e-9);
      const CRReport h = cr_worst_expectations_heuristic(m, L, false, 2, trial);
      CHECK_FALSE(h.certified);
      CHECK(h.ratio >= w.ratio - 1e-9);
      prev = w.ratio;
    }
  }
}

TEST_CASE("property: max-min LP duals certify the coverage value") {
  gen::Rng g(53);
  for (int trial = 0; trial < 60; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const ReachTable reach(m);
    const int L = g.integer(1, m.horizon());
    const Array2 base = state_distribution(m, gen::deterministic_policy(g, m));
    const Array3 alpha = alpha_weights(m, reach, L, base);
    for (bool stationary : {false, true}) {
      const MaxMinResult r = maxmin_occupancy_lp(m, alpha, stationary, reach);
      REQUIRE(std::isfinite(r.t_star));
      CHECK(occupancy_violations(m, r.occupancy, 1e-9).empty());
      CHECK(coverage_ratio(r.occupancy, alpha, stationary) == doctest::Approx(r.t_star).epsilon(1e-9));
      double weighted = 0.0;
      const int H = m.horizon(), S = m.num_states(), A = m.num_actions();
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          double asum = 0.0, dsum = 0.0;
          for (int h = 0; h < H; ++h) {
            asum += alpha(h, s, a);
            dsum += r.occupancy(h, s, a);
            if (!stationary) {
              const double y = r.coverage_duals(h, s, a);
              CHECK(y >= -1e-9);
              weighted += y * alpha(h, s, a);
              if (y > 1e-9)
                CHECK(r.occupancy(h, s, a) == doctest::Approx(alpha(h, s, a) * r.t_star).epsilon(1e-7));
            }
          }
          if (stationary) {
            const double y = r.coverage_duals(0, s, a);
            CHECK(y >= -1e-9);
            weighted += y * asum;
            if (y > 1e-9) CHECK(dsum == doctest::Approx(asum * r.t_star).epsilon(1e-7));
          }
        }
      CHECK(weighted == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("alpha weights at full lookahead are the reach probabilities") {
  gen::Rng g(54);
  const TabularMDP m = gen::mdp(g, 3, 2, 3);
  const ReachTable reach(m);
  const Array3 alpha = alpha_weights(m, reach, 3, state_distribution(m, MarkovPolicy::uniform(m)));
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) CHECK(alpha(h, s, a) == doctest::Approx(reach.optimal(h, s)));
}

TEST_CASE("enumeration cap is enforced") {
  gen::Rng g(55);
  const TabularMDP m = gen::mdp(g, 3, 3, 4);
  CHECK_THROWS_AS(cr_worst_expectations(m, 1, false, {5}), CapExceeded);
  CHECK_NOTHROW(cr_worst_expectations(m, 4, false, {5}));  // L = H has one candidate
}

TEST_CASE("analytic bounds") {
  const AnalyticBounds b = analytic_bounds(3, 2, 5, 5);
  CHECK(b.lower == doctest::Approx(1.0 / 30));
  CHECK(b.tree_upper == doctest::Approx(1.0 / 8));
  CHECK(analytic_bounds(3, 2, 5, 5, 0.5).tree_upper == doctest::Approx(1.5 / 8));
  CHECK(analytic_bounds(2, 3, 4, 2).lower == doctest::Approx(1.0 / 24));
  CHECK(analytic_bounds(2, 2, 4, 1).tree_upper == doctest::Approx(1.0 / 4));
  CHECK(analytic_bounds(5, 2, 6, 2).tree_upper == doctest::Approx(1.0 / 15));
  CHECK(analytic_bounds(3, 2, 4, 0).lower == 1.0);
  CHECK_THROWS_AS(analytic_bounds(3, 2, 4, 5), DomainError);
}

TEST_CASE("reward grid oracle approaches the worst case from above") {
  gen::Rng g(56);
  for (int trial = 0; trial < 4; ++trial) {
    const TabularMDP m = gen::mdp(g, 2, 2, 2);
    const double exact = cr_worst_expectations(m, 1, false).ratio;
    double prev = std::numeric_limits<double>::infinity();
    for (int res : {1, 2, 4}) {
      const double grid = reward_grid_oracle(m, 1, res);
      CHECK(grid >= exact - 1e-9);
      CHECK(grid <= prev + 1e-12);
      prev = grid;
    }
  }
}
