#include <doctest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "lookahead/reach.hpp"
#include "oracle.hpp"

using namespace lookahead;

TEST_CASE("frozen reach table of the two-state fixture") {
  const ReachTable reach(fixtures::two_state());
  const double want[3][2] = {{1.0, 0.0}, {1.0, 0.5}, {1.0, 0.75}};
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 2; ++s) CHECK(reach.optimal(h, s) == doctest::Approx(want[h][s]).epsilon(1e-15));
  CHECK(reach.conditional(2, 1, 1, 0) == doctest::Approx(0.5));
  CHECK(reach.conditional(2, 1, 1, 1) == doctest::Approx(1.0));
  CHECK(reach.conditional(1, 1, 2, 0) == 0.0);  // target before the conditioning step
  CHECK(reach.navigation_action(2, 1, 1, 0) == 1);
  CHECK(reach.navigation_action(2, 1, 1, 1) == 0);
}

TEST_CASE("property: d* matches enumeration over deterministic policies") {
  gen::Rng g(21);
  for (int trial = 0; trial < 120; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const ReachTable reach(m);
    const Array2 d = oracle::enumerated_optimal_reach(m);
    CHECK(gen::max_abs_diff(reach.optimal().flat(), d.flat()) < 1e-12);
  }
}

TEST_CASE("property: conditional reach matches enumeration and its actions attain it") {
  gen::Rng g(22);
  for (int trial = 0; trial < 40; ++trial) {
    const TabularMDP m = gen::small_mdp(g, 3, 2, 3);
    const ReachTable reach(m);
    const int H = m.horizon(), S = m.num_states();
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int t = 0; t <= h; ++t)
          for (int from = 0; from < S; ++from) {
            const double u = reach.conditional(h, s, t, from);
            CHECK(u == doctest::Approx(oracle::enumerated_reach(m, h, s, t, from)).epsilon(1e-12));
            CHECK(u >= 0.0);
            CHECK(u <= 1.0 + 1e-12);
          }
  }
}

TEST_CASE("property: witness policy attains d* and dominates random policies") {
  gen::Rng g(23);
  for (int trial = 0; trial < 80; ++trial) {
    const TabularMDP m = gen::small_mdp(g);
    const ReachTable reach(m);
    const int h = g.integer(0, m.horizon() - 1), s = g.integer(0, m.num_states() - 1);
    const MarkovPolicy w = reach.witness(m, h, s);
    CHECK(validate(m, w).empty());
    CHECK(state_distribution(m, w)(h, s) == doctest::Approx(reach.optimal(h, s)).epsilon(1e-12));
    const Array2 d = state_distribution(m, gen::policy(g, m));
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(d.flat()[k] <= reach.optimal().flat()[k] + 1e-12);
  }
}

TEST_CASE("conditional_reach for one target agrees with the full table") {
  gen::Rng g(24);
  const TabularMDP m = gen::mdp(g, 3, 3, 4);
  const ReachTable reach(m);
  const ConditionalReach c = conditional_reach(m, 3, 2);
  for (int t = 0; t < 4; ++t)
    for (int s = 0; s < 3; ++s) {
      CHECK(c.prob(t, s) == doctest::Approx(reach.conditional(3, 2, t, s)).epsilon(1e-14));
      if (t < 3) CHECK(c.action(t, s) == reach.navigation_action(3, 2, t, s));
    }
  CHECK(c.prob(3, 2) == 1.0);
  CHECK(c.prob(3, 1) == 0.0);
}
