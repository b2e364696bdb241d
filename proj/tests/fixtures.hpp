#pragma once

#include "lookahead/mdp.hpp"

namespace fixtures {

using namespace lookahead;

// Two states, two actions, H = 3, stationary kernel, start in state 0.
// State 0: a0 stays, a1 moves to state 1 with probability 1/2.
// State 1: a0 stays, a1 returns to state 0 with probability 0.7.
inline TabularMDP two_state() {
  const int S = 2, A = 2, H = 3;
  Array4 P({H, S, A, S});
  for (int h = 0; h < H; ++h) {
    P(h, 0, 0, 0) = 1.0;
    P(h, 0, 1, 0) = 0.5;
    P(h, 0, 1, 1) = 0.5;
    P(h, 1, 0, 1) = 1.0;
    P(h, 1, 1, 0) = 0.7;
    P(h, 1, 1, 1) = 0.3;
  }
  return TabularMDP(S, A, H, std::move(P), {1.0, 0.0}, true);
}

inline Array3 two_state_rewards() {
  Array3 r({3, 2, 2});
  for (int h = 0; h < 3; ++h) {
    r(h, 0, 0) = 0.2;
    r(h, 1, 0) = 1.0;
    r(h, 1, 1) = 0.5;
  }
  return r;
}

}  // namespace fixtures
