#pragma once

#include "lookahead/mdp.hpp"

namespace lookahead {

/**
 * Maximal probability of being in state `target_state` at step `target_step`,
 * as a function of the state at every earlier step t <= target_step.
 *
 * prob(t, s') is defined for t <= target_step and is zero afterwards.
 * action(t, s') is a maximizing action for t < target_step (lowest index on
 * ties); following it from (t, s') attains prob(t, s').
 */
struct ConditionalReach {
  int target_step = 0;
  int target_state = 0;
  Array2 prob;      // (H, S)
  IntArray2 action; // (H, S)
};

ConditionalReach conditional_reach(const TabularMDP& mdp, int target_step, int target_state);

/// Reach tables for every target: u(h, s, t, s') and d*(h, s).
class ReachTable {
 public:
  ReachTable() = default;
  explicit ReachTable(const TabularMDP& mdp);

  /// d*_h(s) = max over policies of Pr(s_h = s).
  double optimal(int h, int s) const { return d_star_(h, s); }
  const Array2& optimal() const { return d_star_; }
  /// d*_h(s | s_t = s'), zero when t > h.
  double conditional(int h, int s, int t, int from) const { return u_(h, s, t, from); }
  /// Maximizing action at (t, from) for reaching (h, s); t < h.
  int navigation_action(int h, int s, int t, int from) const { return nav_(h, s, t, from); }

  int horizon() const { return static_cast<int>(d_star_.extent(0)); }
  int num_states() const { return static_cast<int>(d_star_.extent(1)); }

  /// Deterministic policy attaining d*_h(s) from the initial distribution:
  /// the navigation actions toward (h, s) before step h, lowest action after.
  MarkovPolicy witness(const TabularMDP& mdp, int h, int s) const;

 private:
  Array2 d_star_;
  Array4 u_;
  DenseArray<int, 4> nav_;
};

inline ReachTable optimal_reach(const TabularMDP& mdp) { return ReachTable(mdp); }

}  // namespace lookahead
