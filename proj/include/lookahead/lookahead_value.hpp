#pragma once

#include <optional>

#include "lookahead/mdp.hpp"
#include "lookahead/reach.hpp"

namespace lookahead {

/**
 * Reward lookahead of L steps: at step h the agent sees the realized rewards
 * of steps h .. h+L-1. Step indices are zero-based, so the reveal step of a
 * reward at step h is max(h - L + 1, 0). L = 0 behaves like L = 1 for reveal
 * timing but is evaluated without lookahead.
 */
class LookaheadSpec {
 public:
  LookaheadSpec(int window, int horizon);
  int window() const { return L_; }
  int horizon() const { return H_; }
  int reveal_step(int h) const;

 private:
  int L_;
  int H_;
};

/// State rewards r~_t(s') summing every reward revealed at step t, weighted by
/// its conditional reach from s'. Shape (H, S).
Array2 modified_reward(const TabularMDP& mdp, const Array3& r, int L, const ReachTable& reach);
Array2 modified_reward(const TabularMDP& mdp, const RewardSpec& rewards, int L);

struct LookaheadValue {
  double value = 0.0;
  MarkovPolicy witness;
  int window = 0;
  /// For long-shot rewards, (1 - eps)^(SAH - 1); the supremum times this
  /// factor lower-bounds the value at that eps.
  std::optional<double> certified_factor;
};

/// Supremum over long-shot reward distributions with the given expectations
/// of the optimal L-lookahead value. L = 0 returns the no-lookahead optimum.
LookaheadValue sup_lookahead_value(const TabularMDP& mdp, const Array3& r, int L,
                                   const ReachTable& reach);
LookaheadValue sup_lookahead_value(const TabularMDP& mdp, const RewardSpec& rewards, int L);

}  // namespace lookahead
