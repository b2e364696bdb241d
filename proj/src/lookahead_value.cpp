#include "lookahead/lookahead_value.hpp"

#include <algorithm>
#include <cmath>

namespace lookahead {

LookaheadSpec::LookaheadSpec(int window, int horizon) : L_(window), H_(horizon) {
  if (horizon < 1) throw DomainError("horizon must be positive");
  if (window < 0 || window > horizon) throw DomainError("lookahead must lie in [0, H]");
}

int LookaheadSpec::reveal_step(int h) const {
  if (h < 0 || h >= H_) throw DomainError("step out of range");
  return std::max(h - std::max(L_, 1) + 1, 0);
}

Array2 modified_reward(const TabularMDP& mdp, const Array3& r, int L, const ReachTable& reach) {
  check_same_shape(mdp, r, "reward");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const LookaheadSpec spec(L, H);
  Array2 out({std::size_t(H), std::size_t(S)});
  for (int h = 0; h < H; ++h) {
    const int t = spec.reveal_step(h);
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) total += r(h, s, a);
      if (total == 0.0) continue;
      for (int from = 0; from < S; ++from) out(t, from) += reach.conditional(h, s, t, from) * total;
    }
  }
  return out;
}

Array2 modified_reward(const TabularMDP& mdp, const RewardSpec& rewards, int L) {
  return modified_reward(mdp, rewards.expectation(), L, ReachTable(mdp));
}

LookaheadValue sup_lookahead_value(const TabularMDP& mdp, const Array3& r, int L,
                                   const ReachTable& reach) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  LookaheadSpec spec(L, H);
  LookaheadValue out;
  out.window = L;
  if (L == 0) {
    PlanResult plan = plan_expected_rewards(mdp, r);
    out.value = plan.value;
    out.witness = std::move(plan.policy);
    return out;
  }
  const Array2 tilde = modified_reward(mdp, r, L, reach);
  Array3 state_reward({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        if (mdp.available(h, s, a)) state_reward(h, s, a) = tilde(h, s);
  PlanResult plan = plan_expected_rewards(mdp, state_reward);
  out.value = plan.value;
  out.witness = std::move(plan.policy);
  return out;
}

LookaheadValue sup_lookahead_value(const TabularMDP& mdp, const RewardSpec& rewards, int L) {
  LookaheadValue out = sup_lookahead_value(mdp, rewards.expectation(), L, ReachTable(mdp));
  if (rewards.family() == RewardFamily::kLongShot) {
    const double sah = double(mdp.num_states()) * mdp.num_actions() * mdp.horizon();
    out.certified_factor = std::pow(1.0 - rewards.epsilon(), sah - 1.0);
  }
  return out;
}

}  // namespace lookahead
