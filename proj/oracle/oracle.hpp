#pragma once

// Brute-force references computed without the DP/LP code paths under test.
// Sizes are tiny by design; every routine throws CapExceeded past its limit.

#include <cstdint>

#include "lookahead/mdp.hpp"

namespace lookahead::oracle {

/// max over deterministic policies of the expected return, by enumeration.
double policy_enumeration_value(const TabularMDP& mdp, const Array3& r);

/// Pr(s_target = target_s at target_h) maximized over deterministic rules
/// for steps t..target_h-1, starting at `from` at step t.
double enumerated_reach(const TabularMDP& mdp, int target_h, int target_s, int t, int from);

/// d*_h(s) for all (h, s) by forward propagation over all deterministic
/// policies.
Array2 enumerated_optimal_reach(const TabularMDP& mdp);

/// Modified state reward computed from enumerated reach.
Array2 direct_modified_reward(const TabularMDP& mdp, const Array3& r, int L);

/// E[max over policies of the realized return] when every reward is known
/// before the first step, by enumerating joint reward realizations.
double full_information_value(const TabularMDP& mdp, const RewardSpec& rewards);

/// One-step lookahead value: V_h(s) = E[max_a R_h(s,a) + P V_{h+1}].
double one_step_value(const TabularMDP& mdp, const RewardSpec& rewards);

/// max over policies of sum_h sum_s d_h(s) sum_a r_h(s,a).
double state_sum_sup(const TabularMDP& mdp, const Array3& r);

/// sum over (h,s,a) of d*_h(s) r_h(s,a).
double reach_weighted_sum(const TabularMDP& mdp, const Array3& r);

/// One-step CR: min over deterministic pi* of max over occupancies of
/// min over (h,s,a) with d^{pi*}_h(s) > 0 of d_h(s,a) / d^{pi*}_h(s).
double one_step_cr(const TabularMDP& mdp);

/// Full-lookahead CR: max over occupancies of min d_h(s,a) / d*_h(s).
double full_lookahead_cr(const TabularMDP& mdp);

/// Prophet chain with A = 2 and weights d*: best min-coverage over a grid of
/// forward probabilities per chain node, terminal split uniformly.
double chain_maxmin_grid(int H, int resolution);

/// Empirical occupancy from sampled episodes (std::mt19937_64).
Array3 monte_carlo_occupancy(const TabularMDP& mdp, const MarkovPolicy& policy,
                             std::uint64_t episodes, std::uint64_t seed);

}  // namespace lookahead::oracle
