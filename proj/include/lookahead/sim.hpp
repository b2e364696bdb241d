#pragma once

#include <cstdint>
#include <vector>

#include "lookahead/env_zoo.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/reach.hpp"

namespace lookahead {

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::uint64_t episode = 0;
  std::vector<int> states;    // s_0 .. s_{H-1}
  std::vector<int> actions;
  std::vector<double> rewards;
  double total = 0.0;
};

/// Monte-Carlo mean with standard error std / sqrt(n) and a normal
/// confidence interval at `confidence`.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t episodes = 0;
  double confidence = 0.99;
  double ci_low() const;
  double ci_high() const;
};

MCEstimate summarize(const std::vector<double>& samples, double confidence = 0.99);

/// One episode under a Markov policy. Draw order per step: action, reward,
/// next state; the initial state is drawn first.
EpisodeTrace sample_episode(const TabularMDP& mdp, const RewardSpec& rewards,
                            const MarkovPolicy& policy, std::uint64_t seed,
                            std::uint64_t episode = 0);

MCEstimate simulate_policy(const TabularMDP& mdp, const RewardSpec& rewards,
                           const MarkovPolicy& policy, std::uint64_t episodes,
                           std::uint64_t seed);

/**
 * Greedy L-lookahead agent. While no visible reward exceeds its expectation
 * it follows `base`; otherwise it targets the earliest such reward (then
 * lowest state, then lowest action) that is still reachable and follows the
 * reach-maximizing actions toward it. All rewards of an episode are drawn
 * up front in (h, s, a) order.
 */
MCEstimate simulate_greedy_lookahead(const TabularMDP& mdp, const RewardSpec& rewards, int L,
                                     const MarkovPolicy& base, std::uint64_t episodes,
                                     std::uint64_t seed, std::vector<EpisodeTrace>* traces = nullptr,
                                     std::size_t max_traces = 0);

/// Optimal L-lookahead value by dynamic programming over (h, s, window of
/// realized rewards). Throws CapExceeded if the window space is too large.
double exact_lookahead_value(const TabularMDP& mdp, const RewardSpec& rewards, int L,
                             double size_cap = 1e7);

/// Size of the augmented state space used by exact_lookahead_value.
double exact_lookahead_state_count(const TabularMDP& mdp, const RewardSpec& rewards, int L);

struct TransitionLookaheadEstimate {
  MCEstimate no_lookahead;
  MCEstimate one_step;
  double ratio = 0.0;
  double ratio_std_error = 0.0;
  int leaves = 0;
};

/// On the transition-lookahead tree: a no-lookahead agent descending at
/// random and a one-step transition-lookahead agent that descends only when
/// a sampled next state lies on the path to the rewarding leaf.
TransitionLookaheadEstimate simulate_transition_lookahead(int A, int H, std::uint64_t episodes,
                                                          std::uint64_t seed);

}  // namespace lookahead
