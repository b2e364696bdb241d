#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lookahead/cr_solver.hpp"
#include "lookahead/mdp.hpp"

namespace lookahead {

enum class EnvKind {
  kDelayedTree,
  kChain,
  kGrid,
  kDisguisedBandit,
  kErgodic,
  kTransitionLookaheadTree,
  kRandom,
};

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct EnvDescriptor {
  EnvKind kind = EnvKind::kRandom;
  std::map<std::string, double> params;
  int S = 0, A = 0, H = 0;
  std::vector<NamedBound> expected_bounds;
};

struct Environment {
  TabularMDP mdp;
  std::optional<RewardSpec> rewards;
  EnvDescriptor descriptor;
};

/**
 * Delayed tree with A actions and depth n at horizon H. The root has A - 1
 * children (action 0 stays), inner nodes have A children, and every action at
 * a leaf pays LongShot(eps) with expectation eps and moves to the terminal
 * state. States are numbered breadth-first: root 0, terminal S - 1, S = A^n + 1.
 * For n = 0 the root itself is the rewarding node and S = 2.
 */
Environment delayed_tree(int A, int n, int H, double eps);

/// Delayed tree with an arbitrary number of states S >= A + 1: the largest
/// complete tree fitting in S states with the remainder spent on expanding
/// leaves one level deeper.
Environment delayed_tree_with_states(int A, int S, int H, double eps);

std::vector<int> delayed_tree_leaves(const Environment& env);

enum class ChainRewards { kProphetEqual, kCustom };

/**
 * Chain of H nodes plus an absorbing terminal (S = H + 1). Action 0 advances,
 * every other action moves to the terminal. With kProphetEqual every
 * non-advancing action at a chain node has expectation `level`, paid as
 * LongShot(eps).
 */
Environment chain(int H, int A, ChainRewards mode, double level = 1.0, double eps = 0.1,
                  const Array3* custom = nullptr);

/// Randomized chain policy whose occupancy at each chain node's exits is at
/// least (1 - 1/e) / (A H).
MarkovPolicy chain_witness_policy(const TabularMDP& chain_mdp);

/**
 * n x n grid from the bottom-left to the top-right corner, H = 2n - 1.
 * State (row i, column j), both in 1..n, has index (i - 1) * n + (j - 1).
 * Action 0 moves right, action 1 moves up. On the top row only Right exists
 * and on the rightmost column only Up exists; the corner (n, n) keeps both.
 * Rewards are 1 on every available action.
 */
Environment grid(int n);
int grid_state(int n, int row, int col);
MarkovPolicy grid_flow_policy(int n);

/// Action-independent random kernel and initial distribution.
TabularMDP disguised_bandit(int S, int A, int H, std::uint64_t seed);

/// Uniformly random kernel and initial distribution, nonstationary.
TabularMDP random_mdp(int S, int A, int H, std::uint64_t seed, bool stationary = false);

/// Membership of a row in the box family with max q <= S^(alpha-1) and
/// min q >= (1 - S^(beta-1)) / (S - 1).
bool in_ergodic_family(std::span<const double> q, double alpha, double beta, double tol = 1e-12);

/// Random kernel with every row inside [lower, upper]; rows are drawn from
/// the uniform simplex, rejected up to 10^4 times, then pulled toward the
/// uniform row until they fit.
TabularMDP ergodic_kernel_box(int S, int A, int H, double lower, double upper,
                              std::uint64_t seed);
TabularMDP ergodic_kernel(int S, int A, int H, double alpha, double beta, std::uint64_t seed);

struct TransitionTree {
  Environment env;
  int depth = 0;          // levels of decision nodes, root at level 0
  int leaves = 0;         // (A - 1)^(depth - 1)
  int rewarding_leaf = 0;
  int terminal = 0;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
};

/**
 * Tree where each node has A - 1 children and depth floor((1-1/e) H) - 1.
 * Action 0 stays; the other actions move to a uniformly random child. One
 * leaf pays a deterministic unit reward on every action and all leaves move
 * to the terminal state.
 */
TransitionTree transition_lookahead_tree(int A, int H);

/// Generic builder used by the CLI: kind name plus numeric parameters.
Environment make_environment(const std::string& kind, const std::map<std::string, double>& params);

}  // namespace lookahead
