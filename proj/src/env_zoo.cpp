#include "lookahead/env_zoo.hpp"

#include <algorithm>
#include <cmath>

#include "lookahead/random.hpp"

namespace lookahead {
namespace {

constexpr double kE = 2.718281828459045;

Array4 zero_kernel(int S, int A, int H) {
  return Array4({std::size_t(H), std::size_t(S), std::size_t(A), std::size_t(S)});
}

// Kernel stationary in h built from next[s][a] (deterministic moves).
Array4 deterministic_kernel(int S, int A, int H, const std::vector<std::vector<int>>& next) {
  Array4 P = zero_kernel(S, A, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) P(h, s, a, next[s][a]) = 1.0;
  return P;
}

std::vector<double> point_mass(int S, int s) {
  std::vector<double> mu(S, 0.0);
  mu[s] = 1.0;
  return mu;
}

void dirichlet_row(CounterRng& rng, std::span<double> row) {
  double total = 0.0;
  for (double& x : row) {
    x = rng.exponential();
    total += x;
  }
  for (double& x : row) x /= total;
}

double get(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw DomainError("missing parameter '" + key + "'");
  return it->second;
}

double get_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

int as_int(double x, const std::string& key) {
  if (x != std::floor(x)) throw DomainError("parameter '" + key + "' must be an integer");
  return static_cast<int>(x);
}

struct Tree {
  std::vector<std::vector<int>> children;
  std::vector<int> level;
};

// Complete tree: root has `root_children`, other inner nodes `inner_children`,
// `depth` levels below the root. Nodes are numbered breadth-first.
Tree complete_tree(int root_children, int inner_children, int depth) {
  Tree t;
  t.children.push_back({});
  t.level.push_back(0);
  std::size_t begin = 0, end = 1;
  for (int lev = 0; lev < depth; ++lev) {
    for (std::size_t v = begin; v < end; ++v) {
      const int c = lev == 0 ? root_children : inner_children;
      for (int k = 0; k < c; ++k) {
        t.children[v].push_back(static_cast<int>(t.children.size()));
        t.children.push_back({});
        t.level.push_back(lev + 1);
      }
    }
    begin = end;
    end = t.children.size();
  }
  return t;
}

Environment tree_environment(const Tree& tree, int A, int H, double eps, EnvKind kind,
                             std::map<std::string, double> params) {
  const int nodes = static_cast<int>(tree.children.size());
  const int S = nodes + 1, terminal = nodes;
  std::vector<std::vector<int>> next(S, std::vector<int>(A, terminal));
  Array3 r({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int v = 0; v < nodes; ++v) {
    const auto& ch = tree.children[v];
    if (v == 0) {
      next[0][0] = 0;
      for (int a = 1; a < A; ++a) next[0][a] = ch.empty() ? terminal : ch[std::min<std::size_t>(a - 1, ch.size() - 1)];
      if (ch.empty())
        for (int h = 0; h < H; ++h)
          for (int a = 1; a < A; ++a) r(h, 0, a) = eps;
      continue;
    }
    if (ch.empty()) {
      for (int h = 0; h < H; ++h)
        for (int a = 0; a < A; ++a) r(h, v, a) = eps;
    } else {
      for (int a = 0; a < A; ++a) next[v][a] = ch[std::min<std::size_t>(a, ch.size() - 1)];
    }
  }
  Environment env;
  env.mdp = TabularMDP(S, A, H, deterministic_kernel(S, A, H, next), point_mass(S, 0), true);
  env.rewards = RewardSpec::long_shot(std::move(r), eps, true);
  env.descriptor.kind = kind;
  env.descriptor.params = std::move(params);
  env.descriptor.S = S;
  env.descriptor.A = A;
  env.descriptor.H = H;
  return env;
}

void check_tree_args(int A, int H, double eps) {
  if (A < 2) throw DomainError("delayed tree needs A >= 2");
  if (H < 1) throw DomainError("horizon must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

}  // namespace

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kDelayedTree: return "delayed-tree";
    case EnvKind::kChain: return "chain";
    case EnvKind::kGrid: return "grid";
    case EnvKind::kDisguisedBandit: return "bandit";
    case EnvKind::kErgodic: return "ergodic";
    case EnvKind::kTransitionLookaheadTree: return "transition-tree";
    case EnvKind::kRandom: return "random";
  }
  return "unknown";
}

EnvKind env_kind_from_string(const std::string& name) {
  for (EnvKind k : {EnvKind::kDelayedTree, EnvKind::kChain, EnvKind::kGrid,
                    EnvKind::kDisguisedBandit, EnvKind::kErgodic,
                    EnvKind::kTransitionLookaheadTree, EnvKind::kRandom})
    if (to_string(k) == name) return k;
  throw DomainError("unknown environment kind '" + name + "'");
}

Environment delayed_tree(int A, int n, int H, double eps) {
  check_tree_args(A, H, eps);
  if (n < 0 || n >= H) throw DomainError("tree depth must satisfy 0 <= n < H");
  if (std::pow(double(A), n) > 1e7) throw CapExceeded("delayed tree too large");
  const Tree tree = complete_tree(A - 1, A, n);
  Environment env = tree_environment(tree, A, H, eps, EnvKind::kDelayedTree,
                                     {{"A", A}, {"n", n}, {"H", H}, {"eps", eps}});
  const double K = double(H - n) * (A - 1) * std::pow(double(A), n);
  env.descriptor.expected_bounds = {
      {"full_lookahead_value_lower", 1.0 - std::pow(1.0 - eps, K)},
      {"cr_fixed_upper", 1.0 / (K - K * K * eps)},
      {"cr_limit_upper", 1.0 / K},
  };
  return env;
}

Environment delayed_tree_with_states(int A, int S, int H, double eps) {
  check_tree_args(A, H, eps);
  if (S < A + 1) throw DomainError("need S >= A + 1 states");
  int n = 0;
  long nodes = 1;
  while (nodes * A <= S - 1) {
    nodes *= A;
    ++n;
  }
  if (nodes == S - 1) return delayed_tree(A, n, H, eps);
  if (n + 1 >= H) throw DomainError("tree deeper than the horizon");
  Tree tree = complete_tree(A - 1, A, n);
  long extra = S - 1 - nodes;
  std::vector<int> leaves;
  for (int v = 0; v < static_cast<int>(tree.children.size()); ++v)
    if (tree.children[v].empty() && v != 0) leaves.push_back(v);
  for (int leaf : leaves) {
    if (extra == 0) break;
    const int c = static_cast<int>(std::min<long>(extra, A));
    for (int k = 0; k < c; ++k) {
      tree.children[leaf].push_back(static_cast<int>(tree.children.size()));
      tree.children.push_back({});
      tree.level.push_back(n + 1);
    }
    extra -= c;
  }
  Environment env = tree_environment(tree, A, H, eps, EnvKind::kDelayedTree,
                                     {{"A", A}, {"S", S}, {"H", H}, {"eps", eps}});
  const int leaf_count = static_cast<int>(delayed_tree_leaves(env).size());
  env.descriptor.params["leaves"] = leaf_count;
  env.descriptor.expected_bounds = {
      {"leaves_lower", double(S) * (1.0 - 1.0 / A) - 2.0},
  };
  return env;
}

std::vector<int> delayed_tree_leaves(const Environment& env) {
  const TabularMDP& m = env.mdp;
  const int terminal = m.num_states() - 1;
  std::vector<int> out;
  for (int s = 0; s < terminal; ++s) {
    bool all_terminal = true;
    for (int a = (s == 0 ? 1 : 0); a < m.num_actions(); ++a)
      if (m.transition(0, s, a, terminal) != 1.0) all_terminal = false;
    if (all_terminal) out.push_back(s);
  }
  return out;
}

Environment chain(int H, int A, ChainRewards mode, double level, double eps, const Array3* custom) {
  if (H < 1 || A < 2) throw DomainError("chain needs H >= 1 and A >= 2");
  const int S = H + 1, terminal = H;
  std::vector<std::vector<int>> next(S, std::vector<int>(A, terminal));
  for (int k = 0; k + 1 < H; ++k) next[k][0] = k + 1;
  Array3 r({std::size_t(H), std::size_t(S), std::size_t(A)});
  if (mode == ChainRewards::kProphetEqual) {
    if (level < 0.0) throw DomainError("reward level must be nonnegative");
    for (int h = 0; h < H; ++h)
      for (int k = 0; k < H; ++k)
        for (int a = 1; a < A; ++a) r(h, k, a) = level;
  } else {
    if (!custom || custom->shape() != r.shape())
      throw DimensionError("custom chain rewards must have shape (H, H + 1, A)");
    r = *custom;
  }
  Environment env;
  env.mdp = TabularMDP(S, A, H, deterministic_kernel(S, A, H, next), point_mass(S, 0), true);
  env.rewards = RewardSpec::long_shot(std::move(r), eps, mode == ChainRewards::kProphetEqual);
  env.descriptor.kind = EnvKind::kChain;
  env.descriptor.params = {{"H", H}, {"A", A}, {"level", level}, {"eps", eps}};
  env.descriptor.S = S;
  env.descriptor.A = A;
  env.descriptor.H = H;
  env.descriptor.expected_bounds = {
      {"cr_prophet", 1.0 / ((A - 1.0) * H)},
      {"cr_worst_full_lower", (1.0 - 1.0 / kE) / (double(A) * H)},
  };
  return env;
}

MarkovPolicy chain_witness_policy(const TabularMDP& m) {
  const int H = m.horizon(), S = m.num_states(), A = m.num_actions();
  Array3 pi({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (s == S - 1) {
        for (int a = 0; a < A; ++a) pi(h, s, a) = 1.0 / A;
        continue;
      }
      pi(h, s, 0) = 1.0 - 1.0 / H;
      for (int a = 1; a < A; ++a) pi(h, s, a) = 1.0 / ((A - 1.0) * H);
    }
  return MarkovPolicy(std::move(pi));
}

int grid_state(int n, int row, int col) { return (row - 1) * n + (col - 1); }

Environment grid(int n) {
  if (n < 2) throw DomainError("grid needs n >= 2");
  const int S = n * n, A = 2, H = 2 * n - 1;
  std::vector<std::vector<int>> next(S, std::vector<int>(A, 0));
  ActionMask mask({std::size_t(H), std::size_t(S), std::size_t(A)}, 0);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const int s = grid_state(n, i, j);
      const int right = j < n ? grid_state(n, i, j + 1) : (i < n ? grid_state(n, i + 1, j) : s);
      const int up = i < n ? grid_state(n, i + 1, j) : (j < n ? grid_state(n, i, j + 1) : s);
      next[s] = {right, up};
      const bool corner = i == n && j == n;
      for (int h = 0; h < H; ++h) {
        mask(h, s, 0) = (j < n || corner) ? 1 : 0;
        mask(h, s, 1) = (i < n || corner) ? 1 : 0;
      }
    }
  Array3 r({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (std::size_t k = 0; k < r.size(); ++k) r.flat()[k] = mask.flat()[k];
  Environment env;
  env.mdp = TabularMDP(S, A, H, deterministic_kernel(S, A, H, next), point_mass(S, 0), true, mask);
  env.rewards = RewardSpec::deterministic(std::move(r), true);
  env.descriptor.kind = EnvKind::kGrid;
  env.descriptor.params = {{"n", n}};
  env.descriptor.S = S;
  env.descriptor.A = A;
  env.descriptor.H = H;
  env.descriptor.expected_bounds = {
      {"min_edge_flow", 1.0 / (2.0 * (n - 1))},
      {"interior_occupancy", 1.0 / (n - 1.0)},
      {"cr_worst_full_lower", 1.0 / (H - 1.0)},
  };
  return env;
}

MarkovPolicy grid_flow_policy(int n) {
  if (n < 2) throw DomainError("grid needs n >= 2");
  const int S = n * n, H = 2 * n - 1;
  Array3 pi({std::size_t(H), std::size_t(S), 2});
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      double right;
      if (i == n && j == n) right = 0.5;
      else if (i == n) right = 1.0;
      else if (j == n) right = 0.0;
      else if (i == 1 && j == 1) right = 0.5;
      else if (i == 1) right = double(n - j) / (n - j + 1);
      else if (j == 1) right = 1.0 / (n - i + 1);
      else right = 0.5;
      for (int h = 0; h < H; ++h) {
        pi(h, grid_state(n, i, j), 0) = right;
        pi(h, grid_state(n, i, j), 1) = 1.0 - right;
      }
    }
  return MarkovPolicy(std::move(pi));
}

TabularMDP disguised_bandit(int S, int A, int H, std::uint64_t seed) {
  if (S < 1 || A < 1 || H < 1) throw DomainError("S, A, H must be positive");
  CounterRng rng(seed, 0);
  std::vector<double> mu(S);
  dirichlet_row(rng, mu);
  Array4 P = zero_kernel(S, A, H);
  std::vector<double> row(S);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      dirichlet_row(rng, row);
      for (int a = 0; a < A; ++a)
        for (int n = 0; n < S; ++n) P(h, s, a, n) = row[n];
    }
  return TabularMDP(S, A, H, std::move(P), std::move(mu), false);
}

TabularMDP random_mdp(int S, int A, int H, std::uint64_t seed, bool stationary) {
  if (S < 1 || A < 1 || H < 1) throw DomainError("S, A, H must be positive");
  CounterRng rng(seed, 1);
  std::vector<double> mu(S);
  dirichlet_row(rng, mu);
  Array4 P = zero_kernel(S, A, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        if (stationary && h > 0) {
          for (int n = 0; n < S; ++n) P(h, s, a, n) = P(0, s, a, n);
        } else {
          dirichlet_row(rng, P.slice(h, s, a));
        }
      }
  return TabularMDP(S, A, H, std::move(P), std::move(mu), stationary);
}

bool in_ergodic_family(std::span<const double> q, double alpha, double beta, double tol) {
  const int S = static_cast<int>(q.size());
  if (S == 0) return false;
  double sum = 0.0;
  for (double x : q) sum += x;
  if (std::abs(sum - 1.0) > tol) return false;
  if (S == 1) return true;
  const double hi = std::pow(double(S), alpha - 1.0);
  const double lo = (1.0 - std::pow(double(S), beta - 1.0)) / (S - 1.0);
  for (double x : q)
    if (x > hi + tol || x < lo - tol) return false;
  return true;
}

TabularMDP ergodic_kernel_box(int S, int A, int H, double lower, double upper,
                              std::uint64_t seed) {
  if (S < 1 || A < 1 || H < 1) throw DomainError("S, A, H must be positive");
  const double u = 1.0 / S;
  if (lower > u + 1e-15 || upper < u - 1e-15 || lower > upper)
    throw DomainError("box does not contain the uniform row");
  CounterRng rng(seed, 2);
  std::vector<double> mu(S);
  dirichlet_row(rng, mu);
  Array4 P = zero_kernel(S, A, H);
  std::vector<double> row(S);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        bool ok = false;
        for (int tries = 0; tries < 10000 && !ok; ++tries) {
          dirichlet_row(rng, row);
          ok = std::all_of(row.begin(), row.end(),
                           [&](double x) { return x >= lower && x <= upper; });
        }
        if (!ok) {
          // Move toward the uniform row just far enough to enter the box.
          double lambda = 0.0;
          for (double x : row) {
            if (x > upper) lambda = std::max(lambda, (x - upper) / (x - u));
            if (x < lower) lambda = std::max(lambda, (lower - x) / (u - x));
          }
          lambda = std::min(1.0, lambda * (1.0 + 1e-12) + 1e-15);
          for (double& x : row) x = (1.0 - lambda) * x + lambda * u;
        }
        for (int n = 0; n < S; ++n) P(h, s, a, n) = row[n];
      }
  return TabularMDP(S, A, H, std::move(P), std::move(mu), false);
}

TabularMDP ergodic_kernel(int S, int A, int H, double alpha, double beta, std::uint64_t seed) {
  if (!(0.0 < beta && beta < alpha && alpha <= 1.0)) throw DomainError("need 0 < beta < alpha <= 1");
  if (S == 1) return ergodic_kernel_box(S, A, H, 1.0, 1.0, seed);
  const double hi = std::pow(double(S), alpha - 1.0);
  const double lo = (1.0 - std::pow(double(S), beta - 1.0)) / (S - 1.0);
  return ergodic_kernel_box(S, A, H, lo, hi, seed);
}

TransitionTree transition_lookahead_tree(int A, int H) {
  if (A < 2 || H < 5) throw DomainError("transition tree needs A >= 2 and H >= 5");
  const int depth = static_cast<int>(std::floor((1.0 - 1.0 / kE) * H)) - 1;
  if (depth < 1) throw DomainError("horizon too short for the transition tree");
  if (std::pow(double(A - 1), depth) > 1e7) throw CapExceeded("transition tree too large");
  const Tree tree = complete_tree(A - 1, A - 1, depth - 1);
  const int nodes = static_cast<int>(tree.children.size());
  const int S = nodes + 1, terminal = nodes;

  TransitionTree out;
  out.depth = depth;
  out.terminal = terminal;
  out.children = tree.children;
  out.children.push_back({});
  out.parent.assign(S, -1);
  for (int v = 0; v < nodes; ++v)
    for (int c : tree.children[v]) out.parent[c] = v;
  out.rewarding_leaf = -1;
  for (int v = 0; v < nodes; ++v)
    if (tree.level[v] == depth - 1) {
      if (out.rewarding_leaf < 0) out.rewarding_leaf = v;
      ++out.leaves;
    }

  Array4 P = zero_kernel(S, A, H);
  for (int h = 0; h < H; ++h) {
    for (int a = 0; a < A; ++a) P(h, terminal, a, terminal) = 1.0;
    for (int v = 0; v < nodes; ++v) {
      const auto& ch = tree.children[v];
      if (ch.empty()) {
        for (int a = 0; a < A; ++a) P(h, v, a, terminal) = 1.0;
        continue;
      }
      P(h, v, 0, v) = 1.0;
      for (int a = 1; a < A; ++a)
        for (int c : ch) P(h, v, a, c) += 1.0 / ch.size();
    }
  }
  Array3 r({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int a = 0; a < A; ++a) r(h, out.rewarding_leaf, a) = 1.0;
  out.env.mdp = TabularMDP(S, A, H, std::move(P), point_mass(S, 0), true);
  out.env.rewards = RewardSpec::deterministic(std::move(r), true);
  auto& d = out.env.descriptor;
  d.kind = EnvKind::kTransitionLookaheadTree;
  d.params = {{"A", A}, {"H", H}, {"depth", depth}, {"leaves", out.leaves}};
  // A single leaf makes the ratio bound vacuous.
  if (out.leaves == 1) d.params["vacuous_ratio_bound"] = 1;
  d.S = S;
  d.A = A;
  d.H = H;
  d.expected_bounds = {
      {"no_lookahead_upper", 1.0 / out.leaves},
      {"one_step_transition_lookahead_lower", 1.0 - 1.0 / (kE * kE)},
      {"ratio_upper", 2.0 / std::pow(double(A - 1), (1.0 - 1.0 / kE) * H - 3.0)},
  };
  return out;
}

Environment make_environment(const std::string& kind, const std::map<std::string, double>& p) {
  const EnvKind k = env_kind_from_string(kind);
  switch (k) {
    case EnvKind::kDelayedTree: {
      const int A = as_int(get(p, "A"), "A"), H = as_int(get(p, "H"), "H");
      const double eps = get_or(p, "eps", 0.05);
      if (p.count("S")) return delayed_tree_with_states(A, as_int(get(p, "S"), "S"), H, eps);
      return delayed_tree(A, as_int(get(p, "n"), "n"), H, eps);
    }
    case EnvKind::kChain:
      return chain(as_int(get(p, "H"), "H"), as_int(get(p, "A"), "A"), ChainRewards::kProphetEqual,
                   get_or(p, "level", 1.0), get_or(p, "eps", 0.1));
    case EnvKind::kGrid: return grid(as_int(get(p, "n"), "n"));
    case EnvKind::kDisguisedBandit:
    case EnvKind::kErgodic:
    case EnvKind::kRandom: {
      const int S = as_int(get(p, "S"), "S"), A = as_int(get(p, "A"), "A"),
                H = as_int(get(p, "H"), "H");
      const auto seed = static_cast<std::uint64_t>(get_or(p, "seed", 0));
      Environment env;
      if (k == EnvKind::kDisguisedBandit) {
        env.mdp = disguised_bandit(S, A, H, seed);
        env.descriptor.expected_bounds = {{"cr_worst", 1.0 / A}};
      } else if (k == EnvKind::kErgodic) {
        const double alpha = get(p, "alpha"), beta = get(p, "beta");
        env.mdp = ergodic_kernel(S, A, H, alpha, beta, seed);
        env.descriptor.expected_bounds = {
            {"cr_one_step_lower", (1.0 - std::pow(double(S), beta - 1.0)) /
                                      (A * std::pow(double(S), alpha))}};
      } else {
        env.mdp = random_mdp(S, A, H, seed, get_or(p, "stationary", 0) != 0);
      }
      env.descriptor.kind = k;
      env.descriptor.params = p;
      env.descriptor.S = S;
      env.descriptor.A = A;
      env.descriptor.H = H;
      return env;
    }
    case EnvKind::kTransitionLookaheadTree:
      return transition_lookahead_tree(as_int(get(p, "A"), "A"), as_int(get(p, "H"), "H")).env;
  }
  throw DomainError("unknown environment kind");
}

}  // namespace lookahead
