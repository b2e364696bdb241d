#pragma once

// Hand-rolled generators for property tests. They use std::mt19937_64 so the
// test inputs do not depend on the library's own RNG.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lookahead/mdp.hpp"

namespace gen {

using namespace lookahead;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p = 0.5) { return uniform() < p; }
};

// Simplex row with a chance of exact zeros so sparse supports are covered.
inline std::vector<double> row(Rng& g, int n, double zero_prob = 0.3) {
  std::vector<double> r(n);
  double total = 0.0;
  for (double& x : r) {
    x = g.coin(zero_prob) ? 0.0 : -std::log(1.0 - g.uniform());
    total += x;
  }
  if (total == 0.0) {
    r[g.integer(0, n - 1)] = 1.0;
    return r;
  }
  for (double& x : r) x /= total;
  return r;
}

inline TabularMDP mdp(Rng& g, int S, int A, int H, bool masked = false) {
  Array4 P({std::size_t(H), std::size_t(S), std::size_t(A), std::size_t(S)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto r = row(g, S);
        for (int n = 0; n < S; ++n) P(h, s, a, n) = r[n];
      }
  ActionMask mask;
  if (masked && A > 1) {
    mask = ActionMask({std::size_t(H), std::size_t(S), std::size_t(A)}, 1);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) {
        const int keep = g.integer(0, A - 1);
        for (int a = 0; a < A; ++a)
          if (a != keep && g.coin(0.4)) mask(h, s, a) = 0;
      }
  }
  return TabularMDP(S, A, H, std::move(P), row(g, S, 0.2), false, std::move(mask));
}

inline TabularMDP small_mdp(Rng& g, int max_s = 3, int max_a = 3, int max_h = 3) {
  return mdp(g, g.integer(1, max_s), g.integer(1, max_a), g.integer(1, max_h), g.coin(0.25));
}

inline Array3 rewards(Rng& g, const TabularMDP& m, double zero_prob = 0.3) {
  Array3 r({std::size_t(m.horizon()), std::size_t(m.num_states()), std::size_t(m.num_actions())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s)
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a) && !g.coin(zero_prob)) r(h, s, a) = g.uniform();
  return r;
}

inline MarkovPolicy policy(Rng& g, const TabularMDP& m) {
  Array3 pi({std::size_t(m.horizon()), std::size_t(m.num_states()), std::size_t(m.num_actions())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s) {
      double total = 0.0;
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a)) total += pi(h, s, a) = 0.05 + g.uniform();
      for (int a = 0; a < m.num_actions(); ++a) pi(h, s, a) /= total;
    }
  return MarkovPolicy(std::move(pi));
}

inline MarkovPolicy deterministic_policy(Rng& g, const TabularMDP& m) {
  IntArray2 act({std::size_t(m.horizon()), std::size_t(m.num_states())});
  for (int h = 0; h < m.horizon(); ++h)
    for (int s = 0; s < m.num_states(); ++s) {
      std::vector<int> av;
      for (int a = 0; a < m.num_actions(); ++a)
        if (m.available(h, s, a)) av.push_back(a);
      act(h, s) = av[g.integer(0, int(av.size()) - 1)];
    }
  return MarkovPolicy::from_actions(act, m.num_actions());
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a[k] - b[k]));
  return d;
}

}  // namespace gen
