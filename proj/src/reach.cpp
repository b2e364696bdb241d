#include "lookahead/reach.hpp"

#include <limits>

#include "lookahead/parallel.hpp"

namespace lookahead {

ConditionalReach conditional_reach(const TabularMDP& mdp, int target_step, int target_state) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (target_step < 0 || target_step >= H || target_state < 0 || target_state >= S)
    throw DomainError("reach target out of range");
  ConditionalReach out;
  out.target_step = target_step;
  out.target_state = target_state;
  out.prob = Array2({std::size_t(H), std::size_t(S)});
  out.action = IntArray2({std::size_t(H), std::size_t(S)});
  out.prob(target_step, target_state) = 1.0;
  for (int s = 0; s < S; ++s) out.action(target_step, s) = mdp.first_available(target_step, s);
  for (int t = target_step - 1; t >= 0; --t)
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = mdp.first_available(t, s);
      for (int a = 0; a < A; ++a) {
        if (!mdp.available(t, s, a)) continue;
        const auto row = mdp.next_state_row(t, s, a);
        double q = 0.0;
        for (int n = 0; n < S; ++n) q += row[n] * out.prob(t + 1, n);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      out.prob(t, s) = best;
      out.action(t, s) = best_a;
    }
  return out;
}

ReachTable::ReachTable(const TabularMDP& mdp) {
  const std::size_t S = mdp.num_states(), H = mdp.horizon();
  d_star_ = Array2({H, S});
  u_ = Array4({H, S, H, S});
  nav_ = DenseArray<int, 4>({H, S, H, S});
  parallel_for(H * S, [&](std::size_t k) {
    const int h = static_cast<int>(k / S), s = static_cast<int>(k % S);
    const ConditionalReach c = conditional_reach(mdp, h, s);
    double d = 0.0;
    for (std::size_t n = 0; n < S; ++n) d += mdp.initial()[n] * c.prob(0, n);
    d_star_(h, s) = d;
    for (int t = 0; t <= h; ++t)
      for (std::size_t n = 0; n < S; ++n) {
        u_(h, s, t, n) = c.prob(t, n);
        nav_(h, s, t, n) = c.action(t, n);
      }
  });
}

MarkovPolicy ReachTable::witness(const TabularMDP& mdp, int h, int s) const {
  IntArray2 act({std::size_t(mdp.horizon()), std::size_t(mdp.num_states())});
  for (int t = 0; t < mdp.horizon(); ++t)
    for (int n = 0; n < mdp.num_states(); ++n)
      act(t, n) = t < h ? nav_(h, s, t, n) : mdp.first_available(t, n);
  return MarkovPolicy::from_actions(act, mdp.num_actions());
}

}  // namespace lookahead
