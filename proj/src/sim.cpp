#include "lookahead/sim.hpp"

#include <cmath>
#include <limits>

#include "lookahead/parallel.hpp"
#include "lookahead/random.hpp"

namespace lookahead {
namespace {

double normal_quantile_two_sided(double confidence) {
  // z with P(|Z| <= z) = confidence, by bisection on erfc.
  const double tail = 1.0 - confidence;
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > tail) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double draw_reward(CounterRng& rng, const std::vector<Outcome>& out) {
  if (out.size() == 1) return out[0].value;
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& o : out) {
    acc += o.prob;
    if (u < acc) return o.value;
  }
  return out.back().value;
}

int draw_action(CounterRng& rng, const MarkovPolicy& pi, int h, int s) {
  if (pi.deterministic()) return pi.action(h, s);
  const auto row = pi.probs().slice(h, s);
  return rng.categorical(row);
}

}  // namespace

double MCEstimate::ci_low() const {
  return mean - normal_quantile_two_sided(confidence) * std_error;
}
double MCEstimate::ci_high() const {
  return mean + normal_quantile_two_sided(confidence) * std_error;
}

MCEstimate summarize(const std::vector<double>& samples, double confidence) {
  MCEstimate e;
  e.confidence = confidence;
  e.episodes = samples.size();
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double x : samples) sum += x;
  e.mean = sum / samples.size();
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (samples.size() - 1.0)) / std::sqrt(double(samples.size()));
  }
  return e;
}

EpisodeTrace sample_episode(const TabularMDP& mdp, const RewardSpec& rewards,
                            const MarkovPolicy& policy, std::uint64_t seed,
                            std::uint64_t episode) {
  CounterRng rng(seed, episode);
  EpisodeTrace tr;
  tr.seed = seed;
  tr.episode = episode;
  int s = rng.categorical(mdp.initial());
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int a = draw_action(rng, policy, h, s);
    const double r = draw_reward(rng, rewards.outcomes(h, s, a));
    tr.states.push_back(s);
    tr.actions.push_back(a);
    tr.rewards.push_back(r);
    tr.total += r;
    s = rng.categorical(mdp.next_state_row(h, s, a));
  }
  return tr;
}

MCEstimate simulate_policy(const TabularMDP& mdp, const RewardSpec& rewards,
                           const MarkovPolicy& policy, std::uint64_t episodes,
                           std::uint64_t seed) {
  std::vector<double> totals(episodes);
  parallel_for(episodes, [&](std::size_t e) {
    totals[e] = sample_episode(mdp, rewards, policy, seed, e).total;
  });
  return summarize(totals);
}

MCEstimate simulate_greedy_lookahead(const TabularMDP& mdp, const RewardSpec& rewards, int L,
                                     const MarkovPolicy& base, std::uint64_t episodes,
                                     std::uint64_t seed, std::vector<EpisodeTrace>* traces,
                                     std::size_t max_traces) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (L < 0 || L > H) throw DomainError("lookahead must lie in [0, H]");
  const ReachTable reach(mdp);
  DenseArray<std::vector<Outcome>, 3> support({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) support(h, s, a) = rewards.outcomes(h, s, a);

  std::vector<double> totals(episodes);
  const std::size_t keep = traces ? std::min<std::size_t>(max_traces, episodes) : 0;
  std::vector<EpisodeTrace> kept(keep);

  parallel_for(episodes, [&](std::size_t e) {
    CounterRng rng(seed, e);
    Array3 R({std::size_t(H), std::size_t(S), std::size_t(A)});
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) R(h, s, a) = draw_reward(rng, support(h, s, a));
    EpisodeTrace tr;
    tr.seed = seed;
    tr.episode = e;
    int s = rng.categorical(mdp.initial());
    for (int h = 0; h < H; ++h) {
      int action = -1;
      const int last = std::min(h + L - 1, H - 1);
      for (int t = h; t <= last && action < 0; ++t)
        for (int x = 0; x < S && action < 0; ++x) {
          if (reach.conditional(t, x, h, s) <= 0.0) continue;
          for (int a = 0; a < A; ++a)
            if (mdp.available(t, x, a) && R(t, x, a) > rewards.expectation(t, x, a)) {
              action = t == h ? a : reach.navigation_action(t, x, h, s);
              break;
            }
        }
      if (action < 0) action = draw_action(rng, base, h, s);
      const double r = R(h, s, action);
      tr.states.push_back(s);
      tr.actions.push_back(action);
      tr.rewards.push_back(r);
      tr.total += r;
      s = rng.categorical(mdp.next_state_row(h, s, action));
    }
    totals[e] = tr.total;
    if (e < keep) kept[e] = std::move(tr);
  });
  if (traces) *traces = std::move(kept);
  return summarize(totals);
}

namespace {

struct Layer {
  std::size_t count = 1;
  std::vector<double> prob;    // count
  std::vector<double> reward;  // count * S * A
};

std::vector<Layer> build_layers(const TabularMDP& mdp, const RewardSpec& rewards, double cap) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<Layer> layers(H);
  for (int h = 0; h < H; ++h) {
    std::vector<std::vector<Outcome>> out(std::size_t(S) * A);
    double combos = 1.0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        out[std::size_t(s) * A + a] = rewards.outcomes(h, s, a);
        combos *= double(out[std::size_t(s) * A + a].size());
      }
    if (combos > cap) throw CapExceeded("reward layer too large for exact lookahead");
    Layer& L = layers[h];
    L.count = static_cast<std::size_t>(combos);
    L.prob.assign(L.count, 1.0);
    L.reward.assign(L.count * S * A, 0.0);
    for (std::size_t c = 0; c < L.count; ++c) {
      std::size_t rest = c;
      for (std::size_t k = 0; k < out.size(); ++k) {
        const std::size_t i = rest % out[k].size();
        rest /= out[k].size();
        L.prob[c] *= out[k][i].prob;
        L.reward[c * S * A + k] = out[k][i].value;
      }
    }
  }
  return layers;
}

double window_size(const std::vector<double>& counts, int from, int to) {
  double w = 1.0;
  for (int j = from; j <= to; ++j) w *= counts[j];
  return w;
}

std::vector<double> layer_counts(const TabularMDP& mdp, const RewardSpec& rewards) {
  std::vector<double> counts(mdp.horizon());
  for (int h = 0; h < mdp.horizon(); ++h) {
    double c = 1.0;
    for (int s = 0; s < mdp.num_states(); ++s)
      for (int a = 0; a < mdp.num_actions(); ++a) c *= double(rewards.outcomes(h, s, a).size());
    counts[h] = c;
  }
  return counts;
}

}  // namespace

double exact_lookahead_state_count(const TabularMDP& mdp, const RewardSpec& rewards, int L) {
  const int H = mdp.horizon();
  if (L <= 0) return double(H) * mdp.num_states();
  const std::vector<double> counts = layer_counts(mdp, rewards);
  double total = 0.0;
  for (int h = 0; h < H; ++h) total += window_size(counts, h, std::min(h + L - 1, H - 1));
  return total * mdp.num_states();
}

double exact_lookahead_value(const TabularMDP& mdp, const RewardSpec& rewards, int L,
                             double size_cap) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (L < 0 || L > H) throw DomainError("lookahead must lie in [0, H]");
  check_same_shape(mdp, rewards.expectation(), "reward");
  if (L == 0) return optimal_value_no_lookahead(mdp, rewards).value;
  if (exact_lookahead_state_count(mdp, rewards, L) > size_cap)
    throw CapExceeded("augmented state space exceeds cap");
  const std::vector<Layer> layers = build_layers(mdp, rewards, size_cap);
  auto last = [&](int h) { return std::min(h + L - 1, H - 1); };
  auto wsize = [&](int from, int to) {
    std::size_t w = 1;
    for (int j = from; j <= to; ++j) w *= layers[j].count;
    return w;
  };

  std::vector<double> Vnext(S, 0.0);  // step H, empty window
  for (int h = H - 1; h >= 0; --h) {
    const std::size_t nh = layers[h].count;
    const std::size_t tail = wsize(h + 1, last(h));
    const bool fresh = h + L <= H - 1;
    std::vector<double> C(tail * S, 0.0);
    if (fresh) {
      const Layer& nl = layers[h + L];
      for (std::size_t k = 0; k < nl.count; ++k) {
        const double p = nl.prob[k];
        const double* src = &Vnext[(k * tail) * S];
        for (std::size_t i = 0; i < tail * S; ++i) C[i] += p * src[i];
      }
    } else {
      C = Vnext;
    }
    std::vector<double> V(nh * tail * S);
    const Layer& cur = layers[h];
    for (std::size_t w = 0; w < nh * tail; ++w) {
      const std::size_t ih = w % nh, t = w / nh;
      const double* rw = &cur.reward[ih * S * A];
      const double* c = &C[t * S];
      for (int s = 0; s < S; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a) {
          if (!mdp.available(h, s, a)) continue;
          const auto row = mdp.next_state_row(h, s, a);
          double q = rw[std::size_t(s) * A + a];
          for (int n = 0; n < S; ++n) q += row[n] * c[n];
          best = std::max(best, q);
        }
        V[w * S + s] = best;
      }
    }
    Vnext = std::move(V);
  }

  const int e0 = last(0);
  const std::size_t W0 = wsize(0, e0);
  double value = 0.0;
  for (std::size_t w = 0; w < W0; ++w) {
    double p = 1.0;
    std::size_t rest = w;
    for (int j = 0; j <= e0; ++j) {
      p *= layers[j].prob[rest % layers[j].count];
      rest /= layers[j].count;
    }
    if (p == 0.0) continue;
    double v = 0.0;
    for (int s = 0; s < S; ++s) v += mdp.initial()[s] * Vnext[w * S + s];
    value += p * v;
  }
  return value;
}

TransitionLookaheadEstimate simulate_transition_lookahead(int A, int H, std::uint64_t episodes,
                                                          std::uint64_t seed) {
  const TransitionTree tree = transition_lookahead_tree(A, H);
  const int S = tree.env.mdp.num_states();
  std::vector<bool> on_path(S, false);
  for (int v = tree.rewarding_leaf; v >= 0; v = tree.parent[v]) on_path[v] = true;

  std::vector<double> v0(episodes), v1(episodes);
  parallel_for(episodes, [&](std::size_t e) {
    {
      CounterRng rng(seed, 2 * e);
      int s = 0;
      double total = 0.0;
      for (int h = 0; h < H && s != tree.terminal; ++h) {
        const auto& ch = tree.children[s];
        if (ch.empty()) {
          if (s == tree.rewarding_leaf) total += 1.0;
          s = tree.terminal;
        } else {
          s = ch[rng.uniform_int(ch.size())];
        }
      }
      v0[e] = total;
    }
    {
      CounterRng rng(seed, 2 * e + 1);
      int s = 0;
      double total = 0.0;
      for (int h = 0; h < H && s != tree.terminal; ++h) {
        const auto& ch = tree.children[s];
        if (ch.empty()) {
          if (s == tree.rewarding_leaf) total += 1.0;
          s = tree.terminal;
          continue;
        }
        int move = s;
        for (int a = 1; a < A; ++a) {
          const int c = ch[rng.uniform_int(ch.size())];
          if (move == s && on_path[c]) move = c;
        }
        s = move;
      }
      v1[e] = total;
    }
  });
  TransitionLookaheadEstimate out;
  out.no_lookahead = summarize(v0);
  out.one_step = summarize(v1);
  out.leaves = tree.leaves;
  if (out.one_step.mean > 0.0) {
    out.ratio = out.no_lookahead.mean / out.one_step.mean;
    const double rel0 = out.no_lookahead.mean > 0.0
                            ? out.no_lookahead.std_error / out.no_lookahead.mean : 0.0;
    const double rel1 = out.one_step.std_error / out.one_step.mean;
    out.ratio_std_error = out.ratio * std::sqrt(rel0 * rel0 + rel1 * rel1);
  } else {
    out.ratio = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace lookahead
