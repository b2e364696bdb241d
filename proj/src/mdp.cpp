#include "lookahead/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lookahead {
namespace {

std::string loc(int h, int s, int a = -1, int n = -1) {
  std::ostringstream os;
  os << "h=" << h << ",s=" << s;
  if (a >= 0) os << ",a=" << a;
  if (n >= 0) os << ",s'=" << n;
  return os.str();
}

}  // namespace

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.what;
    if (!v.where.empty()) os << " at " << v.where;
    os << " (magnitude " << v.magnitude << ")\n";
  }
  return os.str();
}

TabularMDP::TabularMDP(int num_states, int num_actions, int horizon, Array4 kernel,
                       std::vector<double> initial, bool stationary_kernel,
                       ActionMask mask)
    : S_(num_states), A_(num_actions), H_(horizon), P_(std::move(kernel)),
      mu_(std::move(initial)), stationary_(stationary_kernel), mask_(std::move(mask)) {
  if (S_ < 1 || A_ < 1 || H_ < 1)
    throw DimensionError("S, A and H must be positive");
  const Array4::Shape want{static_cast<std::size_t>(H_), static_cast<std::size_t>(S_),
                           static_cast<std::size_t>(A_), static_cast<std::size_t>(S_)};
  if (P_.shape() != want) throw DimensionError("kernel shape must be (H, S, A, S)");
  if (mu_.size() != static_cast<std::size_t>(S_))
    throw DimensionError("initial distribution must have S entries");
  if (!mask_.empty()) {
    const ActionMask::Shape mwant{want[0], want[1], want[2]};
    if (mask_.shape() != mwant) throw DimensionError("action mask shape must be (H, S, A)");
  }
}

int TabularMDP::num_available(int h, int s) const {
  if (mask_.empty()) return A_;
  int n = 0;
  for (int a = 0; a < A_; ++a) n += mask_(h, s, a) != 0;
  return n;
}

int TabularMDP::first_available(int h, int s) const {
  for (int a = 0; a < A_; ++a)
    if (available(h, s, a)) return a;
  return 0;
}

std::vector<Violation> validate(const TabularMDP& mdp) {
  std::vector<Violation> out;
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  double mu_sum = 0.0;
  for (int s = 0; s < S; ++s) {
    const double m = mdp.initial()[s];
    if (!std::isfinite(m) || m < 0.0)
      out.push_back({"initial probability negative or not finite", "s=" + std::to_string(s), m});
    mu_sum += m;
  }
  if (std::abs(mu_sum - 1.0) > kConstructionTol)
    out.push_back({"initial distribution does not sum to 1", "", mu_sum - 1.0});

  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (mdp.num_available(h, s) == 0)
        out.push_back({"no available action", loc(h, s), 0.0});
      for (int a = 0; a < A; ++a) {
        double sum = 0.0;
        for (int n = 0; n < S; ++n) {
          const double p = mdp.transition(h, s, a, n);
          if (!std::isfinite(p) || p < 0.0)
            out.push_back({"transition probability negative or not finite", loc(h, s, a, n), p});
          sum += p;
        }
        if (std::abs(sum - 1.0) > kConstructionTol)
          out.push_back({"transition row does not sum to 1", loc(h, s, a), sum - 1.0});
        if (mdp.stationary_kernel() && h > 0)
          for (int n = 0; n < S; ++n)
            if (mdp.transition(h, s, a, n) != mdp.transition(0, s, a, n)) {
              out.push_back({"kernel flagged stationary but P_h differs from P_0", loc(h, s, a, n),
                             mdp.transition(h, s, a, n) - mdp.transition(0, s, a, n)});
              break;
            }
      }
    }
  return out;
}

std::string to_string(RewardFamily family) {
  switch (family) {
    case RewardFamily::kDeterministic: return "deterministic";
    case RewardFamily::kLongShot: return "longshot";
    case RewardFamily::kFiniteSupport: return "finite_support";
  }
  return "unknown";
}

RewardSpec RewardSpec::deterministic(Array3 r, bool stationary) {
  RewardSpec out;
  out.family_ = RewardFamily::kDeterministic;
  out.r_ = std::move(r);
  out.stationary_ = stationary;
  return out;
}

RewardSpec RewardSpec::long_shot(Array3 r, double epsilon, bool stationary) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("long-shot epsilon must lie in (0, 1)");
  RewardSpec out;
  out.family_ = RewardFamily::kLongShot;
  out.epsilon_ = epsilon;
  out.r_ = std::move(r);
  out.stationary_ = stationary;
  return out;
}

RewardSpec RewardSpec::finite_support(DenseArray<std::vector<Outcome>, 3> entries,
                                      bool stationary) {
  RewardSpec out;
  out.family_ = RewardFamily::kFiniteSupport;
  out.stationary_ = stationary;
  out.r_ = Array3(entries.shape());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double m = 0.0;
    for (const auto& o : entries.flat()[i]) m += o.value * o.prob;
    out.r_.flat()[i] = m;
  }
  out.entries_ = std::move(entries);
  return out;
}

std::vector<Outcome> RewardSpec::outcomes(int h, int s, int a) const {
  const double m = r_(h, s, a);
  switch (family_) {
    case RewardFamily::kDeterministic: return {{m, 1.0}};
    case RewardFamily::kLongShot:
      if (m == 0.0) return {{0.0, 1.0}};
      return {{0.0, 1.0 - epsilon_}, {m / epsilon_, epsilon_}};
    case RewardFamily::kFiniteSupport: {
      std::vector<Outcome> out;
      for (const auto& o : entries_(h, s, a))
        if (o.prob > 0.0) out.push_back(o);
      return out;
    }
  }
  return {};
}

RewardSpec RewardSpec::with_expectation(Array3 r) const {
  if (family_ == RewardFamily::kLongShot) return long_shot(std::move(r), epsilon_, stationary_);
  return deterministic(std::move(r), stationary_);
}

std::vector<Violation> validate(const RewardSpec& rewards) {
  std::vector<Violation> out;
  const Array3& r = rewards.expectation();
  for (std::size_t h = 0; h < r.extent(0); ++h)
    for (std::size_t s = 0; s < r.extent(1); ++s)
      for (std::size_t a = 0; a < r.extent(2); ++a) {
        const double m = r(h, s, a);
        const std::string w = loc(int(h), int(s), int(a));
        if (!std::isfinite(m) || m < 0.0)
          out.push_back({"reward expectation negative or not finite", w, m});
        if (rewards.family() == RewardFamily::kFiniteSupport) {
          double p = 0.0;
          for (const auto& o : rewards.finite_entries()(h, s, a)) {
            if (o.prob < 0.0) out.push_back({"negative outcome probability", w, o.prob});
            if (o.value < 0.0) out.push_back({"negative reward outcome", w, o.value});
            p += o.prob;
          }
          if (std::abs(p - 1.0) > kConstructionTol)
            out.push_back({"outcome probabilities do not sum to 1", w, p - 1.0});
        }
        if (rewards.stationary() && h > 0 && r(h, s, a) != r(0, s, a))
          out.push_back({"reward flagged stationary but r_h differs from r_0", w,
                         r(h, s, a) - r(0, s, a)});
      }
  return out;
}

std::vector<Violation> validate(const TabularMDP& mdp, const RewardSpec& rewards) {
  std::vector<Violation> out;
  if (rewards.horizon() != mdp.horizon() || rewards.num_states() != mdp.num_states() ||
      rewards.num_actions() != mdp.num_actions()) {
    out.push_back({"reward shape does not match (H, S, A)", "", 0.0});
    return out;
  }
  out = validate(rewards);
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.num_states(); ++s)
      for (int a = 0; a < mdp.num_actions(); ++a)
        if (!mdp.available(h, s, a) && rewards.expectation(h, s, a) != 0.0)
          out.push_back({"nonzero reward on unavailable action", loc(h, s, a),
                         rewards.expectation(h, s, a)});
  return out;
}

MarkovPolicy::MarkovPolicy(Array3 probs) : pi_(std::move(probs)) {
  deterministic_ = true;
  for (double p : pi_.flat())
    if (p != 0.0 && p != 1.0) {
      deterministic_ = false;
      break;
    }
}

MarkovPolicy MarkovPolicy::from_actions(const IntArray2& actions, int num_actions) {
  Array3 pi({actions.extent(0), actions.extent(1), static_cast<std::size_t>(num_actions)});
  for (std::size_t h = 0; h < actions.extent(0); ++h)
    for (std::size_t s = 0; s < actions.extent(1); ++s) {
      const int a = actions(h, s);
      if (a < 0 || a >= num_actions) throw DomainError("action index out of range");
      pi(h, s, a) = 1.0;
    }
  return MarkovPolicy(std::move(pi));
}

MarkovPolicy MarkovPolicy::uniform(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  Array3 pi({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const int n = mdp.num_available(h, s);
      for (int a = 0; a < A; ++a)
        if (mdp.available(h, s, a)) pi(h, s, a) = 1.0 / n;
    }
  return MarkovPolicy(std::move(pi));
}

int MarkovPolicy::action(int h, int s) const {
  if (!deterministic_) throw DomainError("action() requires a deterministic policy");
  for (std::size_t a = 0; a < pi_.extent(2); ++a)
    if (pi_(h, s, a) == 1.0) return static_cast<int>(a);
  throw DomainError("policy row has no action with probability 1");
}

IntArray2 MarkovPolicy::actions() const {
  IntArray2 out({pi_.extent(0), pi_.extent(1)});
  for (int h = 0; h < horizon(); ++h)
    for (int s = 0; s < num_states(); ++s) out(h, s) = action(h, s);
  return out;
}

std::vector<Violation> validate(const TabularMDP& mdp, const MarkovPolicy& policy) {
  std::vector<Violation> out;
  if (policy.horizon() != mdp.horizon() || policy.num_states() != mdp.num_states() ||
      policy.num_actions() != mdp.num_actions()) {
    out.push_back({"policy shape does not match (H, S, A)", "", 0.0});
    return out;
  }
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.num_states(); ++s) {
      double sum = 0.0;
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const double p = policy.prob(h, s, a);
        if (!std::isfinite(p) || p < 0.0)
          out.push_back({"policy probability negative or not finite", loc(h, s, a), p});
        if (p > 0.0 && !mdp.available(h, s, a))
          out.push_back({"policy uses unavailable action", loc(h, s, a), p});
        sum += p;
      }
      if (std::abs(sum - 1.0) > kConstructionTol)
        out.push_back({"policy row does not sum to 1", loc(h, s), sum - 1.0});
    }
  return out;
}

double OccupancyMeasure::state_mass(int h, int s) const {
  double m = 0.0;
  for (double x : d_.slice(h, s)) m += x;
  return m;
}

Array2 OccupancyMeasure::state_marginals() const {
  Array2 out({d_.extent(0), d_.extent(1)});
  for (std::size_t h = 0; h < d_.extent(0); ++h)
    for (std::size_t s = 0; s < d_.extent(1); ++s) out(h, s) = state_mass(int(h), int(s));
  return out;
}

void check_same_shape(const TabularMDP& mdp, const Array3& r, const char* what) {
  const Array3::Shape want{std::size_t(mdp.horizon()), std::size_t(mdp.num_states()),
                           std::size_t(mdp.num_actions())};
  if (r.shape() != want) throw DimensionError(std::string(what) + " shape must be (H, S, A)");
}

std::vector<Violation> occupancy_violations(const TabularMDP& mdp, const OccupancyMeasure& d,
                                            double tol) {
  check_same_shape(mdp, d.values(), "occupancy");
  std::vector<Violation> out;
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> inflow(mdp.initial());
  for (int h = 0; h < H; ++h) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      double mass = 0.0;
      for (int a = 0; a < A; ++a) {
        const double x = d(h, s, a);
        if (!std::isfinite(x) || x < -tol)
          out.push_back({"occupancy negative or not finite", loc(h, s, a), x});
        if (!mdp.available(h, s, a) && std::abs(x) > tol)
          out.push_back({"occupancy on unavailable action", loc(h, s, a), x});
        mass += x;
        const auto row = mdp.next_state_row(h, s, a);
        for (int n = 0; n < S; ++n) next[n] += x * row[n];
      }
      if (std::abs(mass - inflow[s]) > tol)
        out.push_back({"flow conservation fails", loc(h, s), mass - inflow[s]});
    }
    inflow = std::move(next);
  }
  return out;
}

OccupancyMeasure occupancy_of_policy(const TabularMDP& mdp, const MarkovPolicy& policy) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (policy.horizon() != H || policy.num_states() != S || policy.num_actions() != A)
    throw DimensionError("policy shape does not match (H, S, A)");
  Array3 d({std::size_t(H), std::size_t(S), std::size_t(A)});
  std::vector<double> mass(mdp.initial());
  for (int h = 0; h < H; ++h) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      if (mass[s] == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const double x = mass[s] * policy.prob(h, s, a);
        d(h, s, a) = x;
        if (x == 0.0) continue;
        const auto row = mdp.next_state_row(h, s, a);
        for (int n = 0; n < S; ++n) next[n] += x * row[n];
      }
    }
    mass = std::move(next);
  }
  return OccupancyMeasure(std::move(d));
}

Array2 state_distribution(const TabularMDP& mdp, const MarkovPolicy& policy) {
  return occupancy_of_policy(mdp, policy).state_marginals();
}

MarkovPolicy policy_from_occupancy(const TabularMDP& mdp, const OccupancyMeasure& d) {
  const auto bad = occupancy_violations(mdp, d);
  if (!bad.empty()) throw InfeasibleError("occupancy is not flow-feasible: " + describe(bad));
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  Array3 pi({std::size_t(H), std::size_t(S), std::size_t(A)});
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      double mass = 0.0;
      for (int a = 0; a < A; ++a)
        if (mdp.available(h, s, a)) mass += std::max(d(h, s, a), 0.0);
      const int n = mdp.num_available(h, s);
      for (int a = 0; a < A; ++a) {
        if (!mdp.available(h, s, a)) continue;
        pi(h, s, a) = mass > 0.0 ? std::max(d(h, s, a), 0.0) / mass : 1.0 / n;
      }
    }
  return MarkovPolicy(std::move(pi));
}

OccupancyMeasure mix_occupancies(std::span<const double> weights,
                                 std::span<const OccupancyMeasure> measures) {
  if (weights.size() != measures.size() || measures.empty())
    throw DimensionError("mixture needs one weight per occupancy");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kConstructionTol) throw DomainError("mixture weights must sum to 1");
  Array3 out(measures[0].values().shape());
  for (std::size_t k = 0; k < measures.size(); ++k) {
    if (measures[k].values().shape() != out.shape()) throw DimensionError("occupancy shapes differ");
    const auto& src = measures[k].values().flat();
    for (std::size_t i = 0; i < src.size(); ++i) out.flat()[i] += weights[k] * src[i];
  }
  return OccupancyMeasure(std::move(out));
}

double value_of_occupancy(const OccupancyMeasure& d, const Array3& r) {
  if (d.values().shape() != r.shape()) throw DimensionError("occupancy and reward shapes differ");
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) v += d.values().flat()[i] * r.flat()[i];
  return v;
}

double value_of_policy(const TabularMDP& mdp, const RewardSpec& rewards,
                       const MarkovPolicy& policy) {
  check_same_shape(mdp, rewards.expectation(), "reward");
  return value_of_occupancy(occupancy_of_policy(mdp, policy), rewards.expectation());
}

PlanResult plan_expected_rewards(const TabularMDP& mdp, const Array3& r) {
  check_same_shape(mdp, r, "reward");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  Array2 V({std::size_t(H + 1), std::size_t(S)});
  IntArray2 act({std::size_t(H), std::size_t(S)});
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = mdp.first_available(h, s);
      for (int a = 0; a < A; ++a) {
        if (!mdp.available(h, s, a)) continue;
        double q = r(h, s, a);
        const auto row = mdp.next_state_row(h, s, a);
        for (int n = 0; n < S; ++n) q += row[n] * V(h + 1, n);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      V(h, s) = best;
      act(h, s) = best_a;
    }
  PlanResult out;
  for (int s = 0; s < S; ++s) out.value += mdp.initial()[s] * V(0, s);
  out.policy = MarkovPolicy::from_actions(act, A);
  out.values = std::move(V);
  return out;
}

PlanResult optimal_value_no_lookahead(const TabularMDP& mdp, const RewardSpec& rewards) {
  return plan_expected_rewards(mdp, rewards.expectation());
}

}  // namespace lookahead
