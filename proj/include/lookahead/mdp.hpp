#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lookahead/dense.hpp"
#include "lookahead/errors.hpp"

namespace lookahead {

/// Tolerance for invariants that hold by construction.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance for quantities that pass through several floating-point stages.
inline constexpr double kPropagatedTol = 1e-9;

/// A single failed invariant. `where` locates the offending entry.
struct Violation {
  std::string what;
  std::string where;
  double magnitude = 0.0;
};

std::string describe(const std::vector<Violation>& violations);

using ActionMask = DenseArray<std::uint8_t, 3>;

/**
 * Finite-horizon tabular MDP. Steps, states and actions are zero-based.
 *
 * The kernel has shape (H, S, A, S). An optional mask of shape (H, S, A)
 * marks which actions exist at each (h, s); an empty mask means every action
 * is available. Rows of unavailable actions must still be distributions but
 * are never used.
 *
 * The constructor only checks shapes. Use validate() for content checks.
 */
class TabularMDP {
 public:
  TabularMDP() = default;
  TabularMDP(int num_states, int num_actions, int horizon, Array4 kernel,
             std::vector<double> initial, bool stationary_kernel,
             ActionMask mask = {});

  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  int horizon() const { return H_; }

  double transition(int h, int s, int a, int next) const {
    return P_(h, s, a, next);
  }
  std::span<const double> next_state_row(int h, int s, int a) const {
    return P_.slice(h, s, a);
  }
  const Array4& kernel() const { return P_; }
  const std::vector<double>& initial() const { return mu_; }
  bool stationary_kernel() const { return stationary_; }

  bool has_action_mask() const { return !mask_.empty(); }
  bool available(int h, int s, int a) const {
    return mask_.empty() || mask_(h, s, a) != 0;
  }
  const ActionMask& action_mask() const { return mask_; }
  int num_available(int h, int s) const;
  int first_available(int h, int s) const;

 private:
  int S_ = 0, A_ = 0, H_ = 0;
  Array4 P_;
  std::vector<double> mu_;
  bool stationary_ = false;
  ActionMask mask_;
};

std::vector<Violation> validate(const TabularMDP& mdp);

enum class RewardFamily { kDeterministic, kLongShot, kFiniteSupport };

std::string to_string(RewardFamily family);

struct Outcome {
  double value = 0.0;
  double prob = 0.0;
};

/**
 * Independent reward distributions, one per (h, s, a).
 *
 * Only marginals are represented, so joint correlation between entries is
 * not expressible. LongShot(eps) with expectation r pays r / eps with
 * probability eps and 0 otherwise.
 */
class RewardSpec {
 public:
  RewardSpec() = default;

  static RewardSpec deterministic(Array3 r, bool stationary = false);
  static RewardSpec long_shot(Array3 r, double epsilon, bool stationary = false);
  static RewardSpec finite_support(DenseArray<std::vector<Outcome>, 3> entries,
                                   bool stationary = false);

  RewardFamily family() const { return family_; }
  double epsilon() const { return epsilon_; }
  bool stationary() const { return stationary_; }
  const Array3& expectation() const { return r_; }
  double expectation(int h, int s, int a) const { return r_(h, s, a); }
  int horizon() const { return static_cast<int>(r_.extent(0)); }
  int num_states() const { return static_cast<int>(r_.extent(1)); }
  int num_actions() const { return static_cast<int>(r_.extent(2)); }

  /// Support of the reward at (h, s, a) with probabilities. Zero-probability
  /// outcomes are dropped.
  std::vector<Outcome> outcomes(int h, int s, int a) const;

  /// Same reward family with expectations replaced, keeping epsilon.
  RewardSpec with_expectation(Array3 r) const;

  const DenseArray<std::vector<Outcome>, 3>& finite_entries() const { return entries_; }

 private:
  RewardFamily family_ = RewardFamily::kDeterministic;
  double epsilon_ = 0.0;
  bool stationary_ = false;
  Array3 r_;
  DenseArray<std::vector<Outcome>, 3> entries_;
};

std::vector<Violation> validate(const RewardSpec& rewards);
/// Shape agreement with the MDP and zero expectation on unavailable actions.
std::vector<Violation> validate(const TabularMDP& mdp, const RewardSpec& rewards);

/// Markov policy pi[h][s][a]. For deterministic policies action() is defined.
class MarkovPolicy {
 public:
  MarkovPolicy() = default;
  explicit MarkovPolicy(Array3 probs);

  static MarkovPolicy from_actions(const IntArray2& actions, int num_actions);
  /// Uniform over available actions.
  static MarkovPolicy uniform(const TabularMDP& mdp);

  double prob(int h, int s, int a) const { return pi_(h, s, a); }
  const Array3& probs() const { return pi_; }
  bool deterministic() const { return deterministic_; }
  int action(int h, int s) const;
  /// Action table of a deterministic policy.
  IntArray2 actions() const;

  int horizon() const { return static_cast<int>(pi_.extent(0)); }
  int num_states() const { return static_cast<int>(pi_.extent(1)); }
  int num_actions() const { return static_cast<int>(pi_.extent(2)); }
  bool empty() const { return pi_.empty(); }

 private:
  Array3 pi_;
  bool deterministic_ = false;
};

std::vector<Violation> validate(const TabularMDP& mdp, const MarkovPolicy& policy);

/// State-action occupancy d_h(s, a).
class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  explicit OccupancyMeasure(Array3 d) : d_(std::move(d)) {}

  double operator()(int h, int s, int a) const { return d_(h, s, a); }
  double state_mass(int h, int s) const;
  const Array3& values() const { return d_; }
  Array2 state_marginals() const;

 private:
  Array3 d_;
};

/// Flow-conservation and nonnegativity failures of d beyond `tol`.
std::vector<Violation> occupancy_violations(const TabularMDP& mdp,
                                            const OccupancyMeasure& d,
                                            double tol = kPropagatedTol);

OccupancyMeasure occupancy_of_policy(const TabularMDP& mdp, const MarkovPolicy& policy);

/// State marginals d_h(s) of a policy, shape (H, S).
Array2 state_distribution(const TabularMDP& mdp, const MarkovPolicy& policy);

/// pi_h(a|s) = d_h(s,a) / d_h(s); uniform over available actions where d_h(s)=0.
/// Throws InfeasibleError if d violates flow conservation.
MarkovPolicy policy_from_occupancy(const TabularMDP& mdp, const OccupancyMeasure& d);

OccupancyMeasure mix_occupancies(std::span<const double> weights,
                                 std::span<const OccupancyMeasure> measures);

double value_of_occupancy(const OccupancyMeasure& d, const Array3& r);
double value_of_policy(const TabularMDP& mdp, const RewardSpec& rewards,
                       const MarkovPolicy& policy);

struct PlanResult {
  double value = 0.0;
  MarkovPolicy policy;
  Array2 values;  // V_h(s), shape (H + 1, S)
};

/// Backward induction on expected rewards. Ties go to the lowest action.
PlanResult plan_expected_rewards(const TabularMDP& mdp, const Array3& r);
PlanResult optimal_value_no_lookahead(const TabularMDP& mdp, const RewardSpec& rewards);

void check_same_shape(const TabularMDP& mdp, const Array3& r, const char* what);

}  // namespace lookahead
