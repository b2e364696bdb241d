#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lookahead/lookahead_value.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/reach.hpp"

namespace lookahead {

enum class CRMode { kFixedReward, kWorstNonstationary, kWorstStationary };

std::string to_string(CRMode mode);

struct NamedBound {
  std::string name;
  double value = 0.0;
};

/**
 * Result of a competitive-ratio computation.
 *
 * For fixed rewards, ratio = numerator / denominator where the numerator is
 * the no-lookahead optimum and the denominator the lookahead supremum. A zero
 * denominator gives +inf (or flags `degenerate` when both are zero).
 *
 * For worst-case expectations the ratio is the optimal max-min coverage value
 * and numerator / denominator are (ratio, 1). `certified` holds when the
 * minimization over base policies was exhaustive.
 */
struct CRReport {
  CRMode mode = CRMode::kFixedReward;
  int window = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
  bool certified = true;
  MarkovPolicy witness_no_lookahead;
  MarkovPolicy witness_lookahead_base;
  double lower_bound = 0.0;
  std::vector<NamedBound> upper_bounds;
  std::uint64_t candidates = 0;
  std::uint64_t minimizer_ties = 0;
};

/// alpha_{h,s,a} = sum_{s'} d_{t(h)}(s') d*_h(s | s_{t(h)} = s') for a base
/// policy with state marginals `base` (shape (H, S)). Zero on unavailable
/// actions.
Array3 alpha_weights(const TabularMDP& mdp, const ReachTable& reach, int L, const Array2& base);

struct MaxMinResult {
  double t_star = 0.0;  // +inf when no weight is positive
  OccupancyMeasure occupancy;
  /// Dual of each coverage constraint, indexed like alpha (stationary mode
  /// stores the group dual at h = 0).
  Array3 coverage_duals;
  long iterations = 0;
};

/// max over occupancies d of min over positive weights of d / alpha. In
/// stationary mode both sides are summed over h per (s, a).
MaxMinResult maxmin_occupancy_lp(const TabularMDP& mdp, const Array3& alpha,
                                 bool stationary, const ReachTable& reach);

/// Minimum over weighted coverage groups of the occupancy ratio.
double coverage_ratio(const OccupancyMeasure& d, const Array3& alpha, bool stationary);

CRReport cr_fixed(const TabularMDP& mdp, const Array3& r, int L, const ReachTable& reach);
CRReport cr_fixed(const TabularMDP& mdp, const RewardSpec& rewards, int L);

struct CROptions {
  std::uint64_t enumeration_cap = 1000000;
};

/// Exact worst case over reward expectations, minimizing over deterministic
/// base policies. Throws CapExceeded when the candidate count exceeds the cap.
CRReport cr_worst_expectations(const TabularMDP& mdp, int L, bool stationary,
                               const CROptions& options = {});

/// Alternating local search over base policies. The result only bounds the
/// worst case from above and is reported with certified = false.
CRReport cr_worst_expectations_heuristic(const TabularMDP& mdp, int L, bool stationary,
                                         int restarts, std::uint64_t seed);

struct AnalyticBounds {
  double lower = 0.0;        // max{1/(SAH), 1/((H-L+1) A^L)}
  double tree_upper = std::numeric_limits<double>::infinity();
};

/// Universal lower bound and, for A >= 2 and enough states, the delayed-tree
/// upper bound with slack factor (1 + delta).
AnalyticBounds analytic_bounds(int S, int A, int H, int L, double delta = 0.0);

/// Brute-force minimum of cr_fixed over expectations on {0, 1/g, ..., 1}.
/// Entries at unreachable (h, s) or unavailable actions stay at zero.
double reward_grid_oracle(const TabularMDP& mdp, int L, int g,
                          std::uint64_t cap = 200000000ULL);

}  // namespace lookahead
