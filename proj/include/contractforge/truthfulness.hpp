#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contractforge/contract.hpp"
#include "contractforge/incentive.hpp"

namespace contractforge {

/// Result of the pairwise Bregman test for continuous types.
///
/// For anchor a (the truthful action of type u1/phi'(a)) and deviation a_hat,
///   margin = D(a_hat, a) - [phi*(u2(a_hat) phi'(a)/u1) - phi*(u2(a) phi'(a)/u1)]
/// and gain = -margin * u1/phi'(a) is the utility the deviation would earn.
struct BregmanReport {
  bool truthful = true;
  double worst_a = 0.0;
  double worst_a_hat = 0.0;
  double worst_margin = 0.0;
  double worst_gain = 0.0;
  std::size_t anchor_count = 0;
  std::size_t deviation_count = 0;
  double tolerance = 0.0;
  double a_min = 0.0;
  double a_max = 0.0;
};

inline constexpr std::size_t kDefaultBregmanGrid = 256;

/// Log-spaced grid of `n` points over the working interval.
std::vector<double> bregman_grid(const ContractConfig& cfg, std::size_t n = kDefaultBregmanGrid);

/// All pairs of the grid (O(n^2)).
BregmanReport check_bregman_truthful(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const std::vector<double>& grid);
/// Anchors x deviations; use the truthful actions of a finite type sample as
/// anchors to reproduce a deviation search on the same types.
BregmanReport check_bregman_truthful(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const std::vector<double>& anchors,
                                     const std::vector<double>& deviations);

/// [(phi')^-1(u1/theta_H), (phi')^-1(u1/theta_L)]
std::pair<double, double> step_threshold_range(const ContractConfig& cfg, AgentType theta_L,
                                               AgentType theta_H);

enum class StepDirection { LowGetsMore, HighGetsMore };

/// Two-type step feasibility at a fixed threshold t. The low-cost type
/// theta_L earns u_L (actions >= t), the high-cost type earns u_H.
struct StepFeasibility {
  double t = 0.0;
  StepDirection direction = StepDirection::LowGetsMore;
  /// phi(t) + phi*(u1/theta) - u1 t/theta with theta the type tempted to deviate.
  double rhs_bound = 0.0;
  double theta_L = 0.0;
  double theta_H = 0.0;
  double u1 = 0.0;
  CostModel cost = CostModel::quadratic();

  /// The type whose deviation is binding: theta_H for LowGetsMore.
  double binding_theta() const;
  /// phi*(u_big/theta) - phi*(u_small/theta) for the binding type.
  double lhs(double u_L, double u_H) const;
  bool admits(double u_L, double u_H) const;
  /// Largest admissible larger incentive when the smaller one is held at `u_small`.
  double boundary_incentive(double u_small) const;
};

StepFeasibility step_feasibility(const ContractConfig& cfg, AgentType theta_L, AgentType theta_H,
                                 double t, StepDirection direction);

/// Offset from the lower threshold end used when the high-cost type is paid
/// more: at t = t_min exactly the right-closed step would pay him u_L.
inline constexpr double kHighGetsMoreOffset = 1e-6;

struct StepDesign {
  bool feasible = false;
  std::optional<IncentiveFunction> incentive;
  std::optional<StepFeasibility> feasibility;
  double requested_u_L = 0.0;
  double requested_u_H = 0.0;
  /// When infeasible: the largest admissible larger incentive, with the
  /// smaller one held fixed, and the corresponding gap.
  std::optional<double> max_feasible_incentive;
  std::optional<double> max_feasible_gap;
};

/// Two-level step paying u_L to theta_L and u_H to theta_H at the most
/// permissive threshold, or an infeasibility certificate.
StepDesign design_step(const ContractConfig& cfg, AgentType theta_L, AgentType theta_H, double u_L,
                       double u_H);

struct PairwiseStepCheck {
  std::vector<StepFeasibility> pairs;
  std::vector<bool> pair_admits;
  /// Every adjacent pair passes; necessary, not sufficient, for n > 2 types.
  bool pairwise_necessary = true;
  static constexpr const char* kLabel = "pairwise-necessary";
};

/// Adjacent-type checks for a staircase over increasing `thetas`; the
/// staircase must have one threshold between each adjacent pair of truthful
/// actions.
PairwiseStepCheck check_staircase_pairwise(const ContractConfig& cfg,
                                           const std::vector<double>& thetas,
                                           const IncentiveFunction& staircase);

}  // namespace contractforge
