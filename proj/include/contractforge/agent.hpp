#pragma once

#include <optional>

#include "contractforge/adjustment.hpp"
#include "contractforge/contract.hpp"
#include "contractforge/incentive.hpp"

namespace contractforge {

/// u a - theta phi(a)
double stage_utility(const ContractConfig& cfg, double u, double a, AgentType theta);
/// (phi')^-1(u / theta)
double best_response(const ContractConfig& cfg, double u, AgentType theta);
/// theta phi*(u / theta), the stage utility at the best response.
double best_response_value(const ContractConfig& cfg, double u, AgentType theta);

/// Cumulative utility when the second stage is played myopically.
double cumulative_utility_mh(const ContractConfig& cfg, double a1, const IncentiveFunction& u2,
                             AgentType theta);
/// Cumulative utility with an adjustment; -inf when pi(a1, a2) is infinite.
double cumulative_utility_adj(const ContractConfig& cfg, double a1, double a2,
                              const IncentiveFunction& u2, const AdjustmentFunction& pi,
                              AgentType theta);

/// Outcome of a brute-force search for profitable first-stage deviations.
/// The verdict only covers deviations inside [a_min, a_max].
struct DeviationReport {
  double theta = 0.0;
  double truthful_action = 0.0;
  double truthful_value = 0.0;
  double best_deviation = 0.0;
  /// Second-stage action of the best pair (adjustment searches only).
  std::optional<double> best_deviation_a2;
  double best_value = 0.0;
  double gain = 0.0;
  bool truthful = true;

  double a_min = 0.0;
  double a_max = 0.0;
  std::size_t grid_size = 0;
  double gain_tolerance = 0.0;
};

DeviationReport deviation_search_mh(const ContractConfig& cfg, const IncentiveFunction& u2,
                                    AgentType theta);

/// Extreme adjustments restrict deviations to the consistency curve; finite
/// penalties are searched on the full (a1, a2) grid.
DeviationReport deviation_search_adj(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const AdjustmentFunction& pi, AgentType theta);

}  // namespace contractforge
