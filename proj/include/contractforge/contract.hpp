#pragma once

#include <cstddef>

#include "contractforge/cost_model.hpp"

namespace contractforge {

/// Private cost multiplier theta > 0 of the agent.
class AgentType {
 public:
  explicit AgentType(double theta);
  double theta() const { return theta_; }
  friend bool operator==(const AgentType&, const AgentType&) = default;

 private:
  double theta_;
};

/// Deviation gains at or below this level (utility units) count as grid noise.
inline constexpr double kDefaultGainTolerance = 1e-7;

/// First-stage incentive, cost model and the numerical settings shared by
/// every search. Certifications hold on the working interval only.
struct ContractConfig {
  ContractConfig(double u1, CostModel cost) : u1(u1), cost(std::move(cost)) {}

  double u1;
  CostModel cost;
  double a_min = 1e-3;
  double a_max = 10.0;
  std::size_t action_grid_size = 2048;
  int refine_iters = 100;
  /// 0 = CONTRACTFORGE_THREADS or hardware concurrency.
  std::size_t workers = 0;
  double gain_tolerance = kDefaultGainTolerance;

  /// Throws ConfigError when the settings are inconsistent.
  void validate() const;
  Interval working_interval() const { return {a_min, a_max, false, false}; }
  bool in_working_interval(double a) const { return a >= a_min && a <= a_max; }
};

}  // namespace contractforge
