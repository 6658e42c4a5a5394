#include "contractforge/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

using numeric::kInf;
using numeric::ScalarMax;

AgentType::AgentType(double theta) : theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("agent type must be a positive finite number");
  }
}

void ContractConfig::validate() const {
  if (!cost.incentive_domain().contains(u1)) throw ConfigError("u1 is outside the incentive domain");
  if (!(a_min < a_max)) throw ConfigError("working interval needs a_min < a_max");
  const auto dom = cost.action_domain();
  if (!dom.contains(a_min) || !dom.contains(a_max)) {
    throw ConfigError("working interval must lie inside the cost's action domain");
  }
  if (action_grid_size < 64) throw ConfigError("action_grid_size must be at least 64");
  if (refine_iters < 0) throw ConfigError("refine_iters must be non-negative");
  if (!(gain_tolerance >= 0.0)) throw ConfigError("gain_tolerance must be non-negative");
}

namespace {

void require_u(const ContractConfig& cfg, double u, const char* op) {
  if (!cfg.cost.incentive_domain().contains(u)) {
    throw DomainError(std::string(op) + ": incentive outside the incentive domain");
  }
}

double truthful_action_in_interval(const ContractConfig& cfg, AgentType theta) {
  const double a = best_response(cfg, cfg.u1, theta);
  if (!cfg.in_working_interval(a)) {
    throw ConfigError("truthful action " + std::to_string(a) + " for theta=" +
                      std::to_string(theta.theta()) + " lies outside the working interval");
  }
  return a;
}

// Grid nodes plus the truthful action and both sides of every jump of u2.
std::vector<double> first_stage_candidates(const ContractConfig& cfg, const IncentiveFunction& u2,
                                           double truthful) {
  auto xs = numeric::linspace(cfg.a_min, cfg.a_max, cfg.action_grid_size);
  xs.push_back(truthful);
  for (double d : u2.discontinuities()) {
    if (cfg.in_working_interval(d)) xs.push_back(d);
    const double left = std::nextafter(d, -kInf);
    if (cfg.in_working_interval(left)) xs.push_back(left);
  }
  for (double k : u2.kinks()) {
    if (cfg.in_working_interval(k)) xs.push_back(k);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

DeviationReport make_report(const ContractConfig& cfg, AgentType theta, double truthful,
                            double truthful_value, const ScalarMax& best) {
  DeviationReport r;
  r.theta = theta.theta();
  r.truthful_action = truthful;
  r.truthful_value = truthful_value;
  r.best_deviation = best.x;
  r.best_value = best.value;
  r.gain = best.value - truthful_value;
  r.truthful = r.gain <= cfg.gain_tolerance;
  r.a_min = cfg.a_min;
  r.a_max = cfg.a_max;
  r.grid_size = cfg.action_grid_size;
  r.gain_tolerance = cfg.gain_tolerance;
  return r;
}

std::optional<double> curve_point(const ContractConfig& cfg, const IncentiveFunction& u2,
                                  double a1) {
  try {
    return consistency_curve(cfg, u2, a1);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

double stage_utility(const ContractConfig& cfg, double u, double a, AgentType theta) {
  require_u(cfg, u, "stage_utility");
  return u * a - theta.theta() * cfg.cost.eval_cost(a);
}

double best_response(const ContractConfig& cfg, double u, AgentType theta) {
  return cfg.cost.inv_deriv(u / theta.theta());
}

double best_response_value(const ContractConfig& cfg, double u, AgentType theta) {
  return theta.theta() * cfg.cost.conjugate(u / theta.theta());
}

double cumulative_utility_mh(const ContractConfig& cfg, double a1, const IncentiveFunction& u2,
                             AgentType theta) {
  return stage_utility(cfg, cfg.u1, a1, theta) + best_response_value(cfg, u2(a1), theta);
}

double cumulative_utility_adj(const ContractConfig& cfg, double a1, double a2,
                              const IncentiveFunction& u2, const AdjustmentFunction& pi,
                              AgentType theta) {
  const double incentive = u2(a1);
  const auto curve = curve_point(cfg, u2, a1);
  const double penalty = curve ? pi.evaluate(a1, a2, *curve)
                               : (pi.kind == AdjustmentFunction::Kind::FinitePenalty ? pi.cap : kInf);
  if (penalty == kInf) return -kInf;
  return stage_utility(cfg, cfg.u1, a1, theta) + stage_utility(cfg, incentive, a2, theta) - penalty;
}

DeviationReport deviation_search_mh(const ContractConfig& cfg, const IncentiveFunction& u2,
                                    AgentType theta) {
  cfg.validate();
  const double truthful = truthful_action_in_interval(cfg, theta);
  auto objective = [&](double a1) { return cumulative_utility_mh(cfg, a1, u2, theta); };
  const auto xs = first_stage_candidates(cfg, u2, truthful);
  const auto values = numeric::evaluate_all(xs, objective, numeric::resolve_workers(cfg.workers));
  const ScalarMax best = numeric::refine_grid_max(xs, values, objective, cfg.refine_iters);
  return make_report(cfg, theta, truthful, objective(truthful), best);
}

namespace {

struct PairMax {
  double a1 = 0.0;
  double a2 = 0.0;
  double value = -kInf;
};

PairMax better_pair(const PairMax& lhs, const PairMax& rhs) {
  if (rhs.value > lhs.value) return rhs;
  if (rhs.value == lhs.value && (rhs.a1 < lhs.a1 || (rhs.a1 == lhs.a1 && rhs.a2 < lhs.a2))) {
    return rhs;
  }
  return lhs;
}

DeviationReport search_along_curve(const ContractConfig& cfg, const IncentiveFunction& u2,
                                   const AdjustmentFunction& pi, AgentType theta,
                                   double truthful) {
  auto objective = [&](double a1) {
    const auto c = curve_point(cfg, u2, a1);
    if (!c || !cfg.cost.action_domain().contains(*c)) return -kInf;
    return cumulative_utility_adj(cfg, a1, *c, u2, pi, theta);
  };
  const auto xs = first_stage_candidates(cfg, u2, truthful);
  const auto values = numeric::evaluate_all(xs, objective, numeric::resolve_workers(cfg.workers));
  const ScalarMax best = numeric::refine_grid_max(xs, values, objective, cfg.refine_iters);
  auto report = make_report(cfg, theta, truthful, objective(truthful), best);
  report.best_deviation_a2 = consistency_curve(cfg, u2, best.x);
  return report;
}

DeviationReport search_pairs(const ContractConfig& cfg, const IncentiveFunction& u2,
                             const AdjustmentFunction& pi, AgentType theta, double truthful) {
  const auto rows = first_stage_candidates(cfg, u2, truthful);
  const auto cols = numeric::linspace(cfg.a_min, cfg.a_max, cfg.action_grid_size);
  const auto& dom = cfg.cost.action_domain();
  auto value = [&](double a1, double a2) {
    if (!dom.contains(a2)) return -kInf;
    return cumulative_utility_adj(cfg, a1, a2, u2, pi, theta);
  };

  std::vector<PairMax> row_best(rows.size());
  numeric::parallel_for(rows.size(), numeric::resolve_workers(cfg.workers),
                        [&](std::size_t begin, std::size_t end) {
                          for (std::size_t i = begin; i < end; ++i) {
                            const double a1 = rows[i];
                            PairMax best;
                            for (double a2 : cols) best = better_pair(best, {a1, a2, value(a1, a2)});
                            if (const auto c = curve_point(cfg, u2, a1)) {
                              best = better_pair(best, {a1, *c, value(a1, *c)});
                            }
                            row_best[i] = best;
                          }
                        });
  PairMax best;
  for (const auto& b : row_best) best = better_pair(best, b);

  // Coordinate-wise refinement within one grid cell of the best pair.
  const double h = (cfg.a_max - cfg.a_min) / static_cast<double>(cfg.action_grid_size - 1);
  const auto c_best = curve_point(cfg, u2, best.a1);
  const bool on_curve = c_best && pi.on_curve(best.a2, *c_best);
  if (on_curve) {
    auto along = [&](double a1) {
      const auto c = curve_point(cfg, u2, a1);
      return c ? value(a1, *c) : -kInf;
    };
    const auto r = numeric::golden_section_max(along, std::max(cfg.a_min, best.a1 - h),
                                               std::min(cfg.a_max, best.a1 + h), cfg.refine_iters);
    if (const auto c = curve_point(cfg, u2, r.x)) best = better_pair(best, {r.x, *c, r.value});
  } else {
    for (int pass = 0; pass < 4; ++pass) {
      const double a1 = best.a1;
      const auto r2 = numeric::golden_section_max([&](double a2) { return value(a1, a2); },
                                                  std::max(dom.lo, best.a2 - h), best.a2 + h,
                                                  cfg.refine_iters);
      best = better_pair(best, {a1, r2.x, r2.value});
      const double a2 = best.a2;
      const auto r1 = numeric::golden_section_max([&](double x) { return value(x, a2); },
                                                  std::max(cfg.a_min, best.a1 - h),
                                                  std::min(cfg.a_max, best.a1 + h),
                                                  cfg.refine_iters);
      best = better_pair(best, {r1.x, a2, r1.value});
    }
  }

  const double c_truth = consistency_curve(cfg, u2, truthful);
  const double truthful_value = value(truthful, c_truth);
  best = better_pair(best, {truthful, c_truth, truthful_value});
  auto report = make_report(cfg, theta, truthful, truthful_value, {best.a1, best.value});
  report.best_deviation_a2 = best.a2;
  return report;
}

}  // namespace

DeviationReport deviation_search_adj(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const AdjustmentFunction& pi, AgentType theta) {
  cfg.validate();
  const double truthful = truthful_action_in_interval(cfg, theta);
  if (pi.kind == AdjustmentFunction::Kind::ExtremeConsistency) {
    return search_along_curve(cfg, u2, pi, theta, truthful);
  }
  return search_pairs(cfg, u2, pi, theta, truthful);
}

}  // namespace contractforge
