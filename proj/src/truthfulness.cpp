#include "contractforge/truthfulness.hpp"

#include <algorithm>
#include <cmath>

#include "contractforge/agent.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

namespace {

struct PairWorst {
  double a = 0.0;
  double a_hat = 0.0;
  double margin = 0.0;
  double gain = -numeric::kInf;
};

PairWorst worse(const PairWorst& lhs, const PairWorst& rhs) {
  if (rhs.gain > lhs.gain) return rhs;
  if (rhs.gain == lhs.gain && (rhs.a < lhs.a || (rhs.a == lhs.a && rhs.a_hat < lhs.a_hat))) {
    return rhs;
  }
  return lhs;
}

}  // namespace

std::vector<double> bregman_grid(const ContractConfig& cfg, std::size_t n) {
  return numeric::logspace(cfg.a_min, cfg.a_max, n);
}

BregmanReport check_bregman_truthful(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const std::vector<double>& grid) {
  return check_bregman_truthful(cfg, u2, grid, grid);
}

BregmanReport check_bregman_truthful(const ContractConfig& cfg, const IncentiveFunction& u2,
                                     const std::vector<double>& anchors,
                                     const std::vector<double>& deviations) {
  cfg.validate();
  if (anchors.empty() || deviations.empty()) throw ConfigError("Bregman check needs a grid");
  const auto& phi = cfg.cost;
  std::vector<double> u2_dev(deviations.size());
  for (std::size_t j = 0; j < deviations.size(); ++j) u2_dev[j] = u2(deviations[j]);

  std::vector<PairWorst> row_worst(anchors.size());
  numeric::parallel_for(
      anchors.size(), numeric::resolve_workers(cfg.workers),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const double a = anchors[i];
          const double slope = phi.eval_deriv(a);
          if (!(slope > 0.0)) throw DomainError("Bregman check needs phi'(a) > 0 on the grid");
          const double ratio = slope / cfg.u1;
          const double own = phi.conjugate(u2(a) * ratio);
          const double type_scale = cfg.u1 / slope;  // theta of the anchor
          PairWorst worst;
          for (std::size_t j = 0; j < deviations.size(); ++j) {
            const double a_hat = deviations[j];
            const double margin = phi.bregman(a_hat, a) - (phi.conjugate(u2_dev[j] * ratio) - own);
            worst = worse(worst, {a, a_hat, margin, -margin * type_scale});
          }
          row_worst[i] = worst;
        }
      });
  PairWorst worst;
  for (const auto& w : row_worst) worst = worse(worst, w);

  BregmanReport r;
  r.worst_a = worst.a;
  r.worst_a_hat = worst.a_hat;
  r.worst_margin = worst.margin;
  r.worst_gain = worst.gain;
  r.truthful = worst.gain <= cfg.gain_tolerance;
  r.anchor_count = anchors.size();
  r.deviation_count = deviations.size();
  r.tolerance = cfg.gain_tolerance;
  r.a_min = cfg.a_min;
  r.a_max = cfg.a_max;
  return r;
}

std::pair<double, double> step_threshold_range(const ContractConfig& cfg, AgentType theta_L,
                                               AgentType theta_H) {
  if (theta_L.theta() > theta_H.theta()) throw ConfigError("step threshold: need theta_L <= theta_H");
  return {cfg.cost.inv_deriv(cfg.u1 / theta_H.theta()), cfg.cost.inv_deriv(cfg.u1 / theta_L.theta())};
}

double StepFeasibility::binding_theta() const {
  return direction == StepDirection::LowGetsMore ? theta_H : theta_L;
}

double StepFeasibility::lhs(double u_L, double u_H) const {
  const double theta = binding_theta();
  const double big = direction == StepDirection::LowGetsMore ? u_L : u_H;
  const double small = direction == StepDirection::LowGetsMore ? u_H : u_L;
  return cost.conjugate(big / theta) - cost.conjugate(small / theta);
}

bool StepFeasibility::admits(double u_L, double u_H) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(rhs_bound));
  return lhs(u_L, u_H) <= rhs_bound + slack;
}

double StepFeasibility::boundary_incentive(double u_small) const {
  const double theta = binding_theta();
  const double target = rhs_bound + cost.conjugate(u_small / theta);
  auto conj = [this, theta](double u) { return cost.conjugate(u / theta); };
  const double u_cap = cost.incentive_domain().hi * theta;
  double hi = std::max(2.0 * u_small, u_small + 1.0);
  while (conj(std::min(hi, u_cap)) < target) {
    if (hi >= u_cap) return u_cap;
    hi *= 2.0;
  }
  hi = std::min(hi, u_cap);
  return numeric::bisect_increasing(conj, target, u_small, hi, 1e-15, 2000);
}

StepFeasibility step_feasibility(const ContractConfig& cfg, AgentType theta_L, AgentType theta_H,
                                 double t, StepDirection direction) {
  const auto [t_min, t_max] = step_threshold_range(cfg, theta_L, theta_H);
  const double slack = 1e-12 * std::max(1.0, t_max);
  if (t < t_min - slack || t > t_max + slack) {
    throw RangeError("step threshold t=" + std::to_string(t) + " outside [" +
                     std::to_string(t_min) + ", " + std::to_string(t_max) + "]");
  }
  StepFeasibility s;
  s.t = t;
  s.direction = direction;
  s.theta_L = theta_L.theta();
  s.theta_H = theta_H.theta();
  s.u1 = cfg.u1;
  s.cost = cfg.cost;
  const double theta = s.binding_theta();
  s.rhs_bound = cfg.cost.eval_cost(t) + cfg.cost.conjugate(cfg.u1 / theta) - cfg.u1 * t / theta;
  // Fenchel-Young makes the bound non-negative; clear rounding noise.
  if (s.rhs_bound < 0.0 && s.rhs_bound > -1e-14 * std::max(1.0, cfg.u1 * t / theta)) {
    s.rhs_bound = 0.0;
  }
  return s;
}

StepDesign design_step(const ContractConfig& cfg, AgentType theta_L, AgentType theta_H, double u_L,
                       double u_H) {
  if (!(theta_L.theta() < theta_H.theta())) throw ConfigError("design_step needs theta_L < theta_H");
  StepDesign d;
  d.requested_u_L = u_L;
  d.requested_u_H = u_H;
  if (u_L == u_H) {
    d.feasible = true;
    d.incentive = IncentiveFunction::constant(u_L);
    return d;
  }
  const auto [t_min, t_max] = step_threshold_range(cfg, theta_L, theta_H);
  const auto direction = u_L > u_H ? StepDirection::LowGetsMore : StepDirection::HighGetsMore;
  const double t = direction == StepDirection::LowGetsMore
                       ? t_max
                       : t_min + kHighGetsMoreOffset * (t_max - t_min);
  d.feasibility = step_feasibility(cfg, theta_L, theta_H, t, direction);
  d.feasible = d.feasibility->admits(u_L, u_H);
  if (d.feasible) {
    d.incentive = IncentiveFunction::two_type_step(t, u_L, u_H);
  } else {
    const double small = std::min(u_L, u_H);
    d.max_feasible_incentive = d.feasibility->boundary_incentive(small);
    d.max_feasible_gap = *d.max_feasible_incentive - small;
  }
  return d;
}

PairwiseStepCheck check_staircase_pairwise(const ContractConfig& cfg,
                                           const std::vector<double>& thetas,
                                           const IncentiveFunction& staircase) {
  const auto* stairs = std::get_if<IncentiveFunction::Staircase>(&staircase.variant());
  if (stairs == nullptr) throw ConfigError("pairwise step check expects a staircase incentive");
  if (thetas.size() < 2) throw ConfigError("pairwise step check needs at least two types");
  PairwiseStepCheck out;
  for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
    const AgentType low(thetas[i]);
    const AgentType high(thetas[i + 1]);
    if (!(low.theta() < high.theta())) throw ConfigError("types must be strictly increasing");
    const auto [t_min, t_max] = step_threshold_range(cfg, low, high);
    const auto& th = stairs->thresholds;
    const auto it = std::find_if(th.begin(), th.end(),
                                 [&](double t) { return t > t_min && t <= t_max; });
    if (it == th.end() || std::count_if(th.begin(), th.end(), [&](double t) {
                            return t > t_min && t <= t_max;
                          }) != 1) {
      throw ConfigError("staircase needs exactly one threshold between adjacent truthful actions");
    }
    const double u_L = staircase(t_max);
    const double u_H = staircase(t_min);
    const auto direction = u_L >= u_H ? StepDirection::LowGetsMore : StepDirection::HighGetsMore;
    auto s = step_feasibility(cfg, low, high, *it, direction);
    const bool ok = s.admits(u_L, u_H);
    out.pairs.push_back(std::move(s));
    out.pair_admits.push_back(ok);
    out.pairwise_necessary = out.pairwise_necessary && ok;
  }
  return out;
}

}  // namespace contractforge
