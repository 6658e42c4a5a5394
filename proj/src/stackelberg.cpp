#include "contractforge/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "contractforge/agent.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

namespace {

constexpr double kStationaryTol = 1e-6;

// Golub-Welsch: nodes and first-component weights of a symmetric Jacobi matrix
// with zero diagonal.
std::vector<TypePrior::Node> golub_welsch(const std::vector<double>& off_diagonal) {
  const auto n = static_cast<Eigen::Index>(off_diagonal.size() + 1);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diagonal[static_cast<std::size_t>(k)];
    jacobi(k + 1, k) = off_diagonal[static_cast<std::size_t>(k)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<TypePrior::Node> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    out[static_cast<std::size_t>(i)] = {solver.eigenvalues()(i), v0 * v0};
  }
  return out;
}

}  // namespace

PrincipalBenefit PrincipalBenefit::linear(double slope) {
  if (!std::isfinite(slope)) throw ConfigError("linear benefit needs a finite slope");
  return PrincipalBenefit(Form::Linear, slope, 1.0);
}

PrincipalBenefit PrincipalBenefit::power(double coeff, double exponent) {
  if (!std::isfinite(coeff) || !(exponent > 0.0 && exponent <= 1.0)) {
    throw ConfigError("power benefit needs a finite coefficient and exponent in (0, 1]");
  }
  return PrincipalBenefit(Form::Power, coeff, exponent);
}

PrincipalBenefit PrincipalBenefit::tabulated(std::vector<double> actions,
                                             std::vector<double> values) {
  if (actions.size() != values.size() || actions.size() < 2) {
    throw ConfigError("tabulated benefit needs at least two matching rows");
  }
  for (std::size_t i = 1; i < actions.size(); ++i) {
    if (!(actions[i] > actions[i - 1])) throw ConfigError("tabulated benefit: actions must increase");
  }
  return PrincipalBenefit(Form::Tabulated, 0.0, 0.0, std::move(actions), std::move(values));
}

double PrincipalBenefit::operator()(double a) const {
  switch (form_) {
    case Form::Linear:
      return p0_ * a;
    case Form::Power:
      if (!(a >= 0.0)) throw DomainError("power benefit: negative action");
      return p0_ * std::pow(a, p1_);
    case Form::Tabulated: {
      if (!(a >= xs_.front() && a <= xs_.back())) {
        throw DomainError("tabulated benefit: action outside the table");
      }
      auto it = std::upper_bound(xs_.begin(), xs_.end(), a);
      std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
      i = std::min(i, xs_.size() - 2);
      const double w = (a - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return (1.0 - w) * ys_[i] + w * ys_[i + 1];
    }
  }
  return 0.0;
}

std::string PrincipalBenefit::name() const {
  std::ostringstream os;
  os.precision(12);
  switch (form_) {
    case Form::Linear:
      os << "linear(k=" << p0_ << ")";
      break;
    case Form::Power:
      os << "power(coeff=" << p0_ << ", exponent=" << p1_ << ")";
      break;
    case Form::Tabulated:
      os << "tabulated(" << xs_.size() << " rows)";
      break;
  }
  return os.str();
}

TypePrior::TypePrior(std::vector<Node> support) : support_(std::move(support)) {
  if (support_.empty()) throw ConfigError("type prior needs at least one node");
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!(support_[i].theta > 0.0) || !std::isfinite(support_[i].theta)) {
      throw ConfigError("type prior: thetas must be positive and finite");
    }
    if (!(support_[i].weight > 0.0) || !std::isfinite(support_[i].weight)) {
      throw ConfigError("type prior: weights must be positive and finite");
    }
    if (i > 0 && !(support_[i].theta > support_[i - 1].theta)) {
      throw ConfigError("type prior: thetas must be strictly increasing");
    }
    total += support_[i].weight;
  }
  for (auto& node : support_) node.weight /= total;
}

TypePrior TypePrior::point_mass(double theta) { return TypePrior({{theta, 1.0}}); }

TypePrior TypePrior::uniform(double lo, double hi, std::size_t nodes) {
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("uniform prior needs 0 < lo < hi");
  if (nodes == 0) throw ConfigError("uniform prior needs at least one node");
  std::vector<double> beta(nodes - 1);
  for (std::size_t k = 1; k < nodes; ++k) {
    const double kk = static_cast<double>(k);
    beta[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  auto rule = golub_welsch(beta);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (auto& node : rule) node.theta = mid + half * node.theta;
  return TypePrior(std::move(rule));
}

TypePrior TypePrior::lognormal(double mu, double sigma, std::size_t nodes) {
  if (!std::isfinite(mu) || !(sigma > 0.0)) throw ConfigError("lognormal prior needs sigma > 0");
  if (nodes == 0) throw ConfigError("lognormal prior needs at least one node");
  std::vector<double> beta(nodes - 1);
  for (std::size_t k = 1; k < nodes; ++k) beta[k - 1] = std::sqrt(static_cast<double>(k));
  auto rule = golub_welsch(beta);
  for (auto& node : rule) node.theta = std::exp(mu + sigma * node.theta);
  std::erase_if(rule, [](const Node& n) { return !(n.weight > 0.0); });
  return TypePrior(std::move(rule));
}

double principal_utility(const PrincipalBenefit& rho, double u, double a) {
  return rho(a) - u * a;
}

StackelbergSolution solve_complete_info(const ContractConfig& cfg, const PrincipalBenefit& rho,
                                        AgentType theta) {
  cfg.validate();
  const double t = theta.theta();
  auto objective = [&](double a) { return rho(a) - t * a * cfg.cost.eval_deriv(a); };
  const auto xs = numeric::linspace(cfg.a_min, cfg.a_max, cfg.action_grid_size);
  const auto values = numeric::evaluate_all(xs, objective, numeric::resolve_workers(cfg.workers));
  const auto best = numeric::refine_grid_max(xs, values, objective, cfg.refine_iters);

  StackelbergSolution sol;
  sol.a_e = best.x;
  sol.u_e = t * cfg.cost.eval_deriv(best.x);
  sol.value = best.value;
  sol.a_min = cfg.a_min;
  sol.a_max = cfg.a_max;
  sol.grid_size = cfg.action_grid_size;

  const double h = (cfg.a_max - cfg.a_min) / static_cast<double>(cfg.action_grid_size - 1);
  const bool at_lo = best.x - cfg.a_min < 1e-3 * h;
  const bool at_hi = cfg.a_max - best.x < 1e-3 * h;
  if (at_lo || at_hi) {
    const double step = 1e-6 * std::max(1.0, best.x);
    const double slope = at_lo ? (objective(cfg.a_min + step) - objective(cfg.a_min)) / step
                               : (objective(cfg.a_max) - objective(cfg.a_max - step)) / step;
    if (std::abs(slope) > kStationaryTol * std::max(1.0, std::abs(best.value))) {
      throw ConfigError("complete-information maximiser lies on the working-interval boundary "
                        "a=" + std::to_string(best.x) + "; widen the interval");
    }
    sol.boundary_flag = true;
  }
  return sol;
}

double ex_ante_objective(const ContractConfig& cfg, const PrincipalBenefit& rho,
                         const TypePrior& prior, double u) {
  double total = 0.0;
  for (const auto& node : prior.support()) {
    const double a = best_response(cfg, u, AgentType(node.theta));
    total += node.weight * principal_utility(rho, u, a);
  }
  return total;
}

ExAnteSolution solve_ex_ante(const ContractConfig& cfg, const PrincipalBenefit& rho,
                             const TypePrior& prior) {
  cfg.validate();
  const auto U = cfg.cost.incentive_domain();
  double lo = prior.theta_min() * cfg.cost.eval_deriv(cfg.a_min);
  double hi = prior.theta_max() * cfg.cost.eval_deriv(cfg.a_max);
  // Every type's incentive ratio u/theta must stay inside U.
  lo = std::max(lo, U.lo * prior.theta_max());
  hi = std::min(hi, U.hi * prior.theta_min());
  if (U.lo_open && lo <= U.lo * prior.theta_max()) lo = std::nextafter(lo, numeric::kInf);
  if (!(hi > lo)) throw ConfigError("ex-ante problem: empty feasible incentive range");

  auto objective = [&](double u) { return ex_ante_objective(cfg, rho, prior, u); };
  const auto us = numeric::linspace(lo, hi, cfg.action_grid_size);
  const auto values = numeric::evaluate_all(us, objective, numeric::resolve_workers(cfg.workers));
  const auto best = numeric::refine_grid_max(us, values, objective, cfg.refine_iters);

  ExAnteSolution sol;
  sol.u_star = best.x;
  sol.value = best.value;
  sol.u_lo = lo;
  sol.u_hi = hi;
  sol.grid_size = cfg.action_grid_size;
  const double h = (hi - lo) / static_cast<double>(cfg.action_grid_size - 1);
  sol.boundary_flag = best.x - lo < 1e-3 * h || hi - best.x < 1e-3 * h;
  return sol;
}

}  // namespace contractforge
