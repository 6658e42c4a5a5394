#pragma once

#include <string>
#include <utility>
#include <vector>

#include "contractforge/contract.hpp"

namespace contractforge {

/// Principal's benefit rho(a) from the agent's effort.
class PrincipalBenefit {
 public:
  static PrincipalBenefit linear(double slope);
  /// coeff * a^exponent with exponent in (0, 1].
  static PrincipalBenefit power(double coeff, double exponent);
  /// Piecewise-linear through (a_i, rho_i); undefined outside the table.
  static PrincipalBenefit tabulated(std::vector<double> actions, std::vector<double> values);

  double operator()(double a) const;
  std::string name() const;

 private:
  enum class Form { Linear, Power, Tabulated };
  PrincipalBenefit(Form form, double p0, double p1, std::vector<double> xs = {},
                   std::vector<double> ys = {})
      : form_(form), p0_(p0), p1_(p1), xs_(std::move(xs)), ys_(std::move(ys)) {}

  Form form_;
  double p0_;
  double p1_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Discrete prior over agent types (quadrature nodes for continuous priors).
class TypePrior {
 public:
  struct Node {
    double theta;
    double weight;
  };

  /// Weights are normalised to sum to one; thetas must strictly increase.
  explicit TypePrior(std::vector<Node> support);
  static TypePrior point_mass(double theta);
  /// Gauss-Legendre nodes for the uniform density on [lo, hi].
  static TypePrior uniform(double lo, double hi, std::size_t nodes = 33);
  /// Gauss-Hermite nodes for log(theta) ~ N(mu, sigma^2).
  static TypePrior lognormal(double mu, double sigma, std::size_t nodes = 33);

  const std::vector<Node>& support() const { return support_; }
  double theta_min() const { return support_.front().theta; }
  double theta_max() const { return support_.back().theta; }

 private:
  std::vector<Node> support_;
};

/// rho(a) - u a
double principal_utility(const PrincipalBenefit& rho, double u, double a);

struct StackelbergSolution {
  double u_e = 0.0;
  double a_e = 0.0;
  double value = 0.0;
  /// Set when the maximiser sits on the working-interval boundary but the
  /// objective is stationary there to within 1e-6.
  bool boundary_flag = false;
  double a_min = 0.0;
  double a_max = 0.0;
  std::size_t grid_size = 0;
};

/// Complete-information equilibrium: maximise rho(a) - theta a phi'(a) over the
/// working interval, then u_e = theta phi'(a_e). Throws ConfigError when the
/// maximiser is pinned to the boundary with a non-vanishing slope.
StackelbergSolution solve_complete_info(const ContractConfig& cfg, const PrincipalBenefit& rho,
                                        AgentType theta);

struct ExAnteSolution {
  double u_star = 0.0;
  double value = 0.0;
  bool boundary_flag = false;
  double u_lo = 0.0;
  double u_hi = 0.0;
  std::size_t grid_size = 0;
};

/// Expected principal utility E[rho(a_theta(u)) - u a_theta(u)] for one u.
double ex_ante_objective(const ContractConfig& cfg, const PrincipalBenefit& rho,
                         const TypePrior& prior, double u);

/// Maximises the expected utility over u in
/// [theta_min phi'(a_min), theta_max phi'(a_max)] intersected with U.
ExAnteSolution solve_ex_ante(const ContractConfig& cfg, const PrincipalBenefit& rho,
                             const TypePrior& prior);

}  // namespace contractforge
