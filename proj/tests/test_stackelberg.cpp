#include <doctest.h>

#include <cmath>

#include "contractforge/agent.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/stackelberg.hpp"
#include "oracles.hpp"

using namespace contractforge;

TEST_CASE("principal utility") {
  CHECK(principal_utility(PrincipalBenefit::linear(1.0), 0.5, 0.5) == doctest::Approx(0.25));
  CHECK(principal_utility(PrincipalBenefit::linear(2.0), 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(principal_utility(PrincipalBenefit::power(2.0, 0.5), 0.0, 4.0) == doctest::Approx(4.0));
}

TEST_CASE("complete information closed form for linear benefit") {
  const ContractConfig cfg(1.0, CostModel::quadratic());
  for (double k : {1.0, 2.0}) {
    for (double theta : {0.5, 1.0, 2.0, 4.0}) {
      const auto s = solve_complete_info(cfg, PrincipalBenefit::linear(k), AgentType(theta));
      CHECK(std::abs(s.a_e - k / (2 * theta)) <= 1e-6);
      CHECK(std::abs(s.u_e - k / 2) <= 1e-6);
      CHECK(s.value == doctest::Approx(k * k / (4 * theta)).epsilon(1e-9));
      CHECK(std::abs(best_response(cfg, s.u_e, AgentType(theta)) - s.a_e) <= 1e-8);
      CHECK_FALSE(s.boundary_flag);
    }
  }
}

TEST_CASE("complete information with a concave benefit matches a brute-force oracle") {
  const ContractConfig cfg(1.0, CostModel::power(1.5));
  const auto rho = PrincipalBenefit::power(2.0, 0.5);
  for (double theta : {0.5, 2.0}) {
    const auto s = solve_complete_info(cfg, rho, AgentType(theta));
    const auto best = oracle::argmax(
        [&](double a) { return rho(a) - theta * a * cfg.cost.eval_deriv(a); }, cfg.a_min, cfg.a_max);
    CHECK(s.a_e == doctest::Approx(best.first).epsilon(1e-6));
    CHECK(s.value == doctest::Approx(best.second).epsilon(1e-9));
  }
}

TEST_CASE("priors") {
  const auto u = TypePrior::uniform(1.0, 2.0);
  double w = 0.0;
  double mean = 0.0;
  for (const auto& n : u.support()) {
    w += n.weight;
    mean += n.weight * n.theta;
  }
  CHECK(u.support().size() == 33);
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-12));
  const auto ln = TypePrior::lognormal(0.0, 0.5, 21);
  double m = 0.0;
  for (const auto& n : ln.support()) m += n.weight * n.theta;
  CHECK(m == doctest::Approx(std::exp(0.125)).epsilon(1e-8));
  CHECK_THROWS(TypePrior({{2.0, 0.5}, {1.0, 0.5}}));
}

TEST_CASE("ex-ante optimum") {
  const ContractConfig cfg(1.0, CostModel::quadratic());
  const auto rho = PrincipalBenefit::linear(1.0);
  const auto pm = solve_ex_ante(cfg, rho, TypePrior::point_mass(2.0));
  CHECK(pm.u_star == doctest::Approx(solve_complete_info(cfg, rho, AgentType(2.0)).u_e).epsilon(1e-6));

  const TypePrior two({{1.0, 0.5}, {2.0, 0.5}});
  const auto s = solve_ex_ante(cfg, rho, two);
  CHECK(std::abs(s.u_star - 0.5) <= 1e-6);
  const double per_type = 0.5 * solve_complete_info(cfg, rho, AgentType(1.0)).value +
                          0.5 * solve_complete_info(cfg, rho, AgentType(2.0)).value;
  CHECK(s.value <= per_type + 1e-9);
  for (double u = 0.05; u < 3.0; u += 0.05) CHECK(s.value >= ex_ante_objective(cfg, rho, two, u) - 1e-12);
}
