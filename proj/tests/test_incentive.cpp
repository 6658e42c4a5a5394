#include <doctest.h>

#include <cmath>

#include "contractforge/errors.hpp"
#include "contractforge/incentive.hpp"

using namespace contractforge;

TEST_CASE("constant incentive") {
  const auto u = IncentiveFunction::constant(1.5);
  CHECK(u(0.1) == 1.5);
  CHECK(u.derivative(3.0) == 0.0);
  CHECK(u.is_constant());
  CHECK(u.is_continuous());
  CHECK(u.discontinuities().empty());
  CHECK_THROWS_AS(IncentiveFunction::constant(0.0), DomainError);
}

TEST_CASE("two-type step is right-closed") {
  const auto u = IncentiveFunction::two_type_step(1.0, 1.2, 1.0);
  CHECK(u(1.0) == 1.2);
  CHECK(u(std::nextafter(1.0, 0.0)) == 1.0);
  CHECK(u(0.5) == 1.0);
  CHECK_FALSE(u.is_continuous());
  REQUIRE(u.discontinuities().size() == 1);
  CHECK(u.discontinuities()[0] == 1.0);
  CHECK(u.min_value() == 1.0);
  CHECK(u.max_value() == 1.2);
  CHECK(IncentiveFunction::two_type_step(1.0, 1.0, 1.0).is_constant());
}

TEST_CASE("piecewise linear interpolation and clamping") {
  const auto u = IncentiveFunction::piecewise_linear({1.0, 2.0, 4.0}, {1.0, 3.0, 2.0});
  CHECK(u(1.5) == doctest::Approx(2.0));
  CHECK(u(3.0) == doctest::Approx(2.5));
  CHECK(u(0.5) == 1.0);
  CHECK(u(9.0) == 2.0);
  CHECK(u.derivative(1.5) == doctest::Approx(2.0));
  CHECK(u.derivative(2.0, true) == doctest::Approx(-0.5));
  CHECK(u.derivative(2.0, false) == doctest::Approx(2.0));
  CHECK(u.derivative(0.5) == 0.0);
  CHECK(u.kinks().size() == 3);
  CHECK(u.is_continuous());
  CHECK_FALSE(u.is_constant());
  CHECK_THROWS_AS(IncentiveFunction::piecewise_linear({1.0, 1.0}, {1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(IncentiveFunction::piecewise_linear({1.0, 2.0}, {1.0, -2.0}), DomainError);
}

TEST_CASE("staircase levels") {
  const auto u = IncentiveFunction::staircase({1.0, 2.0}, {1.0, 1.5, 2.0});
  CHECK(u(0.5) == 1.0);
  CHECK(u(1.0) == 1.5);
  CHECK(u(2.5) == 2.0);
  CHECK(u.discontinuities().size() == 2);
  CHECK_THROWS(IncentiveFunction::staircase({1.0, 2.0}, {1.0, 1.5}));
}
