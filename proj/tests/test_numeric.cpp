#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

using namespace contractforge;

TEST_CASE("linspace and logspace hit both ends") {
  const auto xs = numeric::linspace(1.0, 3.0, 5);
  REQUIRE(xs.size() == 5);
  CHECK(xs.front() == 1.0);
  CHECK(xs.back() == 3.0);
  CHECK(xs[2] == doctest::Approx(2.0));
  const auto ls = numeric::logspace(1e-3, 10.0, 9);
  CHECK(ls.front() == 1e-3);
  CHECK(ls.back() == 10.0);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i] > ls[i - 1]);
}

TEST_CASE("golden section finds a concave maximum") {
  const auto r = numeric::golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0, 1, 200);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(r.value <= 0.0);
}

TEST_CASE("bisection inverts an increasing map") {
  const double x = numeric::bisect_increasing([](double v) { return v * v * v; }, 8.0, 0.0, 10.0);
  CHECK(x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(numeric::bisect_increasing([](double v) { return v; }, 20.0, 0.0, 10.0),
                  ConvergenceError);
}

TEST_CASE("simpson is exact on cubics") {
  CHECK(numeric::simpson([](double x) { return x * x * x - x; }, 0.0, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("parallel_for covers every index once for any worker count") {
  for (std::size_t workers : {1u, 2u, 3u, 8u, 64u}) {
    std::vector<int> hits(101, 0);
    numeric::parallel_for(hits.size(), workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i] += 1;
    });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 101);
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
  }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(numeric::parallel_for(100, 4,
                                        [](std::size_t b, std::size_t) {
                                          if (b > 0) throw std::runtime_error("boom");
                                        }),
                  std::runtime_error);
}

TEST_CASE("grid maximum refinement prefers the smallest x on ties") {
  const auto xs = numeric::linspace(-1.0, 1.0, 201);
  auto f = [](double x) { return -std::abs(std::abs(x) - 0.5); };
  std::vector<double> vs;
  for (double x : xs) vs.push_back(f(x));
  const auto r = numeric::refine_grid_max(xs, vs, f, 100);
  CHECK(r.x == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("resolve_workers honours explicit requests") {
  CHECK(numeric::resolve_workers(3) == 3);
  CHECK(numeric::resolve_workers(0) >= 1);
}
