#include "contractforge/incentive.hpp"

#include <algorithm>
#include <cmath>

#include "contractforge/errors.hpp"

namespace contractforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double u, const char* what) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw DomainError(std::string(what) + ": incentive values must be positive and finite");
  }
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw ConfigError(std::string(what) + ": non-finite abscissa");
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw ConfigError(std::string(what) + ": abscissae must be strictly increasing");
    }
  }
}

}  // namespace

IncentiveFunction IncentiveFunction::constant(double u) {
  require_positive(u, "constant incentive");
  return IncentiveFunction(Constant{u});
}

IncentiveFunction IncentiveFunction::two_type_step(double t, double u_above, double u_below) {
  if (!std::isfinite(t)) throw ConfigError("step incentive: threshold must be finite");
  require_positive(u_above, "step incentive");
  require_positive(u_below, "step incentive");
  return IncentiveFunction(TwoTypeStep{t, u_above, u_below});
}

IncentiveFunction IncentiveFunction::piecewise_linear(std::vector<double> knots,
                                                      std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty()) {
    throw ConfigError("piecewise-linear incentive: need matching, non-empty knots and values");
  }
  require_increasing(knots, "piecewise-linear incentive");
  for (double v : values) require_positive(v, "piecewise-linear incentive");
  return IncentiveFunction(PiecewiseLinear{std::move(knots), std::move(values)});
}

IncentiveFunction IncentiveFunction::staircase(std::vector<double> thresholds,
                                               std::vector<double> levels) {
  if (levels.size() != thresholds.size() + 1) {
    throw ConfigError("staircase incentive: need one more level than thresholds");
  }
  require_increasing(thresholds, "staircase incentive");
  for (double v : levels) require_positive(v, "staircase incentive");
  return IncentiveFunction(Staircase{std::move(thresholds), std::move(levels)});
}

double IncentiveFunction::value(double a1) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.u; },
          [a1](const TwoTypeStep& s) { return a1 >= s.t ? s.u_above : s.u_below; },
          [a1](const PiecewiseLinear& p) {
            if (a1 <= p.knots.front()) return p.values.front();
            if (a1 >= p.knots.back()) return p.values.back();
            const auto it = std::upper_bound(p.knots.begin(), p.knots.end(), a1);
            const std::size_t i = static_cast<std::size_t>(it - p.knots.begin()) - 1;
            const double w = (a1 - p.knots[i]) / (p.knots[i + 1] - p.knots[i]);
            return (1.0 - w) * p.values[i] + w * p.values[i + 1];
          },
          [a1](const Staircase& s) {
            const auto it = std::upper_bound(s.thresholds.begin(), s.thresholds.end(), a1);
            return s.levels[static_cast<std::size_t>(it - s.thresholds.begin())];
          },
      },
      repr_);
}

double IncentiveFunction::derivative(double a1, bool from_right) const {
  const auto* p = std::get_if<PiecewiseLinear>(&repr_);
  if (p == nullptr || p->knots.size() < 2) return 0.0;
  const auto& k = p->knots;
  if (a1 < k.front() || a1 > k.back()) return 0.0;
  if (from_right && a1 == k.back()) return 0.0;
  if (!from_right && a1 == k.front()) return 0.0;
  std::size_t i = 0;
  if (from_right) {
    i = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), a1) - k.begin()) - 1;
  } else {
    i = static_cast<std::size_t>(std::lower_bound(k.begin(), k.end(), a1) - k.begin()) - 1;
  }
  return (p->values[i + 1] - p->values[i]) / (k[i + 1] - k[i]);
}

std::vector<double> IncentiveFunction::discontinuities() const {
  if (const auto* s = std::get_if<TwoTypeStep>(&repr_)) {
    if (s->u_above != s->u_below) return {s->t};
    return {};
  }
  if (const auto* s = std::get_if<Staircase>(&repr_)) {
    std::vector<double> out;
    for (std::size_t i = 0; i < s->thresholds.size(); ++i) {
      if (s->levels[i] != s->levels[i + 1]) out.push_back(s->thresholds[i]);
    }
    return out;
  }
  return {};
}

std::vector<double> IncentiveFunction::kinks() const {
  const auto* p = std::get_if<PiecewiseLinear>(&repr_);
  if (p == nullptr) return {};
  return p->knots;
}

bool IncentiveFunction::is_constant() const { return min_value() == max_value(); }

bool IncentiveFunction::is_continuous() const { return discontinuities().empty(); }

double IncentiveFunction::min_value() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.u; },
                        [](const TwoTypeStep& s) { return std::min(s.u_above, s.u_below); },
                        [](const PiecewiseLinear& p) {
                          return *std::min_element(p.values.begin(), p.values.end());
                        },
                        [](const Staircase& s) {
                          return *std::min_element(s.levels.begin(), s.levels.end());
                        },
                    },
                    repr_);
}

double IncentiveFunction::max_value() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.u; },
                        [](const TwoTypeStep& s) { return std::max(s.u_above, s.u_below); },
                        [](const PiecewiseLinear& p) {
                          return *std::max_element(p.values.begin(), p.values.end());
                        },
                        [](const Staircase& s) {
                          return *std::max_element(s.levels.begin(), s.levels.end());
                        },
                    },
                    repr_);
}

std::string IncentiveFunction::kind() const {
  return std::visit(overloaded{
                        [](const Constant&) { return std::string("constant"); },
                        [](const TwoTypeStep&) { return std::string("step"); },
                        [](const PiecewiseLinear&) { return std::string("piecewise_linear"); },
                        [](const Staircase&) { return std::string("staircase"); },
                    },
                    repr_);
}

}  // namespace contractforge
