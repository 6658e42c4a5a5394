#pragma once

#include <string>
#include <variant>
#include <vector>

namespace contractforge {

/// Second-stage incentive u2 : A -> U, committed to before the first stage.
class IncentiveFunction {
 public:
  struct Constant {
    double u;
  };
  /// u2(a1) = u_above if a1 >= t, else u_below (right-closed at t).
  struct TwoTypeStep {
    double t;
    double u_above;
    double u_below;
  };
  /// Linear interpolation between knots, held constant outside them.
  struct PiecewiseLinear {
    std::vector<double> knots;
    std::vector<double> values;
  };
  /// Multi-level right-closed step: levels[k] on [thresholds[k-1], thresholds[k]).
  /// levels.size() == thresholds.size() + 1.
  struct Staircase {
    std::vector<double> thresholds;
    std::vector<double> levels;
  };
  using Variant = std::variant<Constant, TwoTypeStep, PiecewiseLinear, Staircase>;

  static IncentiveFunction constant(double u);
  static IncentiveFunction two_type_step(double t, double u_above, double u_below);
  static IncentiveFunction piecewise_linear(std::vector<double> knots, std::vector<double> values);
  static IncentiveFunction staircase(std::vector<double> thresholds, std::vector<double> levels);

  double operator()(double a1) const { return value(a1); }
  double value(double a1) const;
  /// Slope at a1. `from_right` picks the one-sided slope at a knot; away
  /// from knots both sides agree. Steps have zero slope off their jumps.
  double derivative(double a1, bool from_right = true) const;

  /// Points where u2 jumps (step thresholds).
  std::vector<double> discontinuities() const;
  /// Points where u2 is continuous but not differentiable (interior PL knots).
  std::vector<double> kinks() const;
  bool is_constant() const;
  bool is_continuous() const;
  /// Smallest and largest value attained.
  double min_value() const;
  double max_value() const;

  std::string kind() const;
  const Variant& variant() const { return repr_; }

 private:
  explicit IncentiveFunction(Variant v) : repr_(std::move(v)) {}
  Variant repr_;
};

}  // namespace contractforge
