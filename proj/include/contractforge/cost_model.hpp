#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace contractforge {

/// Real interval with optionally open ends; `hi` may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const {
    if (!(x == x)) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }
};

enum class CostFamily { Quadratic, Power, Tabulated };

/// Strictly convex, differentiable effort cost phi together with the calculus
/// the contract solvers need: phi', (phi')^-1, phi'', the convex conjugate
/// phi* and the Bregman divergence.
///
/// Analytic families live on A = U = (0, inf). Functions of the action also
/// accept the boundary point a = 0, where phi and phi' extend continuously.
///
/// The tabulated family is built from samples (a_i, phi_i). Node slopes d_i
/// come from three-point finite differences (exact for quadratics), phi' is
/// the piecewise-linear interpolant of the d_i, and phi is its integral
/// anchored at phi_0. phi and phi' are therefore an exact derivative pair, and
/// the model is strictly convex exactly when the d_i increase.
///
/// Copies are cheap; the table is shared and immutable.
class CostModel {
 public:
  static CostModel quadratic();
  static CostModel power(double p);
  static CostModel tabulated(std::vector<double> actions, std::vector<double> costs);
  /// Two-column CSV with header `a,phi`, at least 16 rows, strictly
  /// increasing first column.
  static CostModel from_csv(const std::filesystem::path& path);

  CostFamily family() const;
  /// Exponent p (2 for Quadratic); NaN for Tabulated.
  double exponent() const;
  std::string name() const;

  Interval action_domain() const;
  Interval incentive_domain() const;

  double eval_cost(double a) const;
  double eval_deriv(double a) const;
  double eval_second_deriv(double a) const;
  double inv_deriv(double u) const;
  double conjugate(double u) const;
  /// phi(x) - phi(y) - phi'(y) (x - y).
  double bregman(double x, double y) const;

  /// Node abscissae and slopes of the tabulated family (empty otherwise).
  const std::vector<double>& table_actions() const;
  const std::vector<double>& table_slopes() const;

 private:
  struct Analytic {
    double p = 2.0;
  };
  struct Table {
    std::vector<double> a;
    std::vector<double> phi;    // integrated values at the nodes
    std::vector<double> slope;  // phi' at the nodes
  };
  using Repr = std::variant<Analytic, std::shared_ptr<const Table>>;

  CostModel(CostFamily family, Repr repr) : family_(family), repr_(std::move(repr)) {}

  void require_action(double a, const char* op) const;
  void require_incentive(double u, const char* op) const;
  const Table& table() const;
  std::size_t cell(double a) const;

  CostFamily family_;
  Repr repr_;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double worst_violation = 0.0;
  std::string detail;
};

/// Numerical audit of strict convexity and the calculus identities.
struct ValidationReport {
  std::string cost;
  std::size_t sample_count = 0;
  Interval sampled_actions;
  std::uint64_t seed = 0;
  std::vector<ValidationCheck> checks;

  bool passed() const;
};

/// Samples the action domain (log-spaced on the default working interval for
/// analytic families, the table range for tabulated costs) and checks
/// monotonicity of phi', inverse round trips and Fenchel-Young at random
/// (a, u) pairs. Requires sample_count >= 3.
ValidationReport validate(const CostModel& model, std::size_t sample_count,
                          std::uint64_t seed = 20240601);

}  // namespace contractforge
