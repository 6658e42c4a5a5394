#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "contractforge/contract.hpp"
#include "contractforge/incentive.hpp"

namespace contractforge {

/// Tabulated on-curve fee f(a1), normalised so that f(anchor) = 0.
///
/// Interpolation is cubic Hermite on node values and node slopes. Slopes may
/// differ on the two sides of a node (kinks of a piecewise-linear u2).
class FeeTable {
 public:
  FeeTable(std::vector<double> nodes, std::vector<double> values, std::vector<double> slope_left,
           std::vector<double> slope_right, double anchor);

  /// f = 0 on [lo, hi].
  static FeeTable zero(double lo, double hi);
  /// Reads the `a1,f` CSV; node slopes are rebuilt by three-point differences.
  static FeeTable from_csv(const std::filesystem::path& path, std::optional<double> anchor = {});
  void write_csv(const std::filesystem::path& path) const;

  double operator()(double a1) const { return value(a1); }
  double value(double a1) const;
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  double anchor() const { return anchor_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double max_abs() const;
  static constexpr const char* kInterpolation = "cubic_hermite";

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slope_left_;
  std::vector<double> slope_right_;
  double anchor_;
};

inline constexpr double kDefaultConsistencyTol = 1e-6;

/// End-of-game transfer pi(a1, a2) charged to the agent.
///
/// On the consistency band |a2 - c(a1)| <= tol * (1 + |c(a1)|) the agent
/// pays the fee f(a1); off it he pays +inf (ExtremeConsistency) or a finite
/// cap M (FinitePenalty).
struct AdjustmentFunction {
  enum class Kind { ExtremeConsistency, FinitePenalty };

  static AdjustmentFunction extreme(FeeTable fee, double consistency_tol = kDefaultConsistencyTol);
  static AdjustmentFunction finite(FeeTable fee, double cap,
                                   double consistency_tol = kDefaultConsistencyTol);

  Kind kind;
  FeeTable fee;
  double consistency_tol;
  double cap;

  bool on_curve(double a2, double curve_point) const;
  /// pi(a1, a2) given c(a1); +inf off the curve for the extreme kind.
  double evaluate(double a1, double a2, double curve_point) const;
  std::string kind_name() const;
};

/// c(a1) = (phi')^-1(u2(a1) phi'(a1) / u1).
double consistency_curve(const ContractConfig& cfg, const IncentiveFunction& u2, double a1);
/// dc/da1 from the implicit relation phi'(c) u1 = u2 phi'(a1).
double consistency_curve_slope(const ContractConfig& cfg, const IncentiveFunction& u2, double a1,
                               bool from_right = true);
/// g(a1) = u2(a1) c(a1).
double second_stage_revenue(const ContractConfig& cfg, const IncentiveFunction& u2, double a1);
/// Right-hand side of the fee ODE: g'(a1) - u1 (phi o c)'(a1) / phi'(a1).
double fee_derivative(const ContractConfig& cfg, const IncentiveFunction& u2, double a1,
                      bool from_right = true);

struct FeeBuildOptions {
  /// Anchor with f(a_ref) = 0; defaults to the working-interval midpoint.
  std::optional<double> a_ref;
  /// Uniform node count over the working interval; defaults to the
  /// configuration's action grid size.
  std::optional<std::size_t> nodes;
  double consistency_tol = kDefaultConsistencyTol;
};

/// Integrates the fee ODE (composite Simpson per cell, split at the anchor
/// and at knots of u2) and returns the extreme-consistency adjustment that
/// makes (u2, pi) truthful.
AdjustmentFunction build_truthful_adjustment(const ContractConfig& cfg, const IncentiveFunction& u2,
                                             const FeeBuildOptions& options = {});

struct AdjustmentCheck {
  double theta = 0.0;
  double truthful_action = 0.0;
  double worst_a_hat = 0.0;
  /// min over a_hat of [f(a_hat) - f(a)] - [rhs of the truthfulness inequality]
  double worst_margin = 0.0;
  double search_gain = 0.0;
  bool inequality_holds = true;
  bool search_truthful = true;
};

struct AdjustmentVerification {
  std::vector<AdjustmentCheck> per_type;
  std::vector<double> knots_in_interval;
  double tolerance = 0.0;
  bool truthful() const;
  bool agrees_with_search() const;
};

/// Checks the along-curve truthfulness inequality for every sampled type
/// against a deviation grid and cross-validates with the curve search.
AdjustmentVerification verify_adjustment(const ContractConfig& cfg, const IncentiveFunction& u2,
                                         const AdjustmentFunction& adj,
                                         const std::vector<double>& theta_samples);

struct BreakdownRow {
  double theta = 0.0;
  double best_a2 = 0.0;
  double gain = 0.0;
};

struct BreakdownResult {
  double a1 = 0.0;
  double curve_point = 0.0;
  double cap = 0.0;
  std::optional<double> breakdown_theta;
  /// Best inconsistent second-stage action at the breakdown type.
  std::optional<double> best_a2;
  std::vector<BreakdownRow> rows;
};

/// For a committed first-stage action a1, scans types and returns the first
/// one for which leaving the consistency curve (paying `cap` instead of the
/// on-curve fee) beats the consistent action c(a1).
BreakdownResult finite_penalty_breakdown(const ContractConfig& cfg, const IncentiveFunction& u2,
                                         const FeeTable& fee, double cap, double a1,
                                         const std::vector<double>& theta_scan);

}  // namespace contractforge
