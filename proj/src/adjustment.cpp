#include "contractforge/adjustment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "contractforge/agent.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

using numeric::kInf;

FeeTable::FeeTable(std::vector<double> nodes, std::vector<double> values,
                   std::vector<double> slope_left, std::vector<double> slope_right, double anchor)
    : nodes_(std::move(nodes)),
      values_(std::move(values)),
      slope_left_(std::move(slope_left)),
      slope_right_(std::move(slope_right)),
      anchor_(anchor) {
  const std::size_t n = nodes_.size();
  if (n < 2 || values_.size() != n || slope_left_.size() != n || slope_right_.size() != n) {
    throw ConfigError("fee table: need at least two nodes with matching columns");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("fee table: nodes must increase");
  }
}

FeeTable FeeTable::zero(double lo, double hi) {
  return FeeTable({lo, hi}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, lo);
}

double FeeTable::value(double a1) const {
  if (!(a1 >= nodes_.front() && a1 <= nodes_.back())) {
    throw DomainError("fee table: a1 outside the tabulated range");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a1);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  i = std::min(i, nodes_.size() - 2);
  if (a1 == nodes_[i]) return values_[i];
  if (a1 == nodes_[i + 1]) return values_[i + 1];
  const double h = nodes_[i + 1] - nodes_[i];
  const double s = (a1 - nodes_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[i] + h10 * h * slope_right_[i] + h01 * values_[i + 1] +
         h11 * h * slope_left_[i + 1];
}

double FeeTable::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void FeeTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write fee table " + path.string());
  out << "a1,f\n" << std::setprecision(12);
  for (std::size_t i = 0; i < nodes_.size(); ++i) out << nodes_[i] << ',' << values_[i] << '\n';
}

FeeTable FeeTable::from_csv(const std::filesystem::path& path, std::optional<double> anchor) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fee table " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "a1,f") throw ConfigError(path.string() + ":1: expected header 'a1,f'");
  std::vector<double> a;
  std::vector<double> f;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    double x = 0.0;
    double y = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    a.push_back(x);
    f.push_back(y);
  }
  if (a.size() < 3) throw ConfigError(path.string() + ": fee table needs at least 3 rows");
  std::vector<double> slope(a.size());
  auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2, double at) {
    const double x0 = a[i0], x1 = a[i1], x2 = a[i2];
    return ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2)) * f[i0] +
           ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2)) * f[i1] +
           ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1)) * f[i2];
  };
  const std::size_t n = a.size();
  slope[0] = three_point(0, 1, 2, a[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = three_point(i - 1, i, i + 1, a[i]);
  slope[n - 1] = three_point(n - 3, n - 2, n - 1, a[n - 1]);
  double anchor_at = a.front();
  if (anchor) {
    anchor_at = *anchor;
  } else {
    const auto it = std::min_element(f.begin(), f.end(),
                                     [](double l, double r) { return std::abs(l) < std::abs(r); });
    anchor_at = a[static_cast<std::size_t>(it - f.begin())];
  }
  return FeeTable(std::move(a), std::move(f), slope, slope, anchor_at);
}

AdjustmentFunction AdjustmentFunction::extreme(FeeTable fee, double consistency_tol) {
  return {Kind::ExtremeConsistency, std::move(fee), consistency_tol, kInf};
}

AdjustmentFunction AdjustmentFunction::finite(FeeTable fee, double cap, double consistency_tol) {
  if (!(cap >= 0.0) || !std::isfinite(cap)) {
    throw ConfigError("finite penalty cap must be a non-negative finite number");
  }
  return {Kind::FinitePenalty, std::move(fee), consistency_tol, cap};
}

bool AdjustmentFunction::on_curve(double a2, double curve_point) const {
  return std::abs(a2 - curve_point) <= consistency_tol * (1.0 + std::abs(curve_point));
}

double AdjustmentFunction::evaluate(double a1, double a2, double curve_point) const {
  if (on_curve(a2, curve_point)) return fee(a1);
  return kind == Kind::ExtremeConsistency ? kInf : cap;
}

std::string AdjustmentFunction::kind_name() const {
  return kind == Kind::ExtremeConsistency ? "extreme_consistency" : "finite_penalty";
}

double consistency_curve(const ContractConfig& cfg, const IncentiveFunction& u2, double a1) {
  return cfg.cost.inv_deriv(u2(a1) * cfg.cost.eval_deriv(a1) / cfg.u1);
}

double consistency_curve_slope(const ContractConfig& cfg, const IncentiveFunction& u2, double a1,
                               bool from_right) {
  const double c = consistency_curve(cfg, u2, a1);
  const double numer = u2.derivative(a1, from_right) * cfg.cost.eval_deriv(a1) +
                       u2(a1) * cfg.cost.eval_second_deriv(a1);
  const double slope = numer / (cfg.u1 * cfg.cost.eval_second_deriv(c));
  if (!std::isfinite(slope)) throw NumericalError("consistency curve slope is not finite");
  return slope;
}

double second_stage_revenue(const ContractConfig& cfg, const IncentiveFunction& u2, double a1) {
  return u2(a1) * consistency_curve(cfg, u2, a1);
}

double fee_derivative(const ContractConfig& cfg, const IncentiveFunction& u2, double a1,
                      bool from_right) {
  const double c = consistency_curve(cfg, u2, a1);
  const double dc = consistency_curve_slope(cfg, u2, a1, from_right);
  const double dg = u2.derivative(a1, from_right) * c + u2(a1) * dc;
  const double dphi_c = cfg.cost.eval_deriv(c) * dc;
  const double out = dg - cfg.u1 * dphi_c / cfg.cost.eval_deriv(a1);
  if (!std::isfinite(out)) throw NumericalError("fee derivative is not finite");
  return out;
}

AdjustmentFunction build_truthful_adjustment(const ContractConfig& cfg, const IncentiveFunction& u2,
                                             const FeeBuildOptions& options) {
  cfg.validate();
  if (!u2.is_continuous()) {
    throw ConfigError("build_truthful_adjustment needs a continuous (differentiable) incentive");
  }
  const double a_ref = options.a_ref.value_or(0.5 * (cfg.a_min + cfg.a_max));
  if (!cfg.in_working_interval(a_ref)) throw ConfigError("a_ref must lie in the working interval");
  const std::size_t n = options.nodes.value_or(cfg.action_grid_size);
  if (n < 2) throw ConfigError("fee table needs at least two nodes");

  // Uniform nodes, plus the anchor and every knot of u2, so that each cell
  // is smooth and f(a_ref) is a node value.
  std::vector<double> special{a_ref};
  for (double k : u2.kinks()) {
    if (k > cfg.a_min && k < cfg.a_max) special.push_back(k);
  }
  auto nodes = numeric::linspace(cfg.a_min, cfg.a_max, n);
  const double min_gap = 1e-9 * (cfg.a_max - cfg.a_min);
  std::erase_if(nodes, [&](double x) {
    return std::any_of(special.begin(), special.end(), [&](double s) {
      return x != s && std::abs(x - s) < min_gap && x != cfg.a_min && x != cfg.a_max;
    });
  });
  nodes.insert(nodes.end(), special.begin(), special.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const std::size_t m = nodes.size();
  std::vector<double> slope_left(m);
  std::vector<double> slope_right(m);
  for (std::size_t i = 0; i < m; ++i) {
    slope_right[i] = fee_derivative(cfg, u2, nodes[i], true);
    slope_left[i] = fee_derivative(cfg, u2, nodes[i], false);
  }
  std::vector<double> cell_integral(m - 1);
  numeric::parallel_for(m - 1, numeric::resolve_workers(cfg.workers),
                        [&](std::size_t begin, std::size_t end) {
                          for (std::size_t i = begin; i < end; ++i) {
                            const double lo = nodes[i];
                            const double hi = nodes[i + 1];
                            const double mid = fee_derivative(cfg, u2, 0.5 * (lo + hi));
                            cell_integral[i] =
                                (hi - lo) / 6.0 * (slope_right[i] + 4.0 * mid + slope_left[i + 1]);
                          }
                        });

  const std::size_t k =
      static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), a_ref) - nodes.begin());
  std::vector<double> values(m, 0.0);
  for (std::size_t i = k; i + 1 < m; ++i) values[i + 1] = values[i] + cell_integral[i];
  for (std::size_t i = k; i > 0; --i) values[i - 1] = values[i] - cell_integral[i - 1];
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError("fee integration produced a non-finite value");
  }
  return AdjustmentFunction::extreme(
      FeeTable(std::move(nodes), std::move(values), std::move(slope_left), std::move(slope_right),
               a_ref),
      options.consistency_tol);
}

bool AdjustmentVerification::truthful() const {
  return std::all_of(per_type.begin(), per_type.end(),
                     [](const auto& c) { return c.inequality_holds; });
}

bool AdjustmentVerification::agrees_with_search() const {
  return std::all_of(per_type.begin(), per_type.end(),
                     [](const auto& c) { return c.inequality_holds == c.search_truthful; });
}

AdjustmentVerification verify_adjustment(const ContractConfig& cfg, const IncentiveFunction& u2,
                                         const AdjustmentFunction& adj,
                                         const std::vector<double>& theta_samples) {
  cfg.validate();
  if (adj.kind != AdjustmentFunction::Kind::ExtremeConsistency) {
    throw ConfigError("verify_adjustment expects an extreme-consistency adjustment");
  }
  AdjustmentVerification out;
  out.tolerance = cfg.gain_tolerance;
  for (double k : u2.kinks()) {
    if (cfg.in_working_interval(k)) out.knots_in_interval.push_back(k);
  }
  const auto& phi = cfg.cost;
  auto grid = numeric::linspace(cfg.a_min, cfg.a_max, cfg.action_grid_size);
  for (double x : adj.fee.nodes()) {
    if (cfg.in_working_interval(x)) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  for (double theta_value : theta_samples) {
    const AgentType theta(theta_value);
    AdjustmentCheck check;
    check.theta = theta_value;
    const double a = best_response(cfg, cfg.u1, theta);
    if (!cfg.in_working_interval(a)) {
      throw ConfigError("verify_adjustment: truthful action outside the working interval");
    }
    check.truthful_action = a;
    const double f_a = adj.fee(a);
    const double g_a = second_stage_revenue(cfg, u2, a);
    const double phi_c_a = phi.eval_cost(consistency_curve(cfg, u2, a));
    const double scale = cfg.u1 / phi.eval_deriv(a);
    std::vector<double> candidates = grid;
    candidates.insert(std::upper_bound(candidates.begin(), candidates.end(), a), a);
    std::vector<double> margins(candidates.size());
    numeric::parallel_for(candidates.size(), numeric::resolve_workers(cfg.workers),
                          [&](std::size_t begin, std::size_t end) {
                            for (std::size_t i = begin; i < end; ++i) {
                              const double ah = candidates[i];
                              const double lhs = adj.fee(ah) - f_a;
                              const double rhs =
                                  second_stage_revenue(cfg, u2, ah) - g_a -
                                  scale * (phi.bregman(ah, a) +
                                           phi.eval_cost(consistency_curve(cfg, u2, ah)) - phi_c_a);
                              margins[i] = lhs - rhs;
                            }
                          });
    check.worst_margin = kInf;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (margins[i] < check.worst_margin) {
        check.worst_margin = margins[i];
        check.worst_a_hat = candidates[i];
      }
    }
    check.inequality_holds = check.worst_margin >= -cfg.gain_tolerance;
    const auto search = deviation_search_adj(cfg, u2, adj, theta);
    check.search_gain = search.gain;
    check.search_truthful = search.truthful;
    out.per_type.push_back(check);
  }
  return out;
}

BreakdownResult finite_penalty_breakdown(const ContractConfig& cfg, const IncentiveFunction& u2,
                                         const FeeTable& fee, double cap, double a1,
                                         const std::vector<double>& theta_scan) {
  cfg.validate();
  if (!(cap >= 0.0) || !std::isfinite(cap)) throw ConfigError("cap must be finite and >= 0");
  for (std::size_t i = 1; i < theta_scan.size(); ++i) {
    if (!(theta_scan[i] > theta_scan[i - 1])) throw ConfigError("theta scan must increase");
  }
  const auto adj = AdjustmentFunction::finite(fee, cap);
  BreakdownResult result;
  result.a1 = a1;
  result.cap = cap;
  const double c = consistency_curve(cfg, u2, a1);
  result.curve_point = c;
  const double incentive = u2(a1);
  const double fee_a1 = fee(a1);
  const auto a2_grid = numeric::linspace(cfg.a_min, cfg.a_max, cfg.action_grid_size);

  result.rows.resize(theta_scan.size());
  numeric::parallel_for(
      theta_scan.size(), numeric::resolve_workers(cfg.workers),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
          const double theta = AgentType(theta_scan[j]).theta();
          // The first-stage terms are common to both plays and cancel.
          const double consistent = incentive * c - theta * cfg.cost.eval_cost(c) - fee_a1;
          auto off_curve = [&](double a2) {
            if (adj.on_curve(a2, c)) return -kInf;
            return incentive * a2 - theta * cfg.cost.eval_cost(a2) - cap;
          };
          std::vector<double> values(a2_grid.size());
          for (std::size_t i = 0; i < a2_grid.size(); ++i) values[i] = off_curve(a2_grid[i]);
          const auto best = numeric::refine_grid_max(a2_grid, values, off_curve, cfg.refine_iters);
          result.rows[j] = {theta, best.x, best.value - consistent};
        }
      });
  for (const auto& row : result.rows) {
    if (row.gain > cfg.gain_tolerance) {
      result.breakdown_theta = row.theta;
      result.best_a2 = row.best_a2;
      break;
    }
  }
  return result;
}

}  // namespace contractforge
