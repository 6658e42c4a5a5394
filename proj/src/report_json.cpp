#include "contractforge/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace contractforge {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  const double rounded = std::strtod(format_number(x).c_str(), nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // no negative zero in reports
}

json grid_meta(double a_min, double a_max, std::size_t size, double tolerance) {
  return {{"a_min", num(a_min)},
          {"a_max", num(a_max)},
          {"size", size},
          {"tolerance", num(tolerance)}};
}

namespace {

json numbers(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

std::string direction_name(StepDirection d) {
  return d == StepDirection::LowGetsMore ? "low_gets_more" : "high_gets_more";
}

}  // namespace

json to_json(const CostModel& cost) {
  json j{{"family", cost.family() == CostFamily::Quadratic ? "quadratic"
                    : cost.family() == CostFamily::Power   ? "power"
                                                           : "tabulated"},
         {"name", cost.name()}};
  if (cost.family() == CostFamily::Power) j["p"] = num(cost.exponent());
  return j;
}

json to_json(const IncentiveFunction& u2) {
  json j{{"kind", u2.kind()}};
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IncentiveFunction::Constant>) {
          j["u"] = num(v.u);
        } else if constexpr (std::is_same_v<T, IncentiveFunction::TwoTypeStep>) {
          j["t"] = num(v.t);
          j["u_above"] = num(v.u_above);
          j["u_below"] = num(v.u_below);
        } else if constexpr (std::is_same_v<T, IncentiveFunction::PiecewiseLinear>) {
          j["knots"] = numbers(v.knots);
          j["values"] = numbers(v.values);
        } else {
          j["thresholds"] = numbers(v.thresholds);
          j["levels"] = numbers(v.levels);
        }
      },
      u2.variant());
  return j;
}

json to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"worst_violation", num(c.worst_violation)},
                      {"detail", c.detail}});
  }
  return {{"cost", report.cost},
          {"passed", report.passed()},
          {"sample_count", report.sample_count},
          {"sampled_actions", {num(report.sampled_actions.lo), num(report.sampled_actions.hi)}},
          {"seed", report.seed},
          {"checks", checks}};
}

json to_json(const DeviationReport& r) {
  json j{{"theta", num(r.theta)},
         {"truthful_action", num(r.truthful_action)},
         {"truthful_value", num(r.truthful_value)},
         {"best_deviation", num(r.best_deviation)}};
  if (r.best_deviation_a2) j["best_deviation_a2"] = num(*r.best_deviation_a2);
  j["best_value"] = num(r.best_value);
  j["gain"] = num(r.gain);
  j["truthful"] = r.truthful;
  j["scope"] = "truthful on [" + format_number(r.a_min) + ", " + format_number(r.a_max) + "]";
  j["grid_meta"] = grid_meta(r.a_min, r.a_max, r.grid_size, r.gain_tolerance);
  return j;
}

json to_json(const BregmanReport& r) {
  return {{"verdict", r.truthful ? "truthful" : "untruthful"},
          {"worst_pair",
           {{"a", num(r.worst_a)},
            {"a_hat", num(r.worst_a_hat)},
            {"margin", num(r.worst_margin)},
            {"gain_equivalent", num(r.worst_gain)}}},
          {"grid_meta",
           {{"a_min", num(r.a_min)},
            {"a_max", num(r.a_max)},
            {"anchors", r.anchor_count},
            {"deviations", r.deviation_count},
            {"tolerance", num(r.tolerance)}}}};
}

json to_json(const StepFeasibility& s) {
  return {{"t", num(s.t)},
          {"direction", direction_name(s.direction)},
          {"theta_L", num(s.theta_L)},
          {"theta_H", num(s.theta_H)},
          {"binding_theta", num(s.binding_theta())},
          {"rhs_bound", num(s.rhs_bound)}};
}

json to_json(const StepDesign& d) {
  json j{{"feasible", d.feasible},
         {"requested", {{"u_L", num(d.requested_u_L)}, {"u_H", num(d.requested_u_H)}}}};
  j["incentive"] = d.incentive ? to_json(*d.incentive) : json(nullptr);
  if (d.feasibility) {
    j["feasibility"] = to_json(*d.feasibility);
    const double small = std::min(d.requested_u_L, d.requested_u_H);
    j["feasibility"]["boundary_incentive"] = num(d.feasibility->boundary_incentive(small));
    j["feasibility"]["lhs"] = num(d.feasibility->lhs(d.requested_u_L, d.requested_u_H));
  }
  if (d.max_feasible_incentive) {
    j["certificate"] = {{"held_fixed", num(std::min(d.requested_u_L, d.requested_u_H))},
                        {"max_feasible_incentive", num(*d.max_feasible_incentive)},
                        {"max_feasible_gap", num(*d.max_feasible_gap)}};
  }
  return j;
}

json to_json(const PairwiseStepCheck& c) {
  json pairs = json::array();
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    auto p = to_json(c.pairs[i]);
    p["admits"] = static_cast<bool>(c.pair_admits[i]);
    pairs.push_back(p);
  }
  return {{"label", PairwiseStepCheck::kLabel},
          {"pairwise_necessary", c.pairwise_necessary},
          {"pairs", pairs}};
}

json to_json(const StackelbergSolution& s) {
  return {{"u_e", num(s.u_e)},
          {"a_e", num(s.a_e)},
          {"value", num(s.value)},
          {"boundary_flag", s.boundary_flag},
          {"grid_meta", grid_meta(s.a_min, s.a_max, s.grid_size, 0.0)}};
}

json to_json(const ExAnteSolution& s) {
  return {{"u_star", num(s.u_star)},
          {"value", num(s.value)},
          {"boundary_flag", s.boundary_flag},
          {"grid_meta", {{"u_lo", num(s.u_lo)}, {"u_hi", num(s.u_hi)}, {"size", s.grid_size}}}};
}

json to_json(const AdjustmentFunction& adj) {
  json j{{"variant", adj.kind_name()},
         {"consistency_tol", num(adj.consistency_tol)},
         {"cap", num(adj.cap)},
         {"anchor", num(adj.fee.anchor())},
         {"interpolation", FeeTable::kInterpolation},
         {"fee_nodes", adj.fee.nodes().size()},
         {"fee_range", {num(adj.fee.lo()), num(adj.fee.hi())}},
         {"max_abs_fee", num(adj.fee.max_abs())}};
  return j;
}

json to_json(const AdjustmentVerification& v) {
  json rows = json::array();
  for (const auto& c : v.per_type) {
    rows.push_back({{"theta", num(c.theta)},
                    {"truthful_action", num(c.truthful_action)},
                    {"worst_a_hat", num(c.worst_a_hat)},
                    {"worst_margin", num(c.worst_margin)},
                    {"inequality_holds", c.inequality_holds},
                    {"search_gain", num(c.search_gain)},
                    {"search_truthful", c.search_truthful}});
  }
  return {{"truthful", v.truthful()},
          {"agrees_with_search", v.agrees_with_search()},
          {"tolerance", num(v.tolerance)},
          {"knots_in_interval", numbers(v.knots_in_interval)},
          {"per_type", rows}};
}

json to_json(const BreakdownResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"theta", num(row.theta)}, {"best_a2", num(row.best_a2)}, {"gain", num(row.gain)}});
  }
  return {{"a1", num(r.a1)},
          {"curve_point", num(r.curve_point)},
          {"cap", num(r.cap)},
          {"breakdown_theta", r.breakdown_theta ? num(*r.breakdown_theta) : json(nullptr)},
          {"best_a2", r.best_a2 ? num(*r.best_a2) : json(nullptr)},
          {"rows", rows}};
}

}  // namespace contractforge
