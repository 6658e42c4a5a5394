#pragma once

#include <string>

#include <json.hpp>

#include "contractforge/adjustment.hpp"
#include "contractforge/agent.hpp"
#include "contractforge/cost_model.hpp"
#include "contractforge/incentive.hpp"
#include "contractforge/stackelberg.hpp"
#include "contractforge/truthfulness.hpp"

namespace contractforge {

using json = nlohmann::ordered_json;

/// Every number leaving the tool is rounded to 12 significant digits.
/// Infinities become the strings "inf" / "-inf", NaN becomes null.
json num(double x);
std::string format_number(double x);

json grid_meta(double a_min, double a_max, std::size_t size, double tolerance);

json to_json(const CostModel& cost);
json to_json(const IncentiveFunction& u2);
json to_json(const ValidationReport& report);
json to_json(const DeviationReport& report);
json to_json(const BregmanReport& report);
json to_json(const StepFeasibility& feasibility);
json to_json(const StepDesign& design);
json to_json(const PairwiseStepCheck& check);
json to_json(const StackelbergSolution& solution);
json to_json(const ExAnteSolution& solution);
/// Metadata only; the fee values travel as CSV.
json to_json(const AdjustmentFunction& adj);
json to_json(const AdjustmentVerification& verification);
json to_json(const BreakdownResult& result);

}  // namespace contractforge
