#include "contractforge/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "contractforge/errors.hpp"
#include "contractforge/numeric.hpp"

namespace contractforge {

namespace {

std::vector<std::string> row(std::initializer_list<double> values) {
  std::vector<std::string> out;
  for (double v : values) out.push_back(format_number(v));
  return out;
}

template <class T>
const T& require(const std::optional<T>& v, const char* section, const std::string& command) {
  if (!v) throw ConfigError("command '" + command + "' needs a '" + section + "' section");
  return *v;
}

CommandOutput cmd_validate(const RunConfig& rc) {
  const auto report = validate(*rc.cost, rc.validate_samples, rc.seed);
  CommandOutput out;
  out.results = {{"validation", to_json(report)}};
  out.exit_code = report.passed() ? kExitOk : kExitValidationFailure;
  return out;
}

CommandOutput cmd_solve(const RunConfig& rc) {
  const auto cfg = rc.contract();
  const auto& rho = require(rc.rho, "rho", "solve");
  if (!rc.types && !rc.prior) throw ConfigError("command 'solve' needs 'types' or 'prior'");
  CommandOutput out;
  out.results = json::object();
  out.results["rho"] = rho.name();
  if (rc.types) {
    json per_type = json::array();
    CsvTable table{"solve.csv", {"theta", "u_e", "a_e", "value", "boundary_flag"}, {}};
    for (double theta : rc.types->thetas) {
      const auto sol = solve_complete_info(cfg, rho, AgentType(theta));
      json j{{"theta", num(theta)}};
      j.update(to_json(sol));
      per_type.push_back(j);
      auto r = row({theta, sol.u_e, sol.a_e, sol.value});
      r.push_back(sol.boundary_flag ? "1" : "0");
      table.rows.push_back(std::move(r));
    }
    out.results["complete_info"] = per_type;
    out.tables.push_back(std::move(table));
  }
  if (rc.prior) {
    out.results["ex_ante"] = to_json(solve_ex_ante(cfg, rho, *rc.prior));
    out.results["ex_ante"]["prior_nodes"] = rc.prior->support().size();
  }
  return out;
}

// Deviation grid for the Bregman test: log grid plus both sides of each jump
// and the anchors themselves.
std::vector<double> audit_deviation_grid(const RunConfig& rc, const ContractConfig& cfg,
                                         const IncentiveFunction& u2,
                                         const std::vector<double>& anchors) {
  auto grid = bregman_grid(cfg, rc.bregman_grid_size);
  for (double d : u2.discontinuities()) {
    if (cfg.in_working_interval(d)) grid.push_back(d);
    const double left = std::nextafter(d, -numeric::kInf);
    if (cfg.in_working_interval(left)) grid.push_back(left);
  }
  grid.insert(grid.end(), anchors.begin(), anchors.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CommandOutput cmd_audit(const RunConfig& rc) {
  const auto cfg = rc.contract();
  const auto& u2 = require(rc.incentive, "incentive", "audit");
  const auto& types = require(rc.types, "types", "audit");
  CommandOutput out;
  json searches = json::array();
  CsvTable table{"audit.csv", {"theta", "truthful_action", "best_deviation", "gain"}, {}};
  bool search_truthful = true;
  double worst_gain = -numeric::kInf;
  std::vector<double> anchors;
  for (double theta : types.thetas) {
    const auto r = deviation_search_mh(cfg, u2, AgentType(theta));
    anchors.push_back(r.truthful_action);
    searches.push_back(to_json(r));
    table.rows.push_back(row({theta, r.truthful_action, r.best_deviation, r.gain}));
    search_truthful = search_truthful && r.truthful;
    worst_gain = std::max(worst_gain, r.gain);
  }
  std::sort(anchors.begin(), anchors.end());
  const bool continuous = types.kind == TypeSpec::Kind::Continuous;
  if (continuous) {
    const auto grid = bregman_grid(cfg, rc.bregman_grid_size);
    anchors.insert(anchors.end(), grid.begin(), grid.end());
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  }
  const auto bregman =
      check_bregman_truthful(cfg, u2, anchors, audit_deviation_grid(rc, cfg, u2, anchors));
  const bool truthful = search_truthful && bregman.truthful;

  out.results = {
      {"verdict", truthful ? "truthful" : "untruthful"},
      {"scope", "truthful on [" + format_number(cfg.a_min) + ", " + format_number(cfg.a_max) + "]"},
      {"type_space", continuous ? "continuous" : "discrete"},
      {"incentive", to_json(u2)},
      {"worst_gain", num(worst_gain)},
      {"bregman", to_json(bregman)},
      {"deviation_search", searches},
      {"methods_agree", bregman.truthful == search_truthful}};
  out.tables.push_back(std::move(table));
  return out;
}

CommandOutput cmd_design_step(const RunConfig& rc) {
  const auto cfg = rc.contract();
  const auto& d = require(rc.design, "design", "design-step");
  const AgentType low(d.theta_L);
  const AgentType high(d.theta_H);
  const auto design = design_step(cfg, low, high, d.u_L, d.u_H);
  const auto [t_min, t_max] = step_threshold_range(cfg, low, high);
  CommandOutput out;
  out.results = {{"threshold_range", {num(t_min), num(t_max)}}, {"design", to_json(design)}};
  if (rc.types && rc.incentive &&
      std::holds_alternative<IncentiveFunction::Staircase>(rc.incentive->variant())) {
    out.results["staircase"] = to_json(check_staircase_pairwise(cfg, rc.types->thetas, *rc.incentive));
  }
  if (design.feasible && design.incentive) {
    json checks = json::array();
    for (const auto& theta : {low, high}) checks.push_back(to_json(deviation_search_mh(cfg, *design.incentive, theta)));
    out.results["deviation_check"] = checks;
  }
  return out;
}

CommandOutput cmd_build_adjustment(const RunConfig& rc) {
  const auto cfg = rc.contract();
  const auto& u2 = require(rc.incentive, "incentive", "build-adjustment");
  const AdjustmentSpec spec = rc.adjustment.value_or(AdjustmentSpec{});
  FeeBuildOptions opts;
  opts.a_ref = spec.a_ref;
  opts.nodes = spec.nodes;
  opts.consistency_tol = spec.consistency_tol;
  const auto adj = build_truthful_adjustment(cfg, u2, opts);

  CommandOutput out;
  out.results = {{"incentive", to_json(u2)}, {"adjustment", to_json(adj)}};
  CsvTable fee{"fee_table.csv", {"a1", "f"}, {}};
  for (std::size_t i = 0; i < adj.fee.nodes().size(); ++i) {
    fee.rows.push_back(row({adj.fee.nodes()[i], adj.fee.values()[i]}));
  }
  out.tables.push_back(std::move(fee));

  if (rc.types) {
    std::vector<double> inside;
    for (double theta : rc.types->thetas) {
      if (cfg.in_working_interval(best_response(cfg, cfg.u1, AgentType(theta)))) inside.push_back(theta);
    }
    out.results["verification"] = to_json(verify_adjustment(cfg, u2, adj, inside));
  }
  if (spec.breakdown) {
    const auto& b = *spec.breakdown;
    out.results["finite_penalty_breakdown"] =
        to_json(finite_penalty_breakdown(cfg, u2, adj.fee, b.cap, b.a1, b.theta_scan));
  }
  return out;
}

CommandOutput cmd_sweep(const RunConfig& rc) {
  const auto cfg = rc.contract();
  const auto& sweep = require(rc.sweep, "sweep", "sweep");
  CommandOutput out;
  CsvTable table{"sweep.csv", {"parameter", "value", "quantity", "result"}, {}};
  auto emit = [&](double value, const char* quantity, double result) {
    table.rows.push_back({sweep.parameter, format_number(value), quantity, format_number(result)});
  };
  if (sweep.parameter == "theta") {
    const auto& u2 = require(rc.incentive, "incentive", "sweep");
    for (double theta : sweep.values) {
      const auto r = deviation_search_mh(cfg, u2, AgentType(theta));
      emit(theta, "truthful_action", r.truthful_action);
      emit(theta, "best_deviation", r.best_deviation);
      emit(theta, "gain", r.gain);
      emit(theta, "truthful", r.truthful ? 1.0 : 0.0);
    }
  } else {
    const auto& d = require(rc.design, "design", "sweep");
    const AgentType low(d.theta_L);
    const AgentType high(d.theta_H);
    const auto [t_min, t_max] = step_threshold_range(cfg, low, high);
    for (double v : sweep.values) {
      const double u_L = sweep.parameter == "u_L" ? v : d.u_L;
      const auto direction = u_L >= d.u_H ? StepDirection::LowGetsMore : StepDirection::HighGetsMore;
      const double t = sweep.parameter == "t"
                           ? v
                           : d.t.value_or(direction == StepDirection::LowGetsMore ? t_max : t_min);
      const auto feas = step_feasibility(cfg, low, high, t, direction);
      const auto u2 = IncentiveFunction::two_type_step(t, u_L, d.u_H);
      const auto g_low = deviation_search_mh(cfg, u2, low);
      const auto g_high = deviation_search_mh(cfg, u2, high);
      emit(v, "rhs_bound", feas.rhs_bound);
      emit(v, "lhs", feas.lhs(u_L, d.u_H));
      emit(v, "admits", feas.admits(u_L, d.u_H) ? 1.0 : 0.0);
      emit(v, "gain_theta_L", g_low.gain);
      emit(v, "gain_theta_H", g_high.gain);
      emit(v, "best_deviation_theta_H", g_high.best_deviation);
    }
  }
  out.results = {{"parameter", sweep.parameter}, {"points", sweep.values.size()}, {"rows", table.rows.size()}};
  out.tables.push_back(std::move(table));
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "solve", "audit", "design-step",
                                              "build-adjustment", "sweep"};
  return names;
}

CommandOutput execute_command(const std::string& command, const RunConfig& config) {
  if (command == "validate") return cmd_validate(config);
  if (command == "solve") return cmd_solve(config);
  if (command == "audit") return cmd_audit(config);
  if (command == "design-step") return cmd_design_step(config);
  if (command == "build-adjustment") return cmd_build_adjustment(config);
  if (command == "sweep") return cmd_sweep(config);
  throw ConfigError("unknown command '" + command + "'");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  RunConfig config;
  try {
    config = load_run_config(options.config);
    if (options.grid) config.action_grid_size = *options.grid;
    if (options.threads) config.threads = *options.threads;
    config.contract().validate();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  CommandOutput result;
  try {
    result = execute_command(command, config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const RangeError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json report{{"command", command},
              {"tool_version", CONTRACTFORGE_VERSION},
              {"config", config.raw},
              {"results", result.results},
              {"exit_code", result.exit_code},
              {"seed", config.seed},
              {"wall_clock_seconds", num(elapsed)}};
  try {
    std::filesystem::create_directories(options.out_dir);
    std::ofstream file(options.out_dir / (command + ".json"), std::ios::binary);
    file << report.dump(2) << '\n';
    for (const auto& t : result.tables) write_csv(options.out_dir / t.file_name, t);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (!options.quiet) out << report.dump(2) << '\n';
  return result.exit_code;
}

}  // namespace contractforge
