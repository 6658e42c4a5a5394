#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contractforge/adjustment.hpp"
#include "contractforge/contract.hpp"
#include "contractforge/incentive.hpp"
#include "contractforge/stackelberg.hpp"

namespace contractforge {

struct TypeSpec {
  enum class Kind { Discrete, Continuous };
  Kind kind = Kind::Discrete;
  /// Listed types, or log-spaced samples of the continuous range.
  std::vector<double> thetas;
  double lo = 0.0;
  double hi = 0.0;
};

struct BreakdownSpec {
  double cap = 0.0;
  double a1 = 0.0;
  std::vector<double> theta_scan;
};

struct AdjustmentSpec {
  std::optional<double> a_ref;
  std::optional<std::size_t> nodes;
  double consistency_tol = kDefaultConsistencyTol;
  std::optional<BreakdownSpec> breakdown;
};

struct DesignSpec {
  double theta_L = 0.0;
  double theta_H = 0.0;
  double u_L = 0.0;
  double u_H = 0.0;
  std::optional<double> t;
};

struct SweepSpec {
  std::string parameter;  // theta | t | u_L
  std::vector<double> values;
};

/// Parsed and schema-checked run configuration (JSON). Unknown keys are
/// rejected; paths inside the file resolve relative to the file.
struct RunConfig {
  std::filesystem::path source;
  nlohmann::ordered_json raw;

  std::optional<CostModel> cost;
  double u1 = 0.0;
  double a_min = 1e-3;
  double a_max = 10.0;
  std::size_t action_grid_size = 2048;
  int refine_iters = 100;
  std::size_t bregman_grid_size = 256;
  double gain_tolerance = kDefaultGainTolerance;
  std::size_t validate_samples = 100;
  std::size_t threads = 0;
  std::uint64_t seed = 20240601;

  std::optional<TypeSpec> types;
  std::optional<IncentiveFunction> incentive;
  std::optional<AdjustmentSpec> adjustment;
  std::optional<PrincipalBenefit> rho;
  std::optional<TypePrior> prior;
  std::optional<DesignSpec> design;
  std::optional<SweepSpec> sweep;

  ContractConfig contract() const;
};

/// Throws ConfigError with file/line/key context on malformed input.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& origin = {});

}  // namespace contractforge
