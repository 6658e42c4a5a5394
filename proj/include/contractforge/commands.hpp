#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contractforge/report_json.hpp"
#include "contractforge/run_config.hpp"

namespace contractforge {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitValidationFailure = 2,
  kExitNumericFailure = 3,
};

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::size_t> grid;
  /// Overrides the config and CONTRACTFORGE_THREADS when set.
  std::optional<std::size_t> threads;
  bool quiet = false;
};

/// A tabular artefact written next to the JSON report.
struct CsvTable {
  std::string file_name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct CommandOutput {
  int exit_code = kExitOk;
  json results;
  std::vector<CsvTable> tables;
};

const std::vector<std::string>& command_names();

/// Runs a subcommand on an already parsed configuration. Result payloads are
/// deterministic: they do not depend on timing or on the worker count.
CommandOutput execute_command(const std::string& command, const RunConfig& config);

/// Full CLI flow: load config, apply overrides, execute, write
/// `<out>/<command>.json` plus CSV tables, and print the report unless quiet.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace contractforge
