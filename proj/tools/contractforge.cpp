#include <iostream>

#include <CLI11.hpp>

#include "contractforge/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-stage principal-agent contract analysis"};
  app.set_version_flag("--version", std::string(CONTRACTFORGE_VERSION));
  app.require_subcommand(1);

  contractforge::CommandOptions options;
  std::size_t grid = 0;
  std::size_t threads = 0;
  for (const auto& name : contractforge::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config, "JSON run configuration")->required();
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--grid", grid, "action grid size override");
    sub->add_option("--threads", threads, "worker count override");
    sub->add_flag("--quiet", options.quiet, "do not print the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : contractforge::kExitConfigError;
  }

  const auto* chosen = app.get_subcommands().front();
  if (chosen->count("--grid")) options.grid = grid;
  if (chosen->count("--threads")) options.threads = threads;
  return contractforge::run_command(chosen->get_name(), options, std::cout, std::cerr);
}
