// boasf: run, partition and report from the command line.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "boasf/commands.hpp"

namespace {

void add_run_flags(CLI::App* cmd, std::string& config, boasf::Overrides& o) {
  cmd->add_option("--config", config, "JSON run configuration")->required();
  cmd->add_option("--mode", o.mode, "model-selection | hpo");
  cmd->add_option("--budget", o.budget, "total resource R");
  cmd->add_option("--budget-mode", o.budget_mode, "count | time");
  cmd->add_option("--rounds", o.rounds, "number of rounds r");
  cmd->add_option("--ucb-c", o.ucb_c, "exploration constant c");
  cmd->add_option("--partition-k", o.partition_k, "intervals per hyperparameter (hpo)");
  cmd->add_option("--seed", o.seed, "base seed for filter, sampling and data streams");
  cmd->add_option("--timeout", o.timeout, "per-evaluation timeout in seconds (time budgets)");
  cmd->add_option("--output", o.output, "trace path (JSON Lines)");
  cmd->add_option("--parallelism", o.parallelism, "concurrent arm workers");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization with adaptive successive filtering"};
  app.require_subcommand(1);

  std::string run_config;
  boasf::Overrides run_overrides;
  auto* run = app.add_subcommand("run", "execute a run and write its trace");
  add_run_flags(run, run_config, run_overrides);

  std::string partition_config;
  boasf::Overrides partition_overrides;
  auto* part = app.add_subcommand("partition", "list the sub-spaces an hpo configuration yields");
  add_run_flags(part, partition_config, partition_overrides);

  std::string trace_path;
  std::optional<std::string> csv_path;
  auto* report = app.add_subcommand("report", "summarize a trace and write its best-so-far curve");
  report->add_option("trace", trace_path, "trace written by `run`")->required();
  report->add_option("--csv", csv_path, "curve output (default <trace>.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : boasf::kExitConfig;
  }

  if (*run) return boasf::cmd_run(run_config, run_overrides, std::cout, std::cerr);
  if (*part) return boasf::cmd_partition(partition_config, partition_overrides, std::cout, std::cerr);
  return boasf::cmd_report(trace_path, csv_path, std::cout, std::cerr);
}
