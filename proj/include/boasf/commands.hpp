#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boasf/arm.hpp"
#include "boasf/bandit.hpp"
#include "boasf/config.hpp"

namespace boasf {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

// Model-selection: one arm per learner. Hpo: one arm per sub-space of the
// target's space. Dataset problems surface as ConfigError.
std::vector<Arm> build_arms(const RunConfig& config);

BanditConfig bandit_config(const RunConfig& config);

// Runs the bandit, streaming header, evaluation, round and final events to
// `trace` when given. Throws NoSuccessError when nothing succeeds.
BestResult execute_run(const RunConfig& config, std::ostream* trace);

int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_partition(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err);
// csv_path defaults to "<trace_path>.csv".
int cmd_report(const std::string& trace_path, const std::optional<std::string>& csv_path, std::ostream& out,
               std::ostream& err);

}  // namespace boasf
