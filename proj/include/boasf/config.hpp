#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boasf/evaluator.hpp"
#include "boasf/space.hpp"
#include "boasf/tasks.hpp"
#include "boasf/tpe.hpp"
#include "json.hpp"

namespace boasf {

enum class RunMode { kModelSelection, kHpo };

// A configuration problem, tagged with the offending field path
// (e.g. "run.rounds") or "<file>:<line>" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Seeds {
  std::uint64_t filter = 0;
  std::uint64_t sampling = 0;
  std::uint64_t data = 0;
};

struct DatasetSource {
  std::optional<std::string> csv;
  GeneratorSpec generator;
};

struct RunConfig {
  RunMode mode = RunMode::kModelSelection;
  ResourceBudget budget{BudgetMode::kCount, 200.0};
  int rounds = 3;
  double ucb_c = 2.0;
  Seeds seeds;
  TpeParams tpe;
  std::optional<double> timeout;  // time mode; defaults to 120 s there
  int parallelism = 1;
  std::string output = "boasf_trace.jsonl";
  std::size_t cv_folds = 3;

  std::vector<std::string> learners;  // model-selection arms

  std::string target;  // hpo: learner name, "branin" or "sphere"
  std::optional<SearchSpace> space;
  int partition_k = 2;

  DatasetSource dataset;
};

// Command-line values that shadow the file.
struct Overrides {
  std::optional<std::string> mode;
  std::optional<double> budget;
  std::optional<std::string> budget_mode;
  std::optional<int> rounds;
  std::optional<double> ucb_c;
  std::optional<int> partition_k;
  std::optional<std::uint64_t> seed;
  std::optional<double> timeout;
  std::optional<std::string> output;
  std::optional<int> parallelism;
};

// Parses and validates a whole configuration; nothing is evaluated here.
// Unknown keys are rejected. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& overrides = {});
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "config",
                                const Overrides& overrides = {});
RunConfig load_run_config(const std::string& path, const Overrides& overrides = {});

SearchSpace parse_space(const nlohmann::json& params, const std::string& field);
nlohmann::ordered_json space_to_json(const SearchSpace& space);

// The settings that determine results. Output path and parallelism are left
// out so traces compare equal across them.
nlohmann::ordered_json effective_config(const RunConfig& config);

// The space hpo mode partitions: the explicit one, else the target's own.
SearchSpace hpo_space(const RunConfig& config);

std::string to_string(RunMode mode);
std::string to_string(BudgetMode mode);

}  // namespace boasf
