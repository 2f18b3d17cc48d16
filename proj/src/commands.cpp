#include "boasf/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "boasf/report.hpp"
#include "boasf/tasks.hpp"
#include "boasf/trace.hpp"

namespace boasf {
namespace {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("BOASF_LOG");
  if (env == nullptr) return LogLevel::kWarn;
  const std::string v(env);
  if (v == "error") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static constexpr const char* names[] = {"error", "warn", "info", "debug"};
  std::clog << "[boasf " << names[static_cast<int>(level)] << "] " << message << '\n';
}

std::shared_ptr<const Dataset> load_dataset(const RunConfig& config) {
  try {
    if (config.dataset.csv) {
      auto data = std::make_shared<Dataset>(load_csv_file(*config.dataset.csv));
      if (data->rows < config.cv_folds) {
        throw std::invalid_argument("dataset has fewer rows than cross-validation folds");
      }
      return data;
    }
    return std::make_shared<Dataset>(generate_dataset(config.dataset.generator));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(config.dataset.csv ? "dataset.csv" : "dataset", e.what());
  }
}

CvSpec cv_spec(const RunConfig& config) { return CvSpec{config.cv_folds, derive_seed(config.seeds.data, 1000)}; }

class LoggingObserver final : public RunObserver {
 public:
  explicit LoggingObserver(RunObserver* inner) : inner_(inner) {}
  void on_evaluation(const EvaluationRecord& rec) override {
    if (inner_ != nullptr) inner_->on_evaluation(rec);
  }
  void on_round(const RoundReport& report) override {
    log(LogLevel::kInfo, "round " + std::to_string(report.round) + ": " + std::to_string(report.arms.size()) +
                             " arms, " + std::to_string(report.survivors.size()) + " survive");
    if (inner_ != nullptr) inner_->on_round(report);
  }

 private:
  RunObserver* inner_;
};

}  // namespace

std::vector<Arm> build_arms(const RunConfig& config) {
  std::vector<Arm> arms;
  if (config.mode == RunMode::kModelSelection) {
    const auto data = load_dataset(config);
    for (std::size_t i = 0; i < config.learners.size(); ++i) {
      auto objective = std::make_shared<LearnerObjective>(find_learner(config.learners[i]), data, cv_spec(config));
      arms.emplace_back(config.learners[i], objective, config.tpe, derive_seed(config.seeds.sampling, i));
    }
    return arms;
  }

  if (config.target.empty()) throw ConfigError("hpo.target", "required to run");
  const SearchSpace space = hpo_space(config);
  std::shared_ptr<const Evaluable> objective;
  if (config.target == "branin") {
    objective = branin_objective();
  } else if (config.target == "sphere") {
    objective = sphere_objective(space);
  } else {
    objective = std::make_shared<LearnerObjective>(find_learner(config.target), load_dataset(config), cv_spec(config));
  }
  const auto subs = partition(space, config.partition_k);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    arms.emplace_back("subspace-" + std::to_string(i), objective, subs[i].space(), config.tpe,
                      derive_seed(config.seeds.sampling, i));
  }
  return arms;
}

BanditConfig bandit_config(const RunConfig& config) {
  BanditConfig b;
  b.budget = config.budget;
  b.rounds = config.rounds;
  b.ucb_c = config.ucb_c;
  b.filter_seed = derive_seed(config.seeds.filter, 0xF117E5);
  b.parallelism = config.parallelism;
  b.timeout = config.budget.mode == BudgetMode::kWallClock ? config.timeout : std::nullopt;
  return b;
}

BestResult execute_run(const RunConfig& config, std::ostream* trace) {
  auto arms = build_arms(config);
  const auto effective = effective_config(config);
  std::optional<TraceWriter> writer;
  if (trace != nullptr) {
    writer.emplace(*trace, run_id_for(effective.dump()), config.budget.mode == BudgetMode::kWallClock);
    writer->header(effective);
  }
  LoggingObserver observer(writer ? &*writer : nullptr);
  log(LogLevel::kInfo, "running " + std::to_string(arms.size()) + " arms for " + std::to_string(config.rounds) +
                           " rounds");
  auto best = run(bandit_config(config), arms, &observer);
  if (writer) writer->final_result(best);
  return best;
}

int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_run_config(config_path, overrides);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ofstream trace(config.output, std::ios::binary | std::ios::trunc);
  if (!trace) {
    err << "error: cannot write trace to '" << config.output << "'\n";
    return kExitRuntime;
  }
  try {
    const auto best = execute_run(config, &trace);
    out << "best arm: " << best.arm_id << '\n';
    out << "configuration: " << configuration_to_json(best.config).dump() << '\n';
    out << "reward: " << best.reward << '\n';
    out << "trace: " << config.output << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NoSuccessError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_partition(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    Overrides o = overrides;
    if (!o.mode) o.mode = "hpo";
    const auto config = load_run_config(config_path, o);
    if (config.mode != RunMode::kHpo) throw ConfigError("run.mode", "partition needs an hpo configuration");
    const auto space = hpo_space(config);
    const auto subs = partition(space, config.partition_k);
    out << "parameters:";
    for (const auto& p : space.params()) out << ' ' << p.name;
    out << '\n';
    for (std::size_t i = 0; i < subs.size(); ++i) {
      out << "subspace-" << i << ": [";
      const auto& params = subs[i].space().params();
      for (std::size_t j = 0; j < params.size(); ++j) {
        out << (j > 0 ? ", " : "") << describe_domain(params[j].domain);
      }
      out << "]\n";
    }
    out << "total: " << subs.size() << " sub-spaces\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SpaceError& e) {
    err << "config error: hpo.partition_k: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_report(const std::string& trace_path, const std::optional<std::string>& csv_path, std::ostream& out,
               std::ostream& err) {
  std::ifstream in(trace_path);
  if (!in) {
    err << "error: cannot read trace '" << trace_path << "'\n";
    return kExitRuntime;
  }
  try {
    const auto summary = summarize_trace(read_trace(in));
    print_summary(out, summary);
    const auto path = csv_path.value_or(trace_path + ".csv");
    std::ofstream csv(path, std::ios::trunc);
    if (!csv) {
      err << "error: cannot write '" << path << "'\n";
      return kExitRuntime;
    }
    write_curve_csv(csv, summary.curve);
    out << "curve: " << path << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace boasf
