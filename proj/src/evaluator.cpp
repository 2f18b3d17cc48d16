#include "boasf/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "boasf/arm.hpp"

namespace boasf {
namespace {

constexpr double kMinCost = 1e-6;

}  // namespace

void ResourceBudget::validate() const {
  if (!(amount > 0.0) || !std::isfinite(amount)) {
    throw std::invalid_argument("budget amount must be a positive number");
  }
  if (mode == BudgetMode::kCount && amount != std::floor(amount)) {
    throw std::invalid_argument("count budgets must be whole numbers of evaluations");
  }
}

FunctionEvaluable::FunctionEvaluable(SearchSpace space, ValueBounds bounds, Function fn)
    : space_(std::move(space)), bounds_(bounds), fn_(std::move(fn)) {
  if (!std::isfinite(bounds_.lo) || !std::isfinite(bounds_.hi) || !(bounds_.lo < bounds_.hi)) {
    throw std::invalid_argument("objective bounds need finite lo < hi");
  }
}

const Clock& steady_clock() {
  static const SteadyClock clock;
  return clock;
}

double normalize_reward(double raw, const ValueBounds& bounds) {
  const double x = std::clamp((raw - bounds.lo) / (bounds.hi - bounds.lo), 0.0, 1.0);
  return bounds.orientation == Orientation::kMinimize ? 1.0 - x : x;
}

EvaluationRecord evaluate(const Evaluable& objective, const Configuration& config, const EvalOptions& options,
                          std::mt19937_64& rng) {
  const Clock& clock = options.clock != nullptr ? *options.clock : steady_clock();
  EvaluationRecord rec;
  rec.config = config;
  rec.raw_value = std::numeric_limits<double>::quiet_NaN();

  const double start = clock.now();
  try {
    rec.raw_value = objective.evaluate(config, rng);
    if (!std::isfinite(rec.raw_value)) {
      rec.status = EvalStatus::kFailure;
      rec.reason = FailureReason::kObjectiveError;
      rec.error = "objective returned a non-finite value";
    }
  } catch (const std::exception& e) {
    rec.status = EvalStatus::kFailure;
    rec.reason = FailureReason::kObjectiveError;
    rec.error = e.what();
  } catch (...) {
    rec.status = EvalStatus::kFailure;
    rec.reason = FailureReason::kObjectiveError;
    rec.error = "unknown error";
  }
  rec.wall_time = std::max(0.0, clock.now() - start);

  if (options.mode == BudgetMode::kWallClock) {
    rec.cost = std::max(rec.wall_time, kMinCost);
    if (rec.ok() && options.timeout && rec.wall_time > *options.timeout) {
      rec.status = EvalStatus::kFailure;
      rec.reason = FailureReason::kTimeout;
      rec.error = "evaluation exceeded the per-evaluation timeout";
    }
  } else {
    rec.cost = 1.0;
  }
  if (rec.ok()) rec.reward = normalize_reward(rec.raw_value, objective.bounds());
  return rec;
}

std::vector<EvaluationRecord> run_arm_round(Arm& arm, double share, const EvalOptions& options, int round) {
  std::vector<EvaluationRecord> records;
  if (!(share > 0.0)) return records;

  auto step = [&] {
    Configuration config = arm.tpe.suggest(arm.rng);
    EvaluationRecord rec = evaluate(*arm.objective, config, options, arm.rng);
    rec.arm_id = arm.id;
    rec.round = round;
    rec.sequence = arm.next_sequence++;
    if (rec.ok()) {
      arm.rewards.push_back(*rec.reward);
      arm.tpe.update(std::move(config), 1.0 - *rec.reward);
    }
    records.push_back(std::move(rec));
    return records.back().cost;
  };

  if (options.mode == BudgetMode::kCount) {
    // Shares come from integer allocations; the epsilon absorbs representation noise.
    const auto n = static_cast<std::int64_t>(std::floor(share + 1e-9));
    for (std::int64_t i = 0; i < n; ++i) step();
  } else {
    double remaining = share;
    while (remaining > 0.0) remaining -= step();
  }
  return records;
}

std::string to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone:
      return "none";
    case FailureReason::kTimeout:
      return "timeout";
    case FailureReason::kObjectiveError:
      return "objective-error";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 over the combined state
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace boasf
