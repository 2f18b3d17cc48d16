#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "boasf/space.hpp"

namespace boasf {

enum class BudgetMode { kWallClock, kCount };

struct ResourceBudget {
  BudgetMode mode = BudgetMode::kCount;
  double amount = 0.0;

  // amount > 0; count mode additionally needs an integer amount.
  void validate() const;
};

enum class Orientation { kMaximize, kMinimize };

// Declared range of an objective's raw values, used to map them onto [0, 1].
struct ValueBounds {
  double lo = 0.0;
  double hi = 1.0;
  Orientation orientation = Orientation::kMaximize;
};

// A black-box objective over a search space. evaluate() returns the raw value
// or throws to signal failure. Implementations must tolerate concurrent calls
// from different arms.
class Evaluable {
 public:
  virtual ~Evaluable() = default;
  [[nodiscard]] virtual const SearchSpace& space() const = 0;
  [[nodiscard]] virtual ValueBounds bounds() const = 0;
  virtual double evaluate(const Configuration& config, std::mt19937_64& rng) const = 0;
};

class FunctionEvaluable final : public Evaluable {
 public:
  using Function = std::function<double(const Configuration&, std::mt19937_64&)>;

  FunctionEvaluable(SearchSpace space, ValueBounds bounds, Function fn);

  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] ValueBounds bounds() const override { return bounds_; }
  double evaluate(const Configuration& config, std::mt19937_64& rng) const override { return fn_(config, rng); }

 private:
  SearchSpace space_;
  ValueBounds bounds_;
  Function fn_;
};

// Seconds since an arbitrary epoch.
class Clock {
 public:
  virtual ~Clock() = default;
  [[nodiscard]] virtual double now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  [[nodiscard]] double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  }
};

// Manually advanced clock. Objectives call advance() to simulate their cost.
// Elapsed times are only meaningful when one arm evaluates at a time.
class SimulatedClock final : public Clock {
 public:
  [[nodiscard]] double now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void advance(double seconds) {
    std::lock_guard lock(mu_);
    now_ += seconds;
  }

 private:
  mutable std::mutex mu_;
  double now_ = 0.0;
};

const Clock& steady_clock();

enum class EvalStatus { kSuccess, kFailure };
enum class FailureReason { kNone, kTimeout, kObjectiveError };

struct EvaluationRecord {
  std::string arm_id;
  int round = 0;
  std::uint64_t sequence = 0;  // per arm, strictly increasing
  Configuration config;
  EvalStatus status = EvalStatus::kSuccess;
  FailureReason reason = FailureReason::kNone;
  std::string error;
  std::optional<double> reward;  // success only, in [0, 1]
  double raw_value = 0.0;        // NaN when the objective produced nothing
  double cost = 0.0;
  double wall_time = 0.0;

  [[nodiscard]] bool ok() const noexcept { return status == EvalStatus::kSuccess; }
};

struct EvalOptions {
  BudgetMode mode = BudgetMode::kCount;
  std::optional<double> timeout;  // seconds; ignored in count mode
  const Clock* clock = nullptr;   // defaults to steady_clock()
};

// Clip((raw - lo) / (hi - lo), 0, 1), flipped for minimization.
double normalize_reward(double raw, const ValueBounds& bounds);

// Runs one evaluation and captures every failure in the record. Time mode
// charges elapsed seconds (at least 1 microsecond), count mode charges 1.
// Timeouts are detected once the objective returns.
EvaluationRecord evaluate(const Evaluable& objective, const Configuration& config, const EvalOptions& options,
                          std::mt19937_64& rng);

struct Arm;

// Suggest, evaluate and update until `share` is used up. Count mode performs
// exactly floor(share) evaluations; time mode keeps going while any share
// remains, so the last evaluation may overrun it. Successful rewards go to the
// arm's history and its TPE model (as loss = 1 - reward); failures go nowhere.
std::vector<EvaluationRecord> run_arm_round(Arm& arm, double share, const EvalOptions& options, int round);

std::string to_string(FailureReason reason);

}  // namespace boasf
