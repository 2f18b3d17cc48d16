#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boasf/arm.hpp"
#include "boasf/evaluator.hpp"

namespace boasf {

// mu + c * sigma / sqrt(N) over the arm's whole reward history, with sigma the
// population standard deviation (zero for a single reward). Rewards must be
// non-empty and lie in [0, 1].
double gaussian_ucb(std::span<const double> rewards, double c);

// Min-max scaling of UCB scores into advance probabilities. The best arm maps
// to 1 and the worst to 0; when every score is equal all arms get 1.
std::vector<double> advance_probabilities(std::span<const double> ucbs);

// Independent Bernoulli draw per arm (exactly one uniform draw each). Returns
// the indices of the survivors in ascending order.
std::vector<std::size_t> filter_arms(std::span<const double> probabilities, std::mt19937_64& rng);

// Softmax of the UCB scores times round_budget. Time mode returns the exact
// real shares. Count mode returns integers summing to floor(round_budget)
// via largest remainder, with at least one evaluation per arm when the budget
// allows it; otherwise the highest scores get one evaluation each.
std::vector<double> allocate_resources(std::span<const double> ucbs, double round_budget, BudgetMode mode);

struct BanditConfig {
  ResourceBudget budget;
  int rounds = 3;
  double ucb_c = 2.0;
  std::uint64_t filter_seed = 0;
  int parallelism = 1;            // concurrent arm workers within a round
  std::optional<double> timeout;  // per evaluation, time mode only
  const Clock* clock = nullptr;

  void validate() const;
};

struct ArmRoundStats {
  std::string arm_id;
  double allocated = 0.0;
  int evaluations = 0;
  int failures = 0;
  double consumed = 0.0;
  std::optional<double> ucb;  // absent while the arm has no successful evaluation
  double advance_probability = 0.0;
  bool survived = false;
};

struct RoundReport {
  int round = 0;
  double round_budget = 0.0;
  std::vector<ArmRoundStats> arms;  // arms alive at the start of the round
  std::vector<std::string> survivors;
};

// Receives events after each round's barrier, on the calling thread, in arm order.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_evaluation(const EvaluationRecord&) {}
  virtual void on_round(const RoundReport&) {}
};

struct BestResult {
  std::string arm_id;
  Configuration config;
  double reward = 0.0;
  double raw_value = 0.0;
  double total_cost = 0.0;
  std::vector<EvaluationRecord> records;
  std::vector<RoundReport> rounds;
};

class NoSuccessError : public std::runtime_error {
 public:
  NoSuccessError() : std::runtime_error("no successful evaluation") {}
};

// Adaptive successive filtering with per-arm TPE. Round one splits the round
// budget equally; every round then runs each live arm on its share, scores arms
// by Gaussian UCB (arms without successes get probability 0), filters them and,
// from round two on, allocates the round budget by softmax over the survivors'
// scores. The round budget is R/r; count budgets are dealt as cumulative floors
// (200 over 3 rounds: 66, 67, 67) and time budgets are capped by what remains.
//
// Returns the best single evaluation seen. Equal rewards are resolved in favour
// of the arm with the higher mean reward, then the earlier evaluation. Throws
// NoSuccessError when no live arm has a successful evaluation after a round.
BestResult run(const BanditConfig& config, std::vector<Arm>& arms, RunObserver* observer = nullptr);

}  // namespace boasf
