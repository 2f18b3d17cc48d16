#include "boasf/bandit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

namespace boasf {
namespace {

std::vector<double> softmax(std::span<const double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> w(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(scores[i] - top);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

// Indices sorted by descending key, ties by ascending index.
std::vector<std::size_t> rank_descending(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] > keys[b]; });
  return order;
}

std::vector<double> allocate_counts(std::span<const double> ucbs, double round_budget) {
  const std::size_t n = ucbs.size();
  const auto total = static_cast<std::int64_t>(std::floor(round_budget + 1e-9));
  std::vector<std::int64_t> shares(n, 0);

  if (total < static_cast<std::int64_t>(n)) {
    const auto order = rank_descending(ucbs);
    for (std::int64_t i = 0; i < total; ++i) shares[order[static_cast<std::size_t>(i)]] = 1;
    return {shares.begin(), shares.end()};
  }

  const auto w = softmax(ucbs);
  std::vector<double> remainders(n);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = w[i] * static_cast<double>(total);
    shares[i] = static_cast<std::int64_t>(std::floor(quota));
    remainders[i] = quota - static_cast<double>(shares[i]);
    assigned += shares[i];
  }
  const auto order = rank_descending(remainders);
  for (std::int64_t i = 0; i < total - assigned; ++i) ++shares[order[static_cast<std::size_t>(i)]];

  // Every survivor needs at least one fresh data point for its next score.
  for (std::size_t i = 0; i < n; ++i) {
    if (shares[i] > 0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(shares.begin(), shares.end()) - shares.begin());
    --shares[donor];
    ++shares[i];
  }
  return {shares.begin(), shares.end()};
}

void run_parallel(std::size_t jobs, int parallelism, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(jobs, static_cast<std::size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < jobs; j = next++) {
        try {
          body(j);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

double gaussian_ucb(std::span<const double> rewards, double c) {
  if (rewards.empty()) throw std::invalid_argument("gaussian_ucb needs at least one reward");
  const double mu = mean(rewards);
  double var = 0.0;
  for (double r : rewards) var += (r - mu) * (r - mu);
  const auto n = static_cast<double>(rewards.size());
  const double sigma = std::sqrt(var / n);
  return mu + c * sigma / std::sqrt(n);
}

std::vector<double> advance_probabilities(std::span<const double> ucbs) {
  if (ucbs.empty()) return {};
  const auto [lo, hi] = std::minmax_element(ucbs.begin(), ucbs.end());
  std::vector<double> p(ucbs.size(), 1.0);
  if (*hi == *lo) return p;
  const double range = *hi - *lo;
  for (std::size_t i = 0; i < ucbs.size(); ++i) {
    // Pin the extremes so rounding cannot move them off 0 and 1.
    if (ucbs[i] == *hi) {
      p[i] = 1.0;
    } else if (ucbs[i] == *lo) {
      p[i] = 0.0;
    } else {
      p[i] = (ucbs[i] - *lo) / range;
    }
  }
  return p;
}

std::vector<std::size_t> filter_arms(std::span<const double> probabilities, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (u(rng) < probabilities[i]) survivors.push_back(i);
  }
  return survivors;
}

std::vector<double> allocate_resources(std::span<const double> ucbs, double round_budget, BudgetMode mode) {
  if (ucbs.empty()) return {};
  if (mode == BudgetMode::kCount) return allocate_counts(ucbs, round_budget);
  auto w = softmax(ucbs);
  for (auto& x : w) x *= round_budget;
  return w;
}

void BanditConfig::validate() const {
  budget.validate();
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (budget.mode == BudgetMode::kCount && budget.amount < rounds) {
    throw std::invalid_argument("count budgets need at least one evaluation per round");
  }
  if (!(ucb_c > 0.0)) throw std::invalid_argument("ucb_c must be > 0");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  if (timeout && !(*timeout > 0.0)) throw std::invalid_argument("timeout must be > 0");
}

BestResult run(const BanditConfig& config, std::vector<Arm>& arms, RunObserver* observer) {
  config.validate();
  if (arms.empty()) throw std::invalid_argument("run needs at least one arm");

  const EvalOptions options{config.budget.mode,
                            config.budget.mode == BudgetMode::kWallClock ? config.timeout : std::nullopt,
                            config.clock};
  const double total = config.budget.amount;
  const double per_round = total / config.rounds;
  std::mt19937_64 filter_rng(config.filter_seed);

  BestResult result;
  std::optional<std::size_t> best_record;
  for (auto& arm : arms) arm.alive = true;

  for (int round = 1; round <= config.rounds; ++round) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (arms[i].alive) live.push_back(i);
    }
    double round_budget = per_round;
    if (config.budget.mode == BudgetMode::kCount) {
      // Cumulative floors, so the round budgets add up to R exactly.
      const auto units = static_cast<std::int64_t>(std::llround(total));
      round_budget = static_cast<double>(units * round / config.rounds - units * (round - 1) / config.rounds);
    } else {
      round_budget = std::min(per_round, total - result.total_cost);
      if (round_budget <= 0.0) break;
    }

    std::vector<double> scores(live.size(), 0.0);
    if (round > 1) {
      for (std::size_t j = 0; j < live.size(); ++j) {
        scores[j] = gaussian_ucb(arms[live[j]].rewards, config.ucb_c);
      }
    }
    const auto shares = allocate_resources(scores, round_budget, config.budget.mode);

    std::vector<std::vector<EvaluationRecord>> batches(live.size());
    run_parallel(live.size(), config.parallelism,
                 [&](std::size_t j) { batches[j] = run_arm_round(arms[live[j]], shares[j], options, round); });

    RoundReport report;
    report.round = round;
    report.round_budget = round_budget;
    for (std::size_t j = 0; j < live.size(); ++j) {
      ArmRoundStats stats;
      stats.arm_id = arms[live[j]].id;
      stats.allocated = shares[j];
      for (auto& rec : batches[j]) {
        ++stats.evaluations;
        stats.consumed += rec.cost;
        result.total_cost += rec.cost;
        if (!rec.ok()) {
          ++stats.failures;
        } else if (!best_record || *rec.reward > *result.records[*best_record].reward) {
          best_record = result.records.size();
        }
        if (observer != nullptr) observer->on_evaluation(rec);
        result.records.push_back(std::move(rec));
      }
      report.arms.push_back(std::move(stats));
    }

    // Arms without a single success are discarded outright; the rest are
    // min-max scaled among themselves.
    std::vector<double> scored;
    for (std::size_t j = 0; j < live.size(); ++j) {
      const auto& rewards = arms[live[j]].rewards;
      if (!rewards.empty()) {
        report.arms[j].ucb = gaussian_ucb(rewards, config.ucb_c);
        scored.push_back(*report.arms[j].ucb);
      }
    }
    if (scored.empty()) throw NoSuccessError();
    const auto scaled = advance_probabilities(scored);
    std::vector<double> probabilities(live.size(), 0.0);
    for (std::size_t j = 0, s = 0; j < live.size(); ++j) {
      if (report.arms[j].ucb) probabilities[j] = scaled[s++];
      report.arms[j].advance_probability = probabilities[j];
    }

    for (auto i : live) arms[i].alive = false;
    for (auto j : filter_arms(probabilities, filter_rng)) {
      arms[live[j]].alive = true;
      report.arms[j].survived = true;
      report.survivors.push_back(arms[live[j]].id);
    }
    if (observer != nullptr) observer->on_round(report);
    result.rounds.push_back(std::move(report));
  }

  if (!best_record) throw NoSuccessError();

  // Among evaluations sharing the top reward prefer the arm with the higher
  // mean reward; stable order keeps the earliest one otherwise.
  const double top = *result.records[*best_record].reward;
  auto arm_mean = [&](const std::string& id) {
    for (const auto& arm : arms) {
      if (arm.id == id) return mean(arm.rewards);
    }
    return 0.0;
  };
  std::size_t chosen = *best_record;
  double chosen_mean = arm_mean(result.records[chosen].arm_id);
  for (std::size_t i = chosen + 1; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    if (!rec.ok() || *rec.reward != top) continue;
    const double m = arm_mean(rec.arm_id);
    if (m > chosen_mean) {
      chosen = i;
      chosen_mean = m;
    }
  }

  const auto& best = result.records[chosen];
  result.arm_id = best.arm_id;
  result.config = best.config;
  result.reward = *best.reward;
  result.raw_value = best.raw_value;
  return result;
}

}  // namespace boasf
