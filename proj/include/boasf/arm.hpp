#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "boasf/evaluator.hpp"
#include "boasf/space.hpp"
#include "boasf/tpe.hpp"

namespace boasf {

// One bandit arm: an objective, the (sub)space its TPE model searches, and the
// arm's cumulative reward history. Arms own their sampling stream so results do
// not depend on which worker runs them.
struct Arm {
  Arm(std::string id, std::shared_ptr<const Evaluable> objective, SearchSpace space, TpeParams params,
      std::uint64_t seed)
      : id(std::move(id)), objective(std::move(objective)), tpe(std::move(space), params), rng(seed) {}

  Arm(std::string id, std::shared_ptr<const Evaluable> objective, TpeParams params, std::uint64_t seed)
      : Arm(std::move(id), objective, objective->space(), params, seed) {}

  std::string id;
  std::shared_ptr<const Evaluable> objective;
  TpeModel tpe;
  std::vector<double> rewards;  // successes only
  bool alive = true;
  std::mt19937_64 rng;
  std::uint64_t next_sequence = 0;
};

// Well-mixed 64-bit seed for stream `index` derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace boasf
