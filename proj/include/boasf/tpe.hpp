#pragma once

#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "boasf/space.hpp"

namespace boasf {

struct TpeParams {
  double gamma = 0.25;        // quantile of losses that forms the good set
  int n_candidates = 24;      // draws from l(x) per suggestion
  int min_observations = 3;   // below this, suggest() samples the prior
  double bandwidth_floor = 0.01;  // as a fraction of the domain width
  double prior_weight = 1.0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct Observation {
  Configuration config;
  double loss = 0.0;  // lower is better
};

// Good set: the ceil(gamma * n) lowest losses (at least one), ties resolved in
// favour of the earlier observation. Both halves keep insertion order.
std::pair<std::vector<Observation>, std::vector<Observation>> split_observations(
    std::span<const Observation> obs, double gamma);

// One-dimensional mixture over a numeric parameter, expressed in the
// parameter's internal coordinate: log(value) for log-scale continuous
// parameters, value itself otherwise. Integers live on [low - 0.5, high + 0.5]
// so that rounding to nearest gives every integer equal prior mass.
struct NumericMarginal {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> centers;
  std::vector<double> bandwidths;
  double prior_weight = 1.0;

  [[nodiscard]] double pdf(double x) const;
  // Probability of [a, b] under the mixture.
  [[nodiscard]] double mass(double a, double b) const;
  [[nodiscard]] double sample(std::mt19937_64& rng) const;
};

// Smoothed frequency table: P(v) = (count_v + prior_weight) / (n + prior_weight * |V|).
struct CategoricalMarginal {
  std::vector<double> probabilities;
};

using Marginal = std::variant<NumericMarginal, CategoricalMarginal>;

// Product of independent per-parameter marginals over a search space.
class ParzenDensity {
 public:
  ParzenDensity(SearchSpace space, std::vector<Marginal> marginals)
      : space_(std::move(space)), marginals_(std::move(marginals)) {}

  [[nodiscard]] const SearchSpace& space() const noexcept { return space_; }
  [[nodiscard]] const std::vector<Marginal>& marginals() const noexcept { return marginals_; }

  // Sum of per-parameter log densities. Continuous parameters use the density
  // of the internal coordinate; integers and categoricals use probability mass.
  [[nodiscard]] double log_density(const Configuration& config) const;
  [[nodiscard]] Configuration sample(std::mt19937_64& rng) const;

 private:
  SearchSpace space_;
  std::vector<Marginal> marginals_;
};

// Empty obs yields the uniform prior. Otherwise each numeric marginal places a
// truncated Gaussian at every observation with bandwidth
// max(distance to nearest other observation, bandwidth_floor * width), plus a
// uniform prior component weighted prior_weight. A lone observation gets the
// full domain width as its bandwidth. Throws SpaceError for observations
// outside the space.
ParzenDensity fit_density(std::span<const Observation> obs, const SearchSpace& space, const TpeParams& params);

class TpeModel {
 public:
  TpeModel(SearchSpace space, TpeParams params);

  [[nodiscard]] const SearchSpace& space() const noexcept { return space_; }
  [[nodiscard]] const TpeParams& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<Observation>& observations() const noexcept { return observations_; }

  // Uniform sample while fewer than min_observations are recorded; afterwards
  // the best of n_candidates draws from l(x) under the ratio l(x)/g(x).
  [[nodiscard]] Configuration suggest(std::mt19937_64& rng) const;

  // Throws std::invalid_argument for a non-finite loss and SpaceError for a
  // configuration outside the model's space.
  void update(Configuration config, double loss);

 private:
  SearchSpace space_;
  TpeParams params_;
  std::vector<Observation> observations_;
};

}  // namespace boasf
