#include "boasf/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace boasf {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// Probability a N(mu, s) variable lands inside [lo, hi].
double truncation_mass(double mu, double s, double lo, double hi) {
  return normal_cdf((hi - mu) / s) - normal_cdf((lo - mu) / s);
}

struct Coordinate {
  double lo;
  double hi;
};

Coordinate internal_range(const ParamDomain& domain) {
  if (const auto* c = std::get_if<ContinuousDomain>(&domain)) {
    if (c->scale == Scale::kLog) return {std::log(c->low), std::log(c->high)};
    return {c->low, c->high};
  }
  const auto& i = std::get<IntegerDomain>(domain);
  return {static_cast<double>(i.low) - 0.5, static_cast<double>(i.high) + 0.5};
}

double to_internal(const ParamDomain& domain, const ParamValue& value) {
  if (const auto* c = std::get_if<ContinuousDomain>(&domain)) {
    const double v = std::get<double>(value);
    return c->scale == Scale::kLog ? std::log(v) : v;
  }
  return static_cast<double>(std::get<std::int64_t>(value));
}

ParamValue from_internal(const ParamDomain& domain, double x) {
  if (const auto* c = std::get_if<ContinuousDomain>(&domain)) {
    double v = c->scale == Scale::kLog ? std::exp(x) : x;
    v = std::clamp(v, c->low, c->high);
    if (v >= c->high && !c->upper_closed) v = std::nextafter(c->high, c->low);
    return v;
  }
  const auto& d = std::get<IntegerDomain>(domain);
  return std::clamp(static_cast<std::int64_t>(std::llround(x)), d.low, d.high);
}

NumericMarginal fit_numeric(std::vector<double> centers, Coordinate range, const TpeParams& params) {
  NumericMarginal m;
  m.lo = range.lo;
  m.hi = range.hi;
  m.prior_weight = params.prior_weight;
  const double width = range.hi - range.lo;
  const double floor = params.bandwidth_floor * width;
  const std::size_t n = centers.size();

  std::vector<double> bandwidths(n, width);
  if (n > 1) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return centers[a] < centers[b]; });
    for (std::size_t r = 0; r < n; ++r) {
      double nearest = std::numeric_limits<double>::infinity();
      if (r > 0) nearest = std::min(nearest, centers[order[r]] - centers[order[r - 1]]);
      if (r + 1 < n) nearest = std::min(nearest, centers[order[r + 1]] - centers[order[r]]);
      bandwidths[order[r]] = nearest;
    }
  }
  for (auto& b : bandwidths) b = std::max(b, floor);

  m.centers = std::move(centers);
  m.bandwidths = std::move(bandwidths);
  return m;
}

CategoricalMarginal fit_categorical(const CategoricalDomain& domain, std::span<const Observation> obs,
                                    const std::string& name, const TpeParams& params) {
  std::vector<double> counts(domain.values.size(), params.prior_weight);
  for (const auto& o : obs) {
    const auto& token = o.config.token(name);
    const auto it = std::find(domain.values.begin(), domain.values.end(), token);
    counts[static_cast<std::size_t>(it - domain.values.begin())] += 1.0;
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  for (auto& c : counts) c /= total;
  return CategoricalMarginal{std::move(counts)};
}

}  // namespace

void TpeParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("tpe.gamma must lie in (0, 1)");
  if (n_candidates < 1) throw std::invalid_argument("tpe.n_candidates must be >= 1");
  if (min_observations < 2) throw std::invalid_argument("tpe.min_observations must be >= 2");
  if (!(bandwidth_floor > 0.0)) throw std::invalid_argument("tpe.bandwidth_floor must be > 0");
  if (!(prior_weight > 0.0)) throw std::invalid_argument("tpe.prior_weight must be > 0");
}

std::pair<std::vector<Observation>, std::vector<Observation>> split_observations(
    std::span<const Observation> obs, double gamma) {
  const std::size_t n = obs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return obs[a].loss < obs[b].loss; });

  // The epsilon keeps products like 0.1 * 30 from rounding up past an integer.
  auto n_good = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
  n_good = std::clamp<std::size_t>(n_good, 1, std::max<std::size_t>(n, 1));

  std::vector<bool> is_good(n, false);
  for (std::size_t r = 0; r < std::min(n_good, n); ++r) is_good[order[r]] = true;

  std::pair<std::vector<Observation>, std::vector<Observation>> out;
  for (std::size_t i = 0; i < n; ++i) {
    (is_good[i] ? out.first : out.second).push_back(obs[i]);
  }
  return out;
}

double NumericMarginal::pdf(double x) const {
  if (x < lo || x > hi) return 0.0;
  double sum = prior_weight / (hi - lo);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double s = bandwidths[i];
    const double z = (x - centers[i]) / s;
    sum += kInvSqrt2Pi * std::exp(-0.5 * z * z) / (s * truncation_mass(centers[i], s, lo, hi));
  }
  return sum / (prior_weight + static_cast<double>(centers.size()));
}

double NumericMarginal::mass(double a, double b) const {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (b <= a) return 0.0;
  double sum = prior_weight * (b - a) / (hi - lo);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double s = bandwidths[i];
    const double mu = centers[i];
    sum += (normal_cdf((b - mu) / s) - normal_cdf((a - mu) / s)) / truncation_mass(mu, s, lo, hi);
  }
  return sum / (prior_weight + static_cast<double>(centers.size()));
}

double NumericMarginal::sample(std::mt19937_64& rng) const {
  const double total = prior_weight + static_cast<double>(centers.size());
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  if (u < prior_weight || centers.empty()) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  const auto k = std::min(static_cast<std::size_t>(u - prior_weight), centers.size() - 1);
  // Centers lie inside [lo, hi] and bandwidths never exceed the width, so each
  // draw is accepted with probability above 0.3.
  std::normal_distribution<double> kernel(centers[k], bandwidths[k]);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = kernel(rng);
    if (x >= lo && x <= hi) return x;
  }
  return std::clamp(centers[k], lo, hi);
}

double ParzenDensity::log_density(const Configuration& config) const {
  double total = 0.0;
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const auto& param = space_[i];
    const auto& value = config.at(param.name);
    const auto& marginal = marginals_[i];
    if (const auto* cat = std::get_if<CategoricalMarginal>(&marginal)) {
      const auto& values = std::get<CategoricalDomain>(param.domain).values;
      const auto it = std::find(values.begin(), values.end(), std::get<std::string>(value));
      total += std::log(cat->probabilities[static_cast<std::size_t>(it - values.begin())]);
      continue;
    }
    const auto& num = std::get<NumericMarginal>(marginal);
    const double x = to_internal(param.domain, value);
    if (std::holds_alternative<IntegerDomain>(param.domain)) {
      total += std::log(num.mass(x - 0.5, x + 0.5));
    } else {
      total += std::log(num.pdf(x));
    }
  }
  return total;
}

Configuration ParzenDensity::sample(std::mt19937_64& rng) const {
  std::vector<std::pair<std::string, ParamValue>> entries;
  entries.reserve(space_.size());
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const auto& param = space_[i];
    if (const auto* cat = std::get_if<CategoricalMarginal>(&marginals_[i])) {
      const auto& values = std::get<CategoricalDomain>(param.domain).values;
      std::discrete_distribution<std::size_t> pick(cat->probabilities.begin(), cat->probabilities.end());
      entries.emplace_back(param.name, values[pick(rng)]);
    } else {
      const double x = std::get<NumericMarginal>(marginals_[i]).sample(rng);
      entries.emplace_back(param.name, from_internal(param.domain, x));
    }
  }
  return Configuration(std::move(entries));
}

ParzenDensity fit_density(std::span<const Observation> obs, const SearchSpace& space, const TpeParams& params) {
  for (const auto& o : obs) validate_configuration(space, o.config);

  std::vector<Marginal> marginals;
  marginals.reserve(space.size());
  for (const auto& param : space.params()) {
    if (const auto* cat = std::get_if<CategoricalDomain>(&param.domain)) {
      marginals.emplace_back(fit_categorical(*cat, obs, param.name, params));
      continue;
    }
    std::vector<double> centers;
    centers.reserve(obs.size());
    for (const auto& o : obs) centers.push_back(to_internal(param.domain, o.config.at(param.name)));
    marginals.emplace_back(fit_numeric(std::move(centers), internal_range(param.domain), params));
  }
  return ParzenDensity(space, std::move(marginals));
}

TpeModel::TpeModel(SearchSpace space, TpeParams params) : space_(std::move(space)), params_(params) {
  params_.validate();
}

Configuration TpeModel::suggest(std::mt19937_64& rng) const {
  if (observations_.size() < static_cast<std::size_t>(params_.min_observations)) {
    return sample_uniform(space_, rng);
  }
  const auto [good, bad] = split_observations(observations_, params_.gamma);
  const ParzenDensity l = fit_density(good, space_, params_);
  const ParzenDensity g = fit_density(bad, space_, params_);

  Configuration best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < params_.n_candidates; ++i) {
    Configuration candidate = l.sample(rng);
    const double score = l.log_density(candidate) - g.log_density(candidate);
    if (best.size() == 0 || score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

void TpeModel::update(Configuration config, double loss) {
  if (!std::isfinite(loss)) throw std::invalid_argument("TPE observations need a finite loss");
  validate_configuration(space_, config);
  observations_.push_back(Observation{std::move(config), loss});
}

}  // namespace boasf
