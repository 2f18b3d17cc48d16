#include "boasf/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace boasf {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.rows = indices.size();
  out.cols = cols;
  out.class_names = class_names;
  out.features.reserve(indices.size() * cols);
  out.labels.reserve(indices.size());
  for (auto i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

void Dataset::validate() const {
  if (features.size() != rows * cols || labels.size() != rows) {
    throw std::invalid_argument("dataset '" + name + "': shape mismatch");
  }
  if (cols == 0) throw std::invalid_argument("dataset '" + name + "': no feature columns");
  for (double v : features) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset '" + name + "': non-finite feature value");
  }
  std::vector<bool> present(class_names.size(), false);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names.size()) {
      throw std::invalid_argument("dataset '" + name + "': label out of range");
    }
    present[static_cast<std::size_t>(y)] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw std::invalid_argument("dataset '" + name + "': needs at least two classes");
  }
}

Dataset load_csv(std::istream& in, std::string name) {
  Dataset data;
  data.name = std::move(name);
  std::map<std::string, int> classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (cells.size() < 2) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": need at least one feature and a label");
    }
    if (data.rows == 0) {
      data.cols = cells.size() - 1;
    } else if (cells.size() - 1 != data.cols) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(data.cols + 1) +
                               " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size() || !std::isfinite(v)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                 ": '" + cells[c] + "' is not a finite number");
      }
      data.features.push_back(v);
    }
    const auto& token = cells.back();
    if (token.empty()) throw std::runtime_error("line " + std::to_string(line_no) + ": empty label");
    auto [it, inserted] = classes.try_emplace(token, static_cast<int>(data.class_names.size()));
    if (inserted) data.class_names.push_back(token);
    data.labels.push_back(it->second);
    ++data.rows;
  }
  data.validate();
  return data;
}

Dataset load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return load_csv(in, path);
}

Dataset generate_dataset(const GeneratorSpec& spec) {
  if (spec.samples < 2) throw std::invalid_argument("generator needs at least two samples");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Dataset data;
  data.name = spec.kind;
  data.rows = spec.samples;
  data.cols = 2 + spec.noise_features;
  data.class_names = {"0", "1"};
  data.features.reserve(data.rows * data.cols);

  for (std::size_t i = 0; i < spec.samples; ++i) {
    // Alternate classes so every generator is balanced.
    int label = static_cast<int>(i % 2);
    double x0 = 0.0;
    double x1 = 0.0;
    if (spec.kind == "two-clusters") {
      x0 = (label == 0 ? -3.0 : 3.0) + gauss(rng);
      x1 = gauss(rng);
      if (unit(rng) < spec.noise) label = 1 - label;
    } else if (spec.kind == "xor") {
      // Rejection keeps the class balance exact.
      do {
        x0 = 2.0 * unit(rng) - 1.0;
        x1 = 2.0 * unit(rng) - 1.0;
      } while (static_cast<int>((x0 > 0.0) != (x1 > 0.0)) != label);
      if (unit(rng) < spec.noise) label = 1 - label;
    } else if (spec.kind == "rings") {
      const double radius = (label == 0 ? 1.0 : 2.0) + spec.noise * gauss(rng);
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      x0 = radius * std::cos(angle);
      x1 = radius * std::sin(angle);
    } else {
      throw std::invalid_argument("unknown dataset generator '" + spec.kind + "'");
    }
    data.features.push_back(x0);
    data.features.push_back(x1);
    for (std::size_t f = 0; f < spec.noise_features; ++f) data.features.push_back(gauss(rng));
    data.labels.push_back(label);
  }
  data.validate();
  return data;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("kfold_split needs 2 <= K <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2 || k > n) throw std::invalid_argument("stratified_kfold needs 2 <= K <= n");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> sequence;
  sequence.reserve(n);
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    sequence.insert(sequence.end(), members.begin(), members.end());
  }
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(sequence[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("balanced_accuracy: length mismatch");
  if (y_true.empty()) throw std::invalid_argument("balanced_accuracy: empty input");
  std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    auto& [hits, total] = per_class[y_true[i]];
    ++total;
    if (y_pred[i] == y_true[i]) ++hits;
  }
  double sum = 0.0;
  for (const auto& [label, counts] : per_class) {
    sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return sum / static_cast<double>(per_class.size());
}

double cv_reward(const Learner& learner, const Configuration& hp, const Dataset& data, const CvSpec& cv) {
  validate_configuration(learner.space(), hp);
  const auto folds = stratified_kfold(data.labels, cv.folds, cv.seed);
  std::vector<bool> held_out(data.rows);
  double total = 0.0;
  for (const auto& validation : folds) {
    std::fill(held_out.begin(), held_out.end(), false);
    for (auto i : validation) held_out[i] = true;
    std::vector<std::size_t> training;
    training.reserve(data.rows - validation.size());
    for (std::size_t i = 0; i < data.rows; ++i) {
      if (!held_out[i]) training.push_back(i);
    }
    const Dataset train = data.subset(training);
    const Dataset val = data.subset(validation);
    const auto model = learner.fit(train, hp);
    const auto predicted = model->predict(val);
    total += balanced_accuracy(val.labels, predicted);
  }
  return total / static_cast<double>(folds.size());
}

LearnerObjective::LearnerObjective(std::shared_ptr<const Learner> learner, std::shared_ptr<const Dataset> data,
                                   CvSpec cv)
    : LearnerObjective(learner, std::move(data), cv, learner->space()) {}

LearnerObjective::LearnerObjective(std::shared_ptr<const Learner> learner, std::shared_ptr<const Dataset> data,
                                   CvSpec cv, SearchSpace space)
    : learner_(std::move(learner)), data_(std::move(data)), cv_(cv), space_(std::move(space)) {
  data_->validate();
  if (cv_.folds < 2 || cv_.folds > data_->rows) {
    throw std::invalid_argument("cross-validation needs 2 <= K <= samples");
  }
}

double LearnerObjective::evaluate(const Configuration& config, std::mt19937_64&) const {
  return cv_reward(*learner_, config, *data_, cv_);
}

double branin(double x1, double x2) {
  constexpr double pi = std::numbers::pi;
  constexpr double b = 5.1 / (4.0 * pi * pi);
  constexpr double c = 5.0 / pi;
  constexpr double t = 1.0 / (8.0 * pi);
  const double q = x2 - b * x1 * x1 + c * x1 - 6.0;
  return q * q + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double sphere(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double planted_bernoulli_arm(double mean, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < mean ? 1.0 : 0.0;
}

SearchSpace branin_space() {
  return SearchSpace({{"x1", ContinuousDomain{-5.0, 10.0}}, {"x2", ContinuousDomain{0.0, 15.0}}});
}

std::shared_ptr<const Evaluable> branin_objective() {
  return std::make_shared<FunctionEvaluable>(
      branin_space(), ValueBounds{0.0, 310.0, Orientation::kMinimize},
      [](const Configuration& c, std::mt19937_64&) { return branin(c.number("x1"), c.number("x2")); });
}

std::shared_ptr<const Evaluable> sphere_objective(SearchSpace space) {
  std::vector<std::string> names;
  double hi = 0.0;
  for (const auto& p : space.params()) {
    if (const auto* d = std::get_if<ContinuousDomain>(&p.domain)) {
      hi += std::max(d->low * d->low, d->high * d->high);
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      hi += static_cast<double>(std::max(i->low * i->low, i->high * i->high));
    } else {
      throw std::invalid_argument("sphere objective needs numeric parameters, '" + p.name + "' is categorical");
    }
    names.push_back(p.name);
  }
  if (!(hi > 0.0)) hi = 1.0;
  return std::make_shared<FunctionEvaluable>(std::move(space), ValueBounds{0.0, hi, Orientation::kMinimize},
                                             [names](const Configuration& c, std::mt19937_64&) {
                                               std::vector<double> x;
                                               x.reserve(names.size());
                                               for (const auto& n : names) x.push_back(c.number(n));
                                               return sphere(x);
                                             });
}

std::shared_ptr<const Evaluable> planted_arm_objective(double mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("planted arm mean must lie in [0, 1]");
  return std::make_shared<FunctionEvaluable>(
      SearchSpace({{"unused", ContinuousDomain{0.0, 1.0}}}), ValueBounds{0.0, 1.0, Orientation::kMaximize},
      [mean](const Configuration&, std::mt19937_64& rng) { return planted_bernoulli_arm(mean, rng); });
}

}  // namespace boasf
