#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "boasf/evaluator.hpp"
#include "boasf/space.hpp"

namespace boasf {

// Row-major feature matrix with integer class labels indexing class_names.
struct Dataset {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {features.data() + i * cols, cols};
  }
  [[nodiscard]] std::size_t num_classes() const noexcept { return class_names.size(); }
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

  // Throws std::invalid_argument on shape mismatches, non-finite features or
  // fewer than two classes.
  void validate() const;
};

// Headerless CSV, numeric feature columns, last column the class token.
// Throws std::runtime_error naming the offending line.
Dataset load_csv(std::istream& in, std::string name = "csv");
Dataset load_csv_file(const std::string& path);

struct GeneratorSpec {
  std::string kind = "two-clusters";  // two-clusters | xor | rings
  std::size_t samples = 600;
  std::size_t noise_features = 0;  // extra N(0, 1) columns
  double noise = 0.0;              // kind-specific noise level
  std::uint64_t seed = 0;
};

// two-clusters: unit-variance Gaussians centred at (-3, 0) and (3, 0), plus
//   `noise` label-flip probability.
// xor: uniform on [-1, 1]^2, class = sign(x0) xor sign(x1), label flips with
//   probability `noise`.
// rings: radii 1 and 2 with radial N(0, noise) jitter.
Dataset generate_dataset(const GeneratorSpec& spec);

// Seeded shuffle then round-robin: K disjoint folds whose sizes differ by <= 1.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// Stratified variant: each class is shuffled, classes are concatenated and the
// sequence is dealt round-robin, so fold sizes still differ by <= 1.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed);

// Mean recall over the classes present in y_true.
double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred);

class Predictor {
 public:
  virtual ~Predictor() = default;
  [[nodiscard]] virtual std::vector<int> predict(const Dataset& data) const = 0;
};

class Learner {
 public:
  virtual ~Learner() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual const SearchSpace& space() const = 0;
  [[nodiscard]] virtual Configuration defaults() const = 0;
  [[nodiscard]] virtual std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration& hp) const = 0;
};

// knn, decision_tree, logistic_regression, gaussian_nb.
std::vector<std::shared_ptr<const Learner>> builtin_learners();
// nullptr for an unknown name.
std::shared_ptr<const Learner> find_learner(const std::string& name);

struct CvSpec {
  std::size_t folds = 3;
  std::uint64_t seed = 0;
};

// Mean balanced accuracy over stratified folds, training on each complement.
double cv_reward(const Learner& learner, const Configuration& hp, const Dataset& data, const CvSpec& cv);

// Cross-validated learner as an objective; raw values are already in [0, 1].
class LearnerObjective final : public Evaluable {
 public:
  LearnerObjective(std::shared_ptr<const Learner> learner, std::shared_ptr<const Dataset> data, CvSpec cv);
  LearnerObjective(std::shared_ptr<const Learner> learner, std::shared_ptr<const Dataset> data, CvSpec cv,
                   SearchSpace space);

  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] ValueBounds bounds() const override { return {0.0, 1.0, Orientation::kMaximize}; }
  double evaluate(const Configuration& config, std::mt19937_64& rng) const override;

  [[nodiscard]] const Learner& learner() const noexcept { return *learner_; }

 private:
  std::shared_ptr<const Learner> learner_;
  std::shared_ptr<const Dataset> data_;
  CvSpec cv_;
  SearchSpace space_;
};

double branin(double x1, double x2);
double sphere(std::span<const double> x);
// Bernoulli draw: 1 with probability `mean`.
double planted_bernoulli_arm(double mean, std::mt19937_64& rng);

constexpr double kBraninMinimum = 0.397887357729739;

SearchSpace branin_space();
// Minimized, normalized against [0, 310] (the function tops out near 308.13).
std::shared_ptr<const Evaluable> branin_objective();
// Sum of squares over every numeric parameter, minimized and normalized
// against [0, sum of max(low^2, high^2)].
std::shared_ptr<const Evaluable> sphere_objective(SearchSpace space);
// Ignores its configuration and returns a Bernoulli(mean) reward.
std::shared_ptr<const Evaluable> planted_arm_objective(double mean);

}  // namespace boasf
