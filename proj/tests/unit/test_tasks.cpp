#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "boasf/tasks.hpp"

using namespace boasf;

namespace {

// Always predicts the most frequent training label (lowest index on ties).
class MajorityLearner final : public Learner {
 public:
  [[nodiscard]] std::string name() const override { return "majority"; }
  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] Configuration defaults() const override { return Configuration({{"unused", 0.5}}); }
  [[nodiscard]] std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration&) const override {
    std::vector<int> counts(train.num_classes(), 0);
    for (int y : train.labels) ++counts[static_cast<std::size_t>(y)];
    const int label = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    return std::make_unique<Constant>(label);
  }

 private:
  struct Constant final : Predictor {
    explicit Constant(int label) : label(label) {}
    [[nodiscard]] std::vector<int> predict(const Dataset& data) const override {
      return std::vector<int>(data.rows, label);
    }
    int label;
  };
  SearchSpace space_{{{"unused", ContinuousDomain{0.0, 1.0}}}};
};

// Independent Branin for the grid oracle.
double branin_oracle(double x1, double x2) {
  const double pi = std::numbers::pi;
  const double b = 5.1 / (4 * pi * pi);
  const double c = 5 / pi;
  const double t = 1 / (8 * pi);
  const double q = x2 - b * x1 * x1 + c * x1 - 6;
  return q * q + 10 * (1 - t) * std::cos(x1) + 10;
}

Dataset generated(const std::string& kind, std::size_t samples, std::uint64_t seed, std::size_t noise_features = 0) {
  GeneratorSpec g;
  g.kind = kind;
  g.samples = samples;
  g.seed = seed;
  g.noise_features = noise_features;
  return generate_dataset(g);
}

}  // namespace

TEST_CASE("kfold_split sizes, disjointness and determinism") {
  auto folds = kfold_split(6, 3, 1);
  REQUIRE(folds.size() == 3);
  for (const auto& f : folds) CHECK(f.size() == 2);

  folds = kfold_split(7, 3, 1);
  std::multiset<std::size_t> sizes;
  for (const auto& f : folds) sizes.insert(f.size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});

  std::set<std::size_t> seen;
  for (const auto& f : folds) seen.insert(f.begin(), f.end());
  CHECK(seen.size() == 7);
  CHECK(*seen.rbegin() == 6);

  CHECK(kfold_split(50, 5, 9) == kfold_split(50, 5, 9));
  CHECK(kfold_split(50, 5, 9) != kfold_split(50, 5, 10));
  CHECK_THROWS(kfold_split(3, 4, 0));
  CHECK_THROWS(kfold_split(3, 1, 0));
}

TEST_CASE("stratified folds keep class proportions and cover every index") {
  std::vector<int> labels;
  for (int i = 0; i < 90; ++i) labels.push_back(i < 60 ? 0 : 1);
  const auto folds = stratified_kfold(labels, 3, 4);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.size() == 30);
    int ones = 0;
    for (auto i : f) ones += labels[i];
    CHECK(ones == 10);
    seen.insert(f.begin(), f.end());
  }
  CHECK(seen.size() == 90);
}

TEST_CASE("balanced_accuracy examples") {
  const std::vector<int> y{0, 0, 1, 1};
  CHECK(balanced_accuracy(y, y) == 1.0);
  CHECK(balanced_accuracy(y, std::vector<int>{1, 1, 1, 1}) == 0.5);
  // Class 0 recall 1.0, class 1 recall 0.5.
  CHECK(balanced_accuracy(y, std::vector<int>{0, 0, 1, 0}) == doctest::Approx(0.75));
  CHECK_THROWS(balanced_accuracy(y, std::vector<int>{0}));
}

TEST_CASE("balanced_accuracy is invariant under class relabeling (property)") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cls(0, 3);
  const std::vector<int> perm{2, 0, 3, 1};
  for (int t = 0; t < 500; ++t) {
    std::vector<int> y(40);
    std::vector<int> p(40);
    for (auto& v : y) v = cls(rng);
    for (auto& v : p) v = cls(rng);
    std::vector<int> y2;
    std::vector<int> p2;
    for (int v : y) y2.push_back(perm[static_cast<std::size_t>(v)]);
    for (int v : p) p2.push_back(perm[static_cast<std::size_t>(v)]);
    REQUIRE(balanced_accuracy(y, p) == doctest::Approx(balanced_accuracy(y2, p2)).epsilon(1e-12));
  }
}

TEST_CASE("majority predictor on a balanced dataset scores 0.5") {
  const auto data = generated("two-clusters", 120, 5);
  CHECK(cv_reward(MajorityLearner{}, Configuration({{"unused", 0.5}}), data, CvSpec{3, 1}) == 0.5);
}

TEST_CASE("1-NN on well-separated clusters") {
  // Frozen from one run of this exact call: 0.99.
  const auto data = generated("two-clusters", 300, 42);
  const auto knn = find_learner("knn");
  const double reward = cv_reward(*knn, Configuration({{"k", std::int64_t{1}}}), data, CvSpec{3, 7});
  CHECK(reward >= 0.98);
  CHECK(reward == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(cv_reward(*knn, Configuration({{"k", std::int64_t{1}}}), data, CvSpec{3, 7}) == reward);
}

TEST_CASE("a depth-1 tree cannot learn xor") {
  const auto data = generated("xor", 400, 42);
  const auto tree = find_learner("decision_tree");
  const Configuration stump({{"criterion", std::string("gini")},
                             {"max_depth", std::int64_t{1}},
                             {"min_samples_split", std::int64_t{2}}});
  const double reward = cv_reward(*tree, stump, data, CvSpec{3, 7});

  // Oracle: best balanced accuracy any single-feature threshold achieves on
  // the full dataset, either orientation.
  double best_stump = 0.0;
  for (std::size_t f = 0; f < data.cols; ++f) {
    std::vector<double> values;
    for (std::size_t i = 0; i < data.rows; ++i) values.push_back(data.row(i)[f]);
    std::sort(values.begin(), values.end());
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      const double threshold = (values[t] + values[t + 1]) / 2;
      for (int flip = 0; flip < 2; ++flip) {
        std::vector<int> pred;
        for (std::size_t i = 0; i < data.rows; ++i) pred.push_back((data.row(i)[f] <= threshold ? 1 : 0) ^ flip);
        best_stump = std::max(best_stump, balanced_accuracy(data.labels, pred));
      }
    }
  }
  CHECK(best_stump < 0.6);
  CHECK(reward <= best_stump);
  CHECK(std::abs(reward - 0.5) < 0.05);

  // Greedy splits need extra depth on xor: 0.81 at depth 4, 0.97 at depth 8.
  const Configuration deep({{"criterion", std::string("entropy")},
                            {"max_depth", std::int64_t{8}},
                            {"min_samples_split", std::int64_t{2}}});
  CHECK(cv_reward(*tree, deep, data, CvSpec{3, 7}) > 0.9);
}

TEST_CASE("every builtin learner trains and predicts") {
  const auto data = generated("rings", 100, 11, 2);
  const auto learners = builtin_learners();
  REQUIRE(learners.size() == 4);
  std::mt19937_64 rng(2);
  for (const auto& l : learners) {
    CAPTURE(l->name());
    CHECK(find_learner(l->name())->name() == l->name());
    CHECK_NOTHROW(validate_configuration(l->space(), l->defaults()));
    const auto model = l->fit(data, l->defaults());
    const auto pred = model->predict(data);
    CHECK(pred.size() == data.rows);
    for (int t = 0; t < 5; ++t) {
      const double r = cv_reward(*l, sample_uniform(l->space(), rng), data, CvSpec{3, 1});
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
  CHECK(find_learner("svm") == nullptr);
}

TEST_CASE("cross-validation holds out data, so noisy 1-NN scores below 1") {
  GeneratorSpec g;
  g.kind = "two-clusters";
  g.samples = 200;
  g.noise = 0.1;
  g.seed = 3;
  const auto data = generate_dataset(g);
  CHECK(cv_reward(*find_learner("knn"), Configuration({{"k", std::int64_t{1}}}), data, CvSpec{3, 1}) < 1.0);
}

TEST_CASE("cv_reward rejects hyperparameters outside the learner space") {
  const auto data = generated("two-clusters", 60, 1);
  CHECK_THROWS_AS(cv_reward(*find_learner("knn"), Configuration({{"k", std::int64_t{0}}}), data, CvSpec{3, 1}),
                  SpaceError);
}

TEST_CASE("learner objectives are deterministic") {
  const auto data = std::make_shared<Dataset>(generated("xor", 150, 8, 1));
  const LearnerObjective obj(find_learner("logistic_regression"), data, CvSpec{3, 2});
  std::mt19937_64 rng(1);
  const auto hp = obj.learner().defaults();
  CHECK(obj.evaluate(hp, rng) == obj.evaluate(hp, rng));
}

TEST_CASE("branin minimum agrees with a dense grid") {
  // 2000 x 2000 grid over [-5, 10] x [0, 15]; the grid misses the exact
  // minimizers by at most half a cell.
  double grid_min = INFINITY;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double x1 = -5.0 + 15.0 * i / n;
    for (int j = 0; j <= n; ++j) grid_min = std::min(grid_min, branin_oracle(x1, 15.0 * j / n));
  }
  CHECK(grid_min >= kBraninMinimum);
  CHECK(grid_min - kBraninMinimum < 1e-4);
  CHECK(std::abs(branin(std::numbers::pi, 2.275) - kBraninMinimum) < 1e-9);
  CHECK(std::abs(branin(-std::numbers::pi, 12.275) - kBraninMinimum) < 1e-9);
  CHECK(branin(3.3, 7.1) == doctest::Approx(branin_oracle(3.3, 7.1)));
}

TEST_CASE("synthetic objectives") {
  CHECK(sphere(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(sphere(std::vector<double>{1.0, -2.0}) == 5.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) CHECK(planted_bernoulli_arm(1.0, rng) == 1.0);
  for (int i = 0; i < 100; ++i) CHECK(planted_bernoulli_arm(0.0, rng) == 0.0);
  CHECK_THROWS(planted_arm_objective(1.5));

  const auto b = branin_objective();
  CHECK(b->evaluate(Configuration({{"x1", std::numbers::pi}, {"x2", 2.275}}), rng) ==
        doctest::Approx(kBraninMinimum));
  CHECK(normalize_reward(kBraninMinimum, b->bounds()) > 0.998);

  const SearchSpace space({{"a", ContinuousDomain{-5.0, 5.0}}, {"k", IntegerDomain{-2, 3}}});
  const auto s = sphere_objective(space);
  CHECK(s->evaluate(Configuration({{"a", 2.0}, {"k", std::int64_t{-2}}}), rng) == 8.0);
  CHECK(s->bounds().hi == 34.0);
  CHECK_THROWS(sphere_objective(SearchSpace({{"c", CategoricalDomain{{"p"}}}})));
}

TEST_CASE("generators are seeded and balanced") {
  for (const char* kind : {"two-clusters", "xor", "rings"}) {
    const auto a = generated(kind, 101, 4, 3);
    const auto b = generated(kind, 101, 4, 3);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.cols == 5);
    const auto ones = std::count(a.labels.begin(), a.labels.end(), 1);
    CHECK(ones == 50);
  }
  CHECK_THROWS(generated("spiral", 10, 1));
}

TEST_CASE("CSV loading") {
  std::istringstream ok("1.0,2.0,yes\n3.5,-1,no\n\n0,0,yes\n");
  const auto d = load_csv(ok);
  CHECK(d.rows == 3);
  CHECK(d.cols == 2);
  CHECK(d.num_classes() == 2);
  CHECK(d.row(1)[0] == 3.5);
  CHECK(d.class_names[static_cast<std::size_t>(d.labels[1])] == "no");

  std::istringstream ragged("1,2,a\n1,b\n");
  try {
    load_csv(ragged);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream text("1,x,a\n2,3,b\n");
  CHECK_THROWS_WITH(load_csv(text), doctest::Contains("line 1, column 2"));
  std::istringstream one_class("1,2,a\n3,4,a\n");
  CHECK_THROWS(load_csv(one_class));
  CHECK_THROWS(load_csv_file("/nonexistent/data.csv"));
}
