#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "boasf/tasks.hpp"

namespace boasf {
namespace {

// Per-column mean and standard deviation fitted on training rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Dataset& data) {
    Standardizer s;
    s.mean.assign(data.cols, 0.0);
    s.scale.assign(data.cols, 0.0);
    for (std::size_t i = 0; i < data.rows; ++i) {
      const auto r = data.row(i);
      for (std::size_t c = 0; c < data.cols; ++c) s.mean[c] += r[c];
    }
    for (auto& m : s.mean) m /= static_cast<double>(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
      const auto r = data.row(i);
      for (std::size_t c = 0; c < data.cols; ++c) s.scale[c] += (r[c] - s.mean[c]) * (r[c] - s.mean[c]);
    }
    for (auto& v : s.scale) {
      v = std::sqrt(v / static_cast<double>(data.rows));
      if (!(v > 1e-12)) v = 1.0;
    }
    return s;
  }

  [[nodiscard]] std::vector<double> apply(const Dataset& data) const {
    std::vector<double> out(data.features.size());
    for (std::size_t i = 0; i < data.rows; ++i) {
      const auto r = data.row(i);
      for (std::size_t c = 0; c < data.cols; ++c) out[i * data.cols + c] = (r[c] - mean[c]) / scale[c];
    }
    return out;
  }
};

int argmax_label(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

// ---------------------------------------------------------------------------
// k-nearest neighbours

class KnnPredictor final : public Predictor {
 public:
  KnnPredictor(Standardizer s, std::vector<double> x, std::vector<int> y, std::size_t cols, std::size_t classes,
               std::size_t k)
      : standardizer_(std::move(s)), x_(std::move(x)), y_(std::move(y)), cols_(cols), classes_(classes), k_(k) {}

  [[nodiscard]] std::vector<int> predict(const Dataset& data) const override {
    const auto q = standardizer_.apply(data);
    const std::size_t n = y_.size();
    const std::size_t k = std::min(k_, n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<int> out;
    out.reserve(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
          const double diff = q[i * cols_ + c] - x_[j * cols_ + c];
          d += diff * diff;
        }
        dist[j] = {d, j};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      std::vector<std::size_t> votes(classes_, 0);
      for (std::size_t r = 0; r < k; ++r) ++votes[static_cast<std::size_t>(y_[dist[r].second])];
      const auto top = *std::max_element(votes.begin(), votes.end());
      // Ties go to the class of the closest tied neighbour.
      int label = y_[dist[0].second];
      for (std::size_t r = 0; r < k; ++r) {
        const int c = y_[dist[r].second];
        if (votes[static_cast<std::size_t>(c)] == top) {
          label = c;
          break;
        }
      }
      out.push_back(label);
    }
    return out;
  }

 private:
  Standardizer standardizer_;
  std::vector<double> x_;
  std::vector<int> y_;
  std::size_t cols_;
  std::size_t classes_;
  std::size_t k_;
};

class KnnLearner final : public Learner {
 public:
  KnnLearner() : space_({{"k", IntegerDomain{1, 25}}}) {}
  [[nodiscard]] std::string name() const override { return "knn"; }
  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] Configuration defaults() const override { return Configuration({{"k", std::int64_t{5}}}); }

  [[nodiscard]] std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration& hp) const override {
    auto s = Standardizer::fit(train);
    auto x = s.apply(train);
    return std::make_unique<KnnPredictor>(std::move(s), std::move(x), train.labels, train.cols, train.num_classes(),
                                          static_cast<std::size_t>(hp.integer("k")));
  }

 private:
  SearchSpace space_;
};

// ---------------------------------------------------------------------------
// CART decision tree

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

class TreePredictor final : public Predictor {
 public:
  explicit TreePredictor(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  [[nodiscard]] std::vector<int> predict(const Dataset& data) const override {
    std::vector<int> out;
    out.reserve(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
      const auto r = data.row(i);
      int n = 0;
      while (nodes_[static_cast<std::size_t>(n)].feature >= 0) {
        const auto& node = nodes_[static_cast<std::size_t>(n)];
        n = r[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
      }
      out.push_back(nodes_[static_cast<std::size_t>(n)].label);
    }
    return out;
  }

 private:
  std::vector<TreeNode> nodes_;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, bool entropy, int max_depth, std::size_t min_split)
      : data_(data), entropy_(entropy), max_depth_(max_depth), min_split_(min_split) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(data_.rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  [[nodiscard]] double impurity(std::span<const double> counts, double total) const {
    if (total <= 0.0) return 0.0;
    double acc = 0.0;
    for (double c : counts) {
      if (c <= 0.0) continue;
      const double p = c / total;
      acc += entropy_ ? -p * std::log2(p) : p * p;
    }
    return entropy_ ? acc : 1.0 - acc;
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const std::size_t classes = data_.num_classes();
    std::vector<double> counts(classes, 0.0);
    for (auto i : rows) counts[static_cast<std::size_t>(data_.labels[i])] += 1.0;

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_.back().label = argmax_label(counts);

    const auto n = static_cast<double>(rows.size());
    const double parent = impurity(counts, n);
    if (depth >= max_depth_ || rows.size() < min_split_ || parent <= 0.0) return id;

    double best_score = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<double> left(classes);
    std::vector<double> right(classes);
    for (std::size_t f = 0; f < data_.cols; ++f) {
      std::sort(rows.begin(), rows.end(), [&](auto a, auto b) {
        const double va = data_.row(a)[f];
        const double vb = data_.row(b)[f];
        return va < vb || (va == vb && a < b);
      });
      std::fill(left.begin(), left.end(), 0.0);
      right = counts;
      for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
        const auto y = static_cast<std::size_t>(data_.labels[rows[r]]);
        left[y] += 1.0;
        right[y] -= 1.0;
        const double v = data_.row(rows[r])[f];
        const double next = data_.row(rows[r + 1])[f];
        if (next <= v) continue;
        const auto nl = static_cast<double>(r + 1);
        const double score = (nl * impurity(left, nl) + (n - nl) * impurity(right, n - nl)) / n;
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (v + next);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> lo;
    std::vector<std::size_t> hi;
    for (auto i : rows) {
      (data_.row(i)[static_cast<std::size_t>(best_feature)] <= best_threshold ? lo : hi).push_back(i);
    }
    const int l = grow(lo, depth + 1);
    const int r = grow(hi, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const Dataset& data_;
  bool entropy_;
  int max_depth_;
  std::size_t min_split_;
  std::vector<TreeNode> nodes_;
};

class DecisionTreeLearner final : public Learner {
 public:
  DecisionTreeLearner()
      : space_({{"criterion", CategoricalDomain{{"gini", "entropy"}}},
                {"max_depth", IntegerDomain{1, 12}},
                {"min_samples_split", IntegerDomain{2, 21}}}) {}
  [[nodiscard]] std::string name() const override { return "decision_tree"; }
  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] Configuration defaults() const override {
    return Configuration({{"criterion", std::string("gini")},
                          {"max_depth", std::int64_t{12}},
                          {"min_samples_split", std::int64_t{2}}});
  }

  [[nodiscard]] std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration& hp) const override {
    TreeBuilder builder(train, hp.token("criterion") == "entropy", static_cast<int>(hp.integer("max_depth")),
                        static_cast<std::size_t>(hp.integer("min_samples_split")));
    return std::make_unique<TreePredictor>(builder.build());
  }

 private:
  SearchSpace space_;
};

// ---------------------------------------------------------------------------
// Multinomial logistic regression, batch gradient descent

class LogisticPredictor final : public Predictor {
 public:
  LogisticPredictor(Standardizer s, std::vector<double> w, std::size_t classes, std::size_t cols)
      : standardizer_(std::move(s)), w_(std::move(w)), classes_(classes), cols_(cols) {}

  [[nodiscard]] std::vector<int> predict(const Dataset& data) const override {
    const auto x = standardizer_.apply(data);
    std::vector<int> out;
    out.reserve(data.rows);
    std::vector<double> z(classes_);
    for (std::size_t i = 0; i < data.rows; ++i) {
      for (std::size_t k = 0; k < classes_; ++k) {
        const double* wk = &w_[k * (cols_ + 1)];
        double s = wk[cols_];
        for (std::size_t c = 0; c < cols_; ++c) s += wk[c] * x[i * cols_ + c];
        z[k] = s;
      }
      out.push_back(argmax_label(z));
    }
    return out;
  }

 private:
  Standardizer standardizer_;
  std::vector<double> w_;  // classes x (cols + 1), bias last
  std::size_t classes_;
  std::size_t cols_;
};

class LogisticRegressionLearner final : public Learner {
 public:
  LogisticRegressionLearner()
      : space_({{"penalty", CategoricalDomain{{"none", "l2"}}},
                {"C", ContinuousDomain{1e-4, 1e4, Scale::kLog}},
                {"max_iter", IntegerDomain{50, 500}}}) {}
  [[nodiscard]] std::string name() const override { return "logistic_regression"; }
  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] Configuration defaults() const override {
    return Configuration({{"penalty", std::string("l2")}, {"C", 1.0}, {"max_iter", std::int64_t{100}}});
  }

  [[nodiscard]] std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration& hp) const override {
    auto s = Standardizer::fit(train);
    const auto x = s.apply(train);
    const std::size_t n = train.rows;
    const std::size_t d = train.cols;
    const std::size_t classes = train.num_classes();
    const std::size_t stride = d + 1;
    const double lambda = hp.token("penalty") == "l2" ? 1.0 / (hp.number("C") * static_cast<double>(n)) : 0.0;

    double mean_sq_norm = 0.0;
    for (double v : x) mean_sq_norm += v * v;
    mean_sq_norm = mean_sq_norm / static_cast<double>(n) + 1.0;
    // Step below the inverse smoothness of the softmax loss keeps descent stable.
    const double step = 1.0 / (0.5 * mean_sq_norm + lambda);

    std::vector<double> w(classes * stride, 0.0);
    std::vector<double> grad(w.size());
    std::vector<double> p(classes);
    const auto iterations = hp.integer("max_iter");
    for (std::int64_t it = 0; it < iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double* xi = &x[i * d];
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < classes; ++k) {
          const double* wk = &w[k * stride];
          double z = wk[d];
          for (std::size_t c = 0; c < d; ++c) z += wk[c] * xi[c];
          p[k] = z;
          top = std::max(top, z);
        }
        double total = 0.0;
        for (auto& v : p) {
          v = std::exp(v - top);
          total += v;
        }
        for (std::size_t k = 0; k < classes; ++k) {
          const double r = p[k] / total - (train.labels[i] == static_cast<int>(k) ? 1.0 : 0.0);
          double* gk = &grad[k * stride];
          for (std::size_t c = 0; c < d; ++c) gk[c] += r * xi[c];
          gk[d] += r;
        }
      }
      for (std::size_t k = 0; k < classes; ++k) {
        for (std::size_t c = 0; c < stride; ++c) {
          const std::size_t idx = k * stride + c;
          double g = grad[idx] / static_cast<double>(n);
          if (c < d) g += lambda * w[idx];
          w[idx] -= step * g;
        }
      }
    }
    return std::make_unique<LogisticPredictor>(std::move(s), std::move(w), classes, d);
  }

 private:
  SearchSpace space_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

class GaussianNbPredictor final : public Predictor {
 public:
  GaussianNbPredictor(std::vector<double> log_prior, std::vector<double> mean, std::vector<double> var,
                      std::size_t cols)
      : log_prior_(std::move(log_prior)), mean_(std::move(mean)), var_(std::move(var)), cols_(cols) {}

  [[nodiscard]] std::vector<int> predict(const Dataset& data) const override {
    const std::size_t classes = log_prior_.size();
    std::vector<int> out;
    out.reserve(data.rows);
    std::vector<double> score(classes);
    for (std::size_t i = 0; i < data.rows; ++i) {
      const auto r = data.row(i);
      for (std::size_t k = 0; k < classes; ++k) {
        double s = log_prior_[k];
        for (std::size_t c = 0; c < cols_; ++c) {
          const double v = var_[k * cols_ + c];
          const double diff = r[c] - mean_[k * cols_ + c];
          s -= 0.5 * (std::log(2.0 * 3.14159265358979323846 * v) + diff * diff / v);
        }
        score[k] = s;
      }
      out.push_back(argmax_label(score));
    }
    return out;
  }

 private:
  std::vector<double> log_prior_;
  std::vector<double> mean_;
  std::vector<double> var_;
  std::size_t cols_;
};

class GaussianNbLearner final : public Learner {
 public:
  GaussianNbLearner() : space_({{"var_smoothing", ContinuousDomain{1e-12, 1e-3, Scale::kLog}}}) {}
  [[nodiscard]] std::string name() const override { return "gaussian_nb"; }
  [[nodiscard]] const SearchSpace& space() const override { return space_; }
  [[nodiscard]] Configuration defaults() const override { return Configuration({{"var_smoothing", 1e-9}}); }

  [[nodiscard]] std::unique_ptr<Predictor> fit(const Dataset& train, const Configuration& hp) const override {
    const std::size_t classes = train.num_classes();
    const std::size_t d = train.cols;
    std::vector<double> count(classes, 0.0);
    std::vector<double> mean(classes * d, 0.0);
    std::vector<double> var(classes * d, 0.0);
    for (std::size_t i = 0; i < train.rows; ++i) {
      const auto k = static_cast<std::size_t>(train.labels[i]);
      count[k] += 1.0;
      const auto r = train.row(i);
      for (std::size_t c = 0; c < d; ++c) mean[k * d + c] += r[c];
    }
    for (std::size_t k = 0; k < classes; ++k) {
      for (std::size_t c = 0; c < d; ++c) mean[k * d + c] /= std::max(count[k], 1.0);
    }
    for (std::size_t i = 0; i < train.rows; ++i) {
      const auto k = static_cast<std::size_t>(train.labels[i]);
      const auto r = train.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = r[c] - mean[k * d + c];
        var[k * d + c] += diff * diff;
      }
    }
    // Smoothing is relative to the widest feature variance.
    const auto overall = Standardizer::fit(train);
    double widest = 0.0;
    for (double s : overall.scale) widest = std::max(widest, s * s);
    const double epsilon = std::max(hp.number("var_smoothing") * widest, 1e-300);

    std::vector<double> log_prior(classes);
    for (std::size_t k = 0; k < classes; ++k) {
      log_prior[k] = count[k] > 0.0 ? std::log(count[k] / static_cast<double>(train.rows))
                                    : -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < d; ++c) {
        var[k * d + c] = var[k * d + c] / std::max(count[k], 1.0) + epsilon;
      }
    }
    return std::make_unique<GaussianNbPredictor>(std::move(log_prior), std::move(mean), std::move(var), d);
  }

 private:
  SearchSpace space_;
};

}  // namespace

std::vector<std::shared_ptr<const Learner>> builtin_learners() {
  return {std::make_shared<KnnLearner>(), std::make_shared<DecisionTreeLearner>(),
          std::make_shared<LogisticRegressionLearner>(), std::make_shared<GaussianNbLearner>()};
}

std::shared_ptr<const Learner> find_learner(const std::string& name) {
  for (auto& l : builtin_learners()) {
    if (l->name() == name) return l;
  }
  return nullptr;
}

}  // namespace boasf
