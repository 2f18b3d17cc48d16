#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace boasf {

// Thrown for malformed domains, spaces and configurations.
class SpaceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scale { kLinear, kLog };

// Real interval [low, high], or [low, high) when upper_closed is false.
// Open upper bounds only appear on restrictions produced by partition().
struct ContinuousDomain {
  double low = 0.0;
  double high = 1.0;
  Scale scale = Scale::kLinear;
  bool upper_closed = true;
};

// Inclusive integer range.
struct IntegerDomain {
  std::int64_t low = 0;
  std::int64_t high = 1;
};

struct CategoricalDomain {
  std::vector<std::string> values;
};

using ParamDomain = std::variant<ContinuousDomain, IntegerDomain, CategoricalDomain>;

using ParamValue = std::variant<double, std::int64_t, std::string>;

struct Param {
  std::string name;
  ParamDomain domain;
};

bool domain_contains(const ParamDomain& domain, const ParamValue& value);

// Number of pieces a domain can be split into; 0 means unbounded (continuous).
std::size_t domain_cardinality(const ParamDomain& domain);

class SearchSpace {
 public:
  // Validates every domain: low < high, log scale needs low > 0, categorical
  // values non-empty and distinct, parameter names unique, at least one parameter.
  explicit SearchSpace(std::vector<Param> params);

  // Builds a restriction of an existing space. Integer restrictions may be a
  // single value (low == high) and continuous ones may have an open upper end.
  static SearchSpace restricted(std::vector<Param> params);

  [[nodiscard]] const std::vector<Param>& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t size() const noexcept { return params_.size(); }
  [[nodiscard]] const Param& operator[](std::size_t i) const { return params_[i]; }
  // Throws SpaceError for an unknown name.
  [[nodiscard]] std::size_t index_of(std::string_view name) const;

  friend bool operator==(const SearchSpace&, const SearchSpace&);

 private:
  struct Unchecked {};
  SearchSpace(Unchecked, std::vector<Param> params);
  std::vector<Param> params_;
};

bool operator==(const ContinuousDomain&, const ContinuousDomain&);
bool operator==(const IntegerDomain&, const IntegerDomain&);
bool operator==(const CategoricalDomain&, const CategoricalDomain&);
bool operator==(const Param&, const Param&);

// An assignment of one value per parameter, in the owning space's order.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<std::pair<std::string, ParamValue>> entries)
      : entries_(std::move(entries)) {}

  [[nodiscard]] const std::vector<std::pair<std::string, ParamValue>>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  // Throws SpaceError when the name is absent.
  [[nodiscard]] const ParamValue& at(std::string_view name) const;
  [[nodiscard]] double number(std::string_view name) const;
  [[nodiscard]] std::int64_t integer(std::string_view name) const;
  [[nodiscard]] const std::string& token(std::string_view name) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::pair<std::string, ParamValue>> entries_;
};

// Throws SpaceError unless config has exactly the space's names and each value
// lies in its domain.
void validate_configuration(const SearchSpace& space, const Configuration& config);
[[nodiscard]] bool space_contains(const SearchSpace& space, const Configuration& config);

// Log-scale parameters are drawn uniformly in log(value).
Configuration sample_uniform(const SearchSpace& space, std::mt19937_64& rng);

// One cell of a partition. The restricted space is itself a valid SearchSpace.
class SubSpace {
 public:
  SubSpace(SearchSpace parent, SearchSpace restricted, std::vector<std::size_t> cell)
      : parent_(std::move(parent)), space_(std::move(restricted)), cell_(std::move(cell)) {}

  [[nodiscard]] const SearchSpace& parent() const noexcept { return parent_; }
  [[nodiscard]] const SearchSpace& space() const noexcept { return space_; }
  // Chunk index chosen for each parameter.
  [[nodiscard]] const std::vector<std::size_t>& cell() const noexcept { return cell_; }

 private:
  SearchSpace parent_;
  SearchSpace space_;
  std::vector<std::size_t> cell_;
};

// Splits every parameter into min(k, cardinality) contiguous pieces and returns
// the cross product, first parameter varying slowest. Continuous pieces are
// equal width (equal in log space for log scale), half-open except the last.
// Integer and categorical pieces are near-equal chunks, larger chunks first.
std::vector<SubSpace> partition(const SearchSpace& space, int k);

// Closed-form number of sub-spaces partition(space, k) returns.
std::size_t partition_count(const SearchSpace& space, int k);

// Throws SpaceError when config names do not match the parent space.
bool contains(const SubSpace& sub, const Configuration& config);

std::string describe_domain(const ParamDomain& domain);
std::string describe_value(const ParamValue& value);

}  // namespace boasf
