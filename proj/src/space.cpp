#include "boasf/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace boasf {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_domain(const Param& p, bool allow_degenerate) {
  std::visit(
      Overloaded{
          [&](const ContinuousDomain& d) {
            if (!std::isfinite(d.low) || !std::isfinite(d.high) || !(d.low < d.high)) {
              throw SpaceError("parameter '" + p.name + "': continuous domain needs finite low < high");
            }
            if (d.scale == Scale::kLog && !(d.low > 0.0)) {
              throw SpaceError("parameter '" + p.name + "': logarithmic scale needs low > 0");
            }
          },
          [&](const IntegerDomain& d) {
            if (allow_degenerate ? d.low > d.high : d.low >= d.high) {
              throw SpaceError("parameter '" + p.name + "': integer domain needs low < high");
            }
          },
          [&](const CategoricalDomain& d) {
            if (d.values.empty()) {
              throw SpaceError("parameter '" + p.name + "': categorical domain is empty");
            }
            std::set<std::string> seen(d.values.begin(), d.values.end());
            if (seen.size() != d.values.size()) {
              throw SpaceError("parameter '" + p.name + "': duplicate categorical values");
            }
          }},
      p.domain);
}

void validate_params(const std::vector<Param>& params, bool allow_degenerate) {
  if (params.empty()) {
    throw SpaceError("search space needs at least one parameter");
  }
  std::set<std::string> names;
  for (const auto& p : params) {
    if (p.name.empty()) {
      throw SpaceError("parameter name must not be empty");
    }
    if (!names.insert(p.name).second) {
      throw SpaceError("duplicate parameter name '" + p.name + "'");
    }
    validate_domain(p, allow_degenerate);
  }
}

// Sizes of `pieces` contiguous chunks over `count` items, larger chunks first.
std::vector<std::size_t> chunk_sizes(std::size_t count, std::size_t pieces) {
  std::vector<std::size_t> sizes(pieces, count / pieces);
  for (std::size_t i = 0; i < count % pieces; ++i) {
    ++sizes[i];
  }
  return sizes;
}

std::vector<ParamDomain> split_domain(const ParamDomain& domain, std::size_t k) {
  std::vector<ParamDomain> out;
  std::visit(
      Overloaded{
          [&](const ContinuousDomain& d) {
            const bool log = d.scale == Scale::kLog;
            const double a = log ? std::log(d.low) : d.low;
            const double b = log ? std::log(d.high) : d.high;
            auto edge = [&](std::size_t i) {
              if (i == 0) return d.low;
              if (i == k) return d.high;
              const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(k);
              return log ? std::exp(t) : t;
            };
            for (std::size_t i = 0; i < k; ++i) {
              const bool last = i + 1 == k;
              out.emplace_back(ContinuousDomain{edge(i), edge(i + 1), d.scale, last && d.upper_closed});
            }
          },
          [&](const IntegerDomain& d) {
            const auto count = static_cast<std::size_t>(d.high - d.low + 1);
            std::int64_t lo = d.low;
            for (std::size_t size : chunk_sizes(count, std::min(k, count))) {
              const auto hi = lo + static_cast<std::int64_t>(size) - 1;
              out.emplace_back(IntegerDomain{lo, hi});
              lo = hi + 1;
            }
          },
          [&](const CategoricalDomain& d) {
            std::size_t start = 0;
            for (std::size_t size : chunk_sizes(d.values.size(), std::min(k, d.values.size()))) {
              CategoricalDomain chunk;
              chunk.values.assign(d.values.begin() + static_cast<std::ptrdiff_t>(start),
                                  d.values.begin() + static_cast<std::ptrdiff_t>(start + size));
              out.emplace_back(std::move(chunk));
              start += size;
            }
          }},
      domain);
  return out;
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

bool operator==(const ContinuousDomain& a, const ContinuousDomain& b) {
  return a.low == b.low && a.high == b.high && a.scale == b.scale && a.upper_closed == b.upper_closed;
}
bool operator==(const IntegerDomain& a, const IntegerDomain& b) {
  return a.low == b.low && a.high == b.high;
}
bool operator==(const CategoricalDomain& a, const CategoricalDomain& b) { return a.values == b.values; }
bool operator==(const Param& a, const Param& b) { return a.name == b.name && a.domain == b.domain; }
bool operator==(const SearchSpace& a, const SearchSpace& b) { return a.params_ == b.params_; }

bool domain_contains(const ParamDomain& domain, const ParamValue& value) {
  return std::visit(
      Overloaded{
          [&](const ContinuousDomain& d) {
            const auto* v = std::get_if<double>(&value);
            if (v == nullptr || !std::isfinite(*v)) return false;
            return d.low <= *v && (*v < d.high || (d.upper_closed && *v == d.high));
          },
          [&](const IntegerDomain& d) {
            const auto* v = std::get_if<std::int64_t>(&value);
            return v != nullptr && d.low <= *v && *v <= d.high;
          },
          [&](const CategoricalDomain& d) {
            const auto* v = std::get_if<std::string>(&value);
            return v != nullptr && std::find(d.values.begin(), d.values.end(), *v) != d.values.end();
          }},
      domain);
}

std::size_t domain_cardinality(const ParamDomain& domain) {
  return std::visit(Overloaded{[](const ContinuousDomain&) -> std::size_t { return 0; },
                               [](const IntegerDomain& d) { return static_cast<std::size_t>(d.high - d.low + 1); },
                               [](const CategoricalDomain& d) { return d.values.size(); }},
                    domain);
}

SearchSpace::SearchSpace(std::vector<Param> params) : params_(std::move(params)) {
  validate_params(params_, /*allow_degenerate=*/false);
}

SearchSpace::SearchSpace(Unchecked, std::vector<Param> params) : params_(std::move(params)) {}

SearchSpace SearchSpace::restricted(std::vector<Param> params) {
  validate_params(params, /*allow_degenerate=*/true);
  return SearchSpace(Unchecked{}, std::move(params));
}

std::size_t SearchSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw SpaceError("unknown parameter '" + std::string(name) + "'");
}

const ParamValue& Configuration::at(std::string_view name) const {
  for (const auto& [key, value] : entries_) {
    if (key == name) return value;
  }
  throw SpaceError("configuration has no parameter '" + std::string(name) + "'");
}

double Configuration::number(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw SpaceError("parameter '" + std::string(name) + "' is not numeric");
}

std::int64_t Configuration::integer(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw SpaceError("parameter '" + std::string(name) + "' is not an integer");
}

const std::string& Configuration::token(std::string_view name) const {
  const auto& v = at(name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw SpaceError("parameter '" + std::string(name) + "' is not categorical");
}

void validate_configuration(const SearchSpace& space, const Configuration& config) {
  if (config.size() != space.size()) {
    throw SpaceError("configuration has " + std::to_string(config.size()) + " values, space has " +
                     std::to_string(space.size()) + " parameters");
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& [name, value] = config.entries()[i];
    if (name != space[i].name) {
      throw SpaceError("configuration parameter '" + name + "' does not match '" + space[i].name + "'");
    }
    if (!domain_contains(space[i].domain, value)) {
      throw SpaceError("value " + describe_value(value) + " of '" + name + "' outside " +
                       describe_domain(space[i].domain));
    }
  }
}

bool space_contains(const SearchSpace& space, const Configuration& config) {
  if (config.size() != space.size()) return false;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& [name, value] = config.entries()[i];
    if (name != space[i].name || !domain_contains(space[i].domain, value)) return false;
  }
  return true;
}

Configuration sample_uniform(const SearchSpace& space, std::mt19937_64& rng) {
  std::vector<std::pair<std::string, ParamValue>> entries;
  entries.reserve(space.size());
  for (const auto& p : space.params()) {
    ParamValue value = std::visit(
        Overloaded{
            [&](const ContinuousDomain& d) -> ParamValue {
              double v = 0.0;
              if (d.scale == Scale::kLog) {
                std::uniform_real_distribution<double> u(std::log(d.low), std::log(d.high));
                v = std::exp(u(rng));
              } else {
                std::uniform_real_distribution<double> u(d.low, d.high);
                v = u(rng);
              }
              v = std::clamp(v, d.low, d.high);
              if (v >= d.high && !d.upper_closed) v = std::nextafter(d.high, d.low);
              return v;
            },
            [&](const IntegerDomain& d) -> ParamValue {
              std::uniform_int_distribution<std::int64_t> u(d.low, d.high);
              return u(rng);
            },
            [&](const CategoricalDomain& d) -> ParamValue {
              std::uniform_int_distribution<std::size_t> u(0, d.values.size() - 1);
              return d.values[u(rng)];
            }},
        p.domain);
    entries.emplace_back(p.name, std::move(value));
  }
  return Configuration(std::move(entries));
}

std::size_t partition_count(const SearchSpace& space, int k) {
  if (k < 1) throw SpaceError("partition k must be >= 1");
  std::size_t count = 1;
  for (const auto& p : space.params()) {
    const std::size_t card = domain_cardinality(p.domain);
    count *= card == 0 ? static_cast<std::size_t>(k) : std::min(static_cast<std::size_t>(k), card);
  }
  return count;
}

std::vector<SubSpace> partition(const SearchSpace& space, int k) {
  if (k < 1) throw SpaceError("partition k must be >= 1");
  std::vector<std::vector<ParamDomain>> pieces;
  pieces.reserve(space.size());
  for (const auto& p : space.params()) {
    pieces.push_back(split_domain(p.domain, static_cast<std::size_t>(k)));
  }

  std::vector<SubSpace> out;
  out.reserve(partition_count(space, k));
  std::vector<std::size_t> cell(space.size(), 0);
  while (true) {
    std::vector<Param> params;
    params.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
      params.push_back(Param{space[i].name, pieces[i][cell[i]]});
    }
    out.emplace_back(space, SearchSpace::restricted(std::move(params)), cell);

    // Odometer increment, last parameter fastest.
    std::size_t i = space.size();
    while (i > 0) {
      --i;
      if (++cell[i] < pieces[i].size()) break;
      cell[i] = 0;
      if (i == 0) return out;
    }
  }
}

bool contains(const SubSpace& sub, const Configuration& config) {
  const auto& parent = sub.parent();
  if (config.size() != parent.size()) {
    throw SpaceError("configuration does not match the sub-space's parameters");
  }
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (config.entries()[i].first != parent[i].name) {
      throw SpaceError("configuration parameter '" + config.entries()[i].first + "' does not match '" +
                       parent[i].name + "'");
    }
  }
  return space_contains(sub.space(), config);
}

std::string describe_domain(const ParamDomain& domain) {
  return std::visit(
      Overloaded{[](const ContinuousDomain& d) {
                   return "[" + format_real(d.low) + ", " + format_real(d.high) + (d.upper_closed ? "]" : ")") +
                          (d.scale == Scale::kLog ? " log" : "");
                 },
                 [](const IntegerDomain& d) {
                   return "{" + std::to_string(d.low) + ".." + std::to_string(d.high) + "}";
                 },
                 [](const CategoricalDomain& d) {
                   std::string s = "[";
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     if (i > 0) s += ", ";
                     s += d.values[i];
                   }
                   return s + "]";
                 }},
      domain);
}

std::string describe_value(const ParamValue& value) {
  return std::visit(Overloaded{[](double v) { return format_real(v); },
                               [](std::int64_t v) { return std::to_string(v); },
                               [](const std::string& v) { return v; }},
                    value);
}

}  // namespace boasf
