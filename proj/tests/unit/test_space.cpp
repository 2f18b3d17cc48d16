#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "boasf/space.hpp"

using namespace boasf;

namespace {

// The two-parameter space used to illustrate partitioning: a continuous
// parameter on (0, 1) and a discrete one over {2, 3, 4, 5}.
SearchSpace worked_example() {
  return SearchSpace({{"x", ContinuousDomain{0.0, 1.0}}, {"n", CategoricalDomain{{"2", "3", "4", "5"}}}});
}

SearchSpace mixed_space() {
  return SearchSpace({{"crit", CategoricalDomain{{"gini", "entropy"}}},
                      {"frac", ContinuousDomain{0.5, 1.0}},
                      {"split", IntegerDomain{2, 21}},
                      {"leaf", IntegerDomain{1, 21}},
                      {"boot", CategoricalDomain{{"true", "false"}}}});
}

SearchSpace log_space() {
  return SearchSpace({{"penalty", CategoricalDomain{{"none", "l2"}}},
                      {"C", ContinuousDomain{1e-4, 1e4, Scale::kLog}},
                      {"iters", IntegerDomain{50, 500}}});
}

std::size_t containing(const std::vector<SubSpace>& subs, const Configuration& c) {
  std::size_t n = 0;
  for (const auto& s : subs) n += contains(s, c) ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(SearchSpace({}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", ContinuousDomain{1.0, 1.0}}}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", ContinuousDomain{0.0, 1.0, Scale::kLog}}}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", IntegerDomain{3, 3}}}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", CategoricalDomain{}}}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", CategoricalDomain{{"x", "x"}}}}), SpaceError);
  CHECK_THROWS_AS(SearchSpace({{"a", IntegerDomain{0, 1}}, {"a", IntegerDomain{0, 1}}}), SpaceError);
  CHECK_NOTHROW(SearchSpace::restricted({{"a", IntegerDomain{3, 3}}}));
}

TEST_CASE("sample_uniform stays in the domain and is deterministic") {
  const SearchSpace space({{"x", ContinuousDomain{0.0, 1.0}}});
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = sample_uniform(space, rng).number("x");
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }

  const SearchSpace single({{"c", CategoricalDomain{{"a"}}}});
  CHECK(sample_uniform(single, rng).token("c") == "a");

  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  const auto space2 = log_space();
  CHECK(sample_uniform(space2, a) == sample_uniform(space2, b));
}

TEST_CASE("log-scale sampling is uniform in the exponent") {
  const SearchSpace space({{"C", ContinuousDomain{1e-4, 1e4, Scale::kLog}}});
  std::mt19937_64 rng(3);
  int below_one = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) below_one += sample_uniform(space, rng).number("C") < 1.0 ? 1 : 0;
  // Half the log range lies below 1; a linear draw would put ~0.01% there.
  CHECK(static_cast<double>(below_one) / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("partition reproduces the two-parameter worked example") {
  const auto subs = partition(worked_example(), 2);
  REQUIRE(subs.size() == 4);
  const ContinuousDomain lower{0.0, 0.5, Scale::kLinear, false};
  const ContinuousDomain upper{0.5, 1.0, Scale::kLinear, true};
  const CategoricalDomain small{{"2", "3"}};
  const CategoricalDomain large{{"4", "5"}};
  CHECK(std::get<ContinuousDomain>(subs[0].space()[0].domain) == lower);
  CHECK(std::get<CategoricalDomain>(subs[0].space()[1].domain) == small);
  CHECK(std::get<ContinuousDomain>(subs[1].space()[0].domain) == lower);
  CHECK(std::get<CategoricalDomain>(subs[1].space()[1].domain) == large);
  CHECK(std::get<ContinuousDomain>(subs[2].space()[0].domain) == upper);
  CHECK(std::get<CategoricalDomain>(subs[2].space()[1].domain) == small);
  CHECK(std::get<ContinuousDomain>(subs[3].space()[0].domain) == upper);
  CHECK(std::get<CategoricalDomain>(subs[3].space()[1].domain) == large);
}

TEST_CASE("partition counts follow the closed form") {
  CHECK(partition(log_space(), 2).size() == 8);
  CHECK(partition(mixed_space(), 2).size() == 32);
  CHECK(partition(mixed_space(), 1).size() == 1);
  CHECK(partition(mixed_space(), 1)[0].space() == mixed_space());

  const SearchSpace cont({{"a", ContinuousDomain{0, 1}}, {"b", ContinuousDomain{0, 1}}, {"c", ContinuousDomain{0, 1}}});
  CHECK(partition(cont, 3).size() == 27);

  // Underfull categorical and integer domains cap at their cardinality.
  const SearchSpace small({{"c", CategoricalDomain{{"a", "b"}}}, {"i", IntegerDomain{0, 2}}});
  CHECK(partition_count(small, 5) == 2 * 3);
  CHECK(partition(small, 5).size() == 6);
  for (int k = 1; k <= 6; ++k) CHECK(partition(mixed_space(), k).size() == partition_count(mixed_space(), k));

  CHECK_THROWS_AS(partition(mixed_space(), 0), SpaceError);
}

TEST_CASE("integer chunks are contiguous with larger chunks first") {
  const SearchSpace space({{"i", IntegerDomain{1, 10}}});
  const auto subs = partition(space, 3);
  REQUIRE(subs.size() == 3);
  CHECK(std::get<IntegerDomain>(subs[0].space()[0].domain) == IntegerDomain{1, 4});
  CHECK(std::get<IntegerDomain>(subs[1].space()[0].domain) == IntegerDomain{5, 7});
  CHECK(std::get<IntegerDomain>(subs[2].space()[0].domain) == IntegerDomain{8, 10});
}

TEST_CASE("log-scale continuous domains split evenly in log space") {
  const SearchSpace space({{"C", ContinuousDomain{1e-4, 1e4, Scale::kLog}}});
  const auto subs = partition(space, 2);
  const auto& first = std::get<ContinuousDomain>(subs[0].space()[0].domain);
  CHECK(first.low == 1e-4);
  CHECK(first.high == doctest::Approx(1.0));
  CHECK_FALSE(first.upper_closed);
  CHECK(std::get<ContinuousDomain>(subs[1].space()[0].domain).high == 1e4);
}

TEST_CASE("contains on the worked example") {
  const auto subs = partition(worked_example(), 2);
  CHECK(contains(subs[0], Configuration({{"x", 0.3}, {"n", std::string("2")}})));
  CHECK_FALSE(contains(subs[0], Configuration({{"x", 0.7}, {"n", std::string("2")}})));
  // Boundary belongs to the upper interval; the parent's upper bound to the last one.
  CHECK_FALSE(contains(subs[0], Configuration({{"x", 0.5}, {"n", std::string("2")}})));
  CHECK(contains(subs[2], Configuration({{"x", 0.5}, {"n", std::string("2")}})));
  CHECK(contains(subs[3], Configuration({{"x", 1.0}, {"n", std::string("5")}})));

  const auto whole = partition(worked_example(), 1);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) CHECK(contains(whole[0], sample_uniform(worked_example(), rng)));

  CHECK_THROWS_AS(contains(subs[0], Configuration({{"y", 0.3}, {"n", std::string("2")}})), SpaceError);
  CHECK_THROWS_AS(contains(subs[0], Configuration({{"x", 0.3}})), SpaceError);
}

TEST_CASE("partition is a disjoint cover (property)") {
  for (const auto& space : {worked_example(), mixed_space(), log_space()}) {
    for (int k : {1, 2, 3, 4}) {
      const auto subs = partition(space, k);
      std::mt19937_64 rng(static_cast<std::uint64_t>(k) * 977);
      for (int i = 0; i < 10000; ++i) {
        const auto c = sample_uniform(space, rng);
        if (containing(subs, c) != 1) {
          FAIL("configuration covered " << containing(subs, c) << " times, k=" << k);
        }
      }
    }
  }
}

TEST_CASE("interval edges fall in exactly one sub-space") {
  const SearchSpace space({{"x", ContinuousDomain{0.0, 1.0}}, {"y", ContinuousDomain{-2.0, 2.0}}});
  const auto subs = partition(space, 4);
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double y : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      CHECK(containing(subs, Configuration({{"x", x}, {"y", y}})) == 1);
    }
  }
}

TEST_CASE("sub-spaces are valid spaces and sampling them stays inside") {
  const auto subs = partition(mixed_space(), 2);
  std::mt19937_64 rng(11);
  for (const auto& s : subs) {
    for (int i = 0; i < 200; ++i) CHECK(contains(s, sample_uniform(s.space(), rng)));
  }
}

TEST_CASE("validate_configuration rejects mismatches") {
  const auto space = worked_example();
  CHECK_NOTHROW(validate_configuration(space, Configuration({{"x", 0.1}, {"n", std::string("3")}})));
  CHECK_THROWS_AS(validate_configuration(space, Configuration({{"x", 1.5}, {"n", std::string("3")}})), SpaceError);
  CHECK_THROWS_AS(validate_configuration(space, Configuration({{"x", 0.1}, {"n", std::string("9")}})), SpaceError);
  CHECK_THROWS_AS(validate_configuration(space, Configuration({{"x", std::int64_t{0}}, {"n", std::string("3")}})),
                  SpaceError);
}
