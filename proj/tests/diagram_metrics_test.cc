#include <doctest.h>

#include <cmath>
#include <random>

#include "skelmap/diagram_metrics.h"
#include "skelmap/error.h"

using namespace skelmap;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PersistenceDiagram diagram(std::initializer_list<std::pair<double, double>> list, int dim = 1) {
  PersistenceDiagram d;
  d.dim = dim;
  for (auto [b, e] : list) d.pairs.push_back({b, e});
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

PersistenceDiagram random_diagram(std::mt19937_64& rng, Index max_points, bool zero_births = false) {
  std::uniform_int_distribution<Index> count(0, max_points);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  PersistenceDiagram d;
  d.dim = zero_births ? 0 : 1;
  const Index n = count(rng);
  for (Index i = 0; i < n; ++i) {
    const double b = zero_births ? 0.0 : u(rng);
    d.pairs.push_back({b, b + 0.01 + u(rng)});
  }
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

}  // namespace

TEST_SUITE("diagram_metrics") {

TEST_CASE("hand-derived cases") {
  const auto a = diagram({{0, 2}, {1, 3.5}});
  CHECK(wasserstein(a, a, 2).value == 0.0);
  CHECK(bottleneck(a, a).value == 0.0);

  const auto single = diagram({{0, 2}});
  const auto empty = diagram({});
  CHECK(std::abs(wasserstein(single, empty, 2).value - 1.0) < 1e-12);
  CHECK(std::abs(bottleneck(single, empty).value - 1.0) < 1e-12);

  const auto big = diagram({{0, 4}});
  CHECK(std::abs(wasserstein(big, single, 2).value - 2.0) < 1e-12);
  CHECK(std::abs(bottleneck(big, single).value - 2.0) < 1e-12);
  CHECK(std::abs(brute_force_match(big, single, kBottleneckP).value - 2.0) < 1e-12);
  CHECK(brute_force_match(empty, empty, 2).value == 0.0);
}

TEST_CASE("identity matching on identical diagrams") {
  const auto a = diagram({{0, 2}, {1, 3.5}, {0.5, 0.9}});
  const auto r = wasserstein(a, a, 2);
  for (const auto& asg : r.matching.assignments) {
    CHECK(asg.a == asg.b);
    CHECK(asg.cost == 0.0);
  }
}

TEST_CASE("agrees with exhaustive matching") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = random_diagram(rng, 4);
    const auto b = random_diagram(rng, 4);
    for (double p : {1.0, 2.0, 3.0}) {
      const double oracle = brute_force_match(a, b, p).value;
      CHECK(wasserstein(a, b, p).value == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(wasserstein_hungarian(a, b, p).value == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(bottleneck(a, b).value == doctest::Approx(brute_force_match(a, b, kBottleneckP).value).epsilon(1e-12));
  }
}

TEST_CASE("dimension-0 fast path agrees with the assignment solver") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_diagram(rng, 30, true);
    const auto b = random_diagram(rng, 30, true);
    CHECK(wasserstein(a, b, 2).value == doctest::Approx(wasserstein_hungarian(a, b, 2).value).epsilon(1e-10));
    CHECK(wasserstein(a, b, 1).value == doctest::Approx(wasserstein_hungarian(a, b, 1).value).epsilon(1e-10));
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_diagram(rng, 6);
    const auto b = random_diagram(rng, 6);
    const auto c = random_diagram(rng, 6);
    const auto ab = wasserstein(a, b, 2);
    CHECK(ab.value == doctest::Approx(wasserstein(b, a, 2).value).epsilon(1e-12));
    CHECK(ab.value <= wasserstein(a, c, 2).value + wasserstein(c, b, 2).value + 1e-9);
    CHECK(matching_value(ab.matching, 2) == doctest::Approx(ab.value).epsilon(1e-12));
    const auto bt = bottleneck(a, b);
    CHECK(matching_value(bt.matching, kBottleneckP) == doctest::Approx(bt.value).epsilon(1e-12));
    if (!a.pairs.empty() || !b.pairs.empty()) CHECK(bt.value <= ab.value + 1e-12);
  }
}

TEST_CASE("essential classes") {
  const auto a = diagram({{0, 1}, {0, kInf}}, 0);
  const auto b = diagram({{0, 2}, {0, kInf}}, 0);
  CHECK(wasserstein(a, b, 2).value == doctest::Approx(1.0));
  const auto c = diagram({{0, kInf}, {0, kInf}}, 0);
  CHECK(wasserstein(a, c, 2).value == kInf);
  CHECK(bottleneck(a, c).value == kInf);
}

TEST_CASE("caps must agree unless waived") {
  auto a = diagram({{0, 1}});
  auto b = diagram({{0, 2}});
  a.scale_cap = 3.0;
  b.scale_cap = 4.0;
  CHECK_THROWS_AS(wasserstein(a, b, 2), Error);
  CHECK_NOTHROW(wasserstein(a, b, 2, CapPolicy::kIgnore));
  const auto other_dim = diagram({{0, 1}}, 0);
  CHECK_THROWS_AS(wasserstein(diagram({{0, 1}}), other_dim, 2), Error);
  CHECK_THROWS_AS(wasserstein(a, a, 0.5), Error);
}

TEST_CASE("exhaustive matcher has a size guard") {
  std::mt19937_64 rng(1);
  PersistenceDiagram big;
  big.dim = 1;
  for (int i = 0; i < 9; ++i) big.pairs.push_back({0.0, 1.0 + i});
  CHECK_THROWS_AS(brute_force_match(big, big, 2), Error);
}

}  // TEST_SUITE
