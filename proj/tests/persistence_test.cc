#include <doctest.h>

#include <cmath>

#include "oracles.h"
#include "skelmap/error.h"
#include "skelmap/persistence.h"

using namespace skelmap;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DistanceMatrix dists(const Matrix& pts) { return euclidean_distances(pts); }

std::vector<PersistencePair> pairs(std::initializer_list<std::pair<double, double>> list) {
  std::vector<PersistencePair> out;
  for (auto [b, d] : list) out.push_back({b, d});
  std::sort(out.begin(), out.end());
  return out;
}

PersistenceDiagram diagram(std::vector<double> persistences) {
  PersistenceDiagram d;
  d.dim = 1;
  for (double p : persistences) d.pairs.push_back({1.0, 1.0 + p});
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("single point") {
  Matrix p(1, 2);
  p << 0.3, 0.7;
  const auto ds = vr_persistence(dists(p), 1);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].pairs == pairs({{0.0, kInf}}));
  CHECK(ds[1].pairs.empty());
  CHECK(brute_force_persistence(dists(p), 1) == ds);
}

TEST_CASE("unit square") {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 1, 1, 0, 1;
  const auto ds = vr_persistence(dists(p), 1);
  CHECK(ds[0].pairs == pairs({{0, 1}, {0, 1}, {0, 1}, {0, kInf}}));
  REQUIRE(ds[1].pairs.size() == 1);
  CHECK(ds[1].pairs[0].birth == 1.0);
  CHECK(ds[1].pairs[0].death == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(brute_force_persistence(dists(p), 1) == ds);
  CHECK(persistent_betti(ds[1], 0.2).count == 1);
}

TEST_CASE("equilateral triangle has no loop") {
  const double s = 2.0;
  Matrix d(3, 3);
  d << 0, s, s, s, 0, s, s, s, 0;
  const auto ds = vr_persistence(DistanceMatrix(d, DistanceKind::kEuclidean), 1);
  CHECK(ds[0].pairs == pairs({{0, s}, {0, s}, {0, kInf}}));
  CHECK(ds[1].pairs.empty());
}

TEST_CASE("matches the brute-force oracle on random clouds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix pts = oracle::random_points(8 + seed % 6, 2 + seed % 2, 100 + seed);
    const auto d = dists(pts);
    CHECK(vr_persistence(d, 1) == brute_force_persistence(d, 1));
  }
}

TEST_CASE("oracle refuses large inputs") {
  CHECK_THROWS_AS(brute_force_persistence(dists(oracle::random_points(30, 2, 1)), 1), Error);
}

TEST_CASE("dimension-0 deaths are the minimum spanning tree weights") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix pts = oracle::random_points(60, 3, seed);
    const auto d0 = vr_persistence(dists(pts), 0)[0];
    std::vector<double> deaths;
    for (const auto& p : d0.pairs)
      if (!p.infinite()) deaths.push_back(p.death);
    std::sort(deaths.begin(), deaths.end());
    CHECK(deaths == oracle::mst_weights(oracle::pairwise(pts)));
    CHECK(d0.infinite_count() == 1);
  }
}

TEST_CASE("infinite dimension-0 classes count components at the cap") {
  Matrix pts(6, 1);
  pts << 0, 0.5, 1.0, 10, 10.5, 30;
  const auto d0 = vr_persistence(dists(pts), 0, 2.0)[0];
  CHECK(d0.infinite_count() == 3);
  CHECK(d0.scale_cap == 2.0);
}

TEST_CASE("scaling distances scales the diagram") {
  const Matrix pts = oracle::random_points(12, 2, 77);
  const auto a = vr_persistence(dists(pts), 1);
  const auto b = vr_persistence(dists(pts * 2.5), 1);
  for (int dim = 0; dim < 2; ++dim) {
    REQUIRE(a[dim].pairs.size() == b[dim].pairs.size());
    for (Index i = 0; i < a[dim].pairs.size(); ++i) {
      CHECK(b[dim].pairs[i].birth == doctest::Approx(2.5 * a[dim].pairs[i].birth));
      if (!a[dim].pairs[i].infinite()) CHECK(b[dim].pairs[i].death == doctest::Approx(2.5 * a[dim].pairs[i].death));
    }
  }
}

TEST_CASE("enclosing radius is the default cap") {
  const Matrix pts = oracle::random_points(10, 2, 5);
  const auto d = dists(pts);
  CHECK(vr_persistence(d, 1)[1].scale_cap == enclosing_radius(d));
  CHECK_THROWS_AS(vr_persistence(d, 2), Error);
}

TEST_CASE("widest gap rule") {
  CHECK(persistent_betti(PersistenceDiagram{}).count == 0);

  // Eight clearly separated features over a floor of noise.
  const auto eight = diagram({3.0, 3.2, 2.9, 3.5, 2.8, 3.1, 3.3, 3.0, 0.2, 0.15, 0.1, 0.3, 0.05});
  const auto b = persistent_betti(eight);
  CHECK(b.count == 8);
  CHECK_FALSE(b.ambiguous);
  CHECK(b.threshold > 0.3);
  CHECK(b.threshold < 2.8);

  // Two gaps of similar width: still decided, but flagged.
  const auto fuzzy = persistent_betti(diagram({4.0, 2.1, 0.3}));
  CHECK(fuzzy.ambiguous);
}

TEST_CASE("explicit thresholds are monotone") {
  const auto d = diagram({0.1, 0.4, 0.4, 0.9, 1.5, 2.0});
  Index last = persistent_betti(d, 0.0).count;
  for (double t = 0.05; t < 2.5; t += 0.05) {
    const Index now = persistent_betti(d, t).count;
    CHECK(now <= last);
    last = now;
  }
  CHECK(last == 0);
}

}  // TEST_SUITE
