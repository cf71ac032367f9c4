#include <doctest.h>

#include <cmath>

#include "oracles.h"
#include "skelmap/error.h"
#include "skelmap/quality.h"

using namespace skelmap;

namespace {

DistanceMatrix from_upper(double a, double b, double c) {
  Matrix d(3, 3);
  d << 0, a, b, a, 0, c, b, c, 0;
  return DistanceMatrix(d, DistanceKind::kEuclidean);
}

Embedding as_embedding(const Matrix& coords, EmbeddingMethod method = EmbeddingMethod::kMds) {
  Embedding e;
  e.coords = coords;
  e.method = method;
  return e;
}

Matrix rotate_2d(const Matrix& coords, double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return coords * r.transpose();
}

}  // namespace

TEST_SUITE("quality") {

TEST_CASE("residual variance by hand") {
  const double r = oracle::pearson({1, 2, 3}, {1, 2, 3.5});
  CHECK(residual_variance(from_upper(1, 2, 3), from_upper(1, 2, 3.5)) == doctest::Approx(1.0 - r * r).epsilon(1e-12));
  CHECK(std::abs(residual_variance(from_upper(1, 2, 3), from_upper(1, 2, 3))) < 1e-12);
  CHECK(std::abs(residual_variance(from_upper(1, 2, 3), from_upper(3, 6, 9))) < 1e-12);
}

TEST_CASE("residual variance matches the oracle on random pairs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix x = oracle::random_points(25, 3, seed);
    const Matrix y = oracle::random_points(25, 2, seed + 50);
    const Matrix dx = oracle::pairwise(x);
    const Matrix dy = oracle::pairwise(y);
    const double r = oracle::pearson(oracle::upper(dx), oracle::upper(dy));
    CHECK(residual_variance(DistanceMatrix(dx, DistanceKind::kEuclidean), DistanceMatrix(dy, DistanceKind::kEuclidean)) ==
          doctest::Approx(1.0 - r * r).epsilon(1e-10));
    // streaming path with Euclidean input distances
    CHECK(residual_variance(PointCloud(x), nullptr, y) == doctest::Approx(1.0 - r * r).epsilon(1e-10));
  }
}

TEST_CASE("residual variance ignores rigid motions and scale of the embedding") {
  const Matrix x = oracle::random_points(40, 3, 8);
  const Matrix y = oracle::random_points(40, 2, 9);
  const PointCloud cloud(x);
  const double base = residual_variance(cloud, nullptr, y);
  Matrix moved = rotate_2d(y, 0.7) * 4.0;
  moved.rowwise() += Eigen::RowVector2d(3.0, -1.0);
  CHECK(residual_variance(cloud, nullptr, moved) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("an isometric copy has no topological loss") {
  Matrix pts = Matrix::Zero(150, 3);
  pts.leftCols(2) = oracle::random_points(150, 2, 4, 3.0);
  const PointCloud cloud(pts);
  const auto report = quality_report(cloud, as_embedding(rotate_2d(pts.leftCols(2), 1.1)), nullptr);
  CHECK(report.rv < 1e-12);
  CHECK(report.wd1 < 1e-9);
  REQUIRE(report.wd0.has_value());
  CHECK(*report.wd0 < 1e-9);
  CHECK(report.pb1_before == report.pb1_after);
  CHECK(report.subsample_size == 150);
  CHECK(report.conventions["rv"] == "euclidean_vs_euclidean");
}

TEST_CASE("isomap of a circle keeps its loop") {
  const auto cloud = generate_shape({"circle", 300, 0.0, {}}, 5);
  const auto graph = build_knn_graph(cloud, 10);
  const auto e = isomap(graph, 2);
  const auto report = quality_report(cloud, e, &graph);
  CHECK(report.pb1_before == 1);
  CHECK(report.pb1_after == 1);
  CHECK(report.conventions["rv"] == "geodesic_vs_euclidean");
}

TEST_CASE("projecting the figure eight along a loop plane normal loses a loop") {
  const auto cloud = generate_shape({"figure_eight_bended", 600, 0.0, {}}, 2);
  const auto flat = linear_project(cloud, make_direction(Eigen::Vector3d(0, 1, 0)));
  QualityOptions options;
  options.subsample_size = 256;
  const auto report = quality_report(cloud, flat, nullptr, options);
  CHECK(report.pb1_before == 2);
  CHECK(report.pb1_after < 2);
  CHECK(report.wd1 > 0.0);
}

TEST_CASE("quality is deterministic and shares its context") {
  const auto cloud = generate_shape({"torus", 400, 0.01, {}}, 3);
  const auto graph = build_knn_graph(cloud, 10);
  const auto e = isomap(graph, 2);
  QualityOptions options;
  options.subsample_size = 128;
  options.seed = 11;
  const auto a = quality_report(cloud, e, &graph, options);
  const auto b = quality_report(cloud, e, &graph, options);
  CHECK(to_json(a) == to_json(b));
  const auto context = make_quality_context(cloud, options);
  CHECK(context.subsample.size() == 128);
  CHECK(to_json(quality_report(context, e, &graph, options)) == to_json(a));
  CHECK(std::find(a.flags.begin(), a.flags.end(), "persistence_subsampled") != a.flags.end());
}

TEST_CASE("explicit thresholds and the wd0 switch") {
  const auto cloud = generate_shape({"circle", 120, 0.0, {}}, 1);
  QualityOptions options;
  options.threshold_before = 1e9;
  options.threshold_after = 0.0;
  options.include_wd0 = false;
  const auto report = quality_report(cloud, as_embedding(cloud.points().leftCols(2)), nullptr, options);
  CHECK(report.pb1_before == 0);
  CHECK(report.pb1_after >= 1);
  CHECK_FALSE(report.wd0.has_value());
  CHECK(report.threshold_before == 1e9);
}

TEST_CASE("size mismatch is rejected") {
  const auto cloud = generate_shape({"circle", 50, 0.0, {}}, 1);
  CHECK_THROWS_AS(quality_report(cloud, as_embedding(Matrix::Zero(49, 2)), nullptr), Error);
  CHECK_THROWS_AS(residual_variance(cloud, nullptr, Matrix::Zero(49, 2)), Error);
}

TEST_CASE("csv row has one field per header column") {
  const auto cloud = generate_shape({"circle", 60, 0.0, {}}, 1);
  const auto report = quality_report(cloud, as_embedding(cloud.points().leftCols(2)), nullptr);
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(count(csv_header()) == count(csv_row("x", report)));
}

}  // TEST_SUITE
