#include <doctest.h>

#include <filesystem>

#include "skelmap/error.h"
#include "skelmap/io.h"
#include "skelmap/pipeline.h"

using namespace skelmap;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kParameter;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "skelmap_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv parsing") {
  const Matrix m = parse_csv_matrix("\xEF\xBB\xBFx,y\n1,2\n 3 , 4.5\n\n-1e-3,0\n");
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  CHECK(m(1, 1) == 4.5);
  CHECK(m(2, 0) == -1e-3);
  CHECK(parse_csv_matrix("1,2\n3,4\n").rows() == 2);

  CHECK(kind_of([] { parse_csv_matrix("1,2\n3\n"); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { parse_csv_matrix("1,2\nx,y\n"); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { parse_csv_matrix("x,y\n"); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { parse_csv_matrix(""); }) == ErrorKind::kFormat);
}

TEST_CASE("doubles round-trip exactly through csv") {
  const auto cloud = generate_shape({"torus", 50, 0.05, {}}, 3);
  const Matrix back = parse_csv_matrix(format_csv_matrix(cloud.points()));
  CHECK(back == cloud.points());
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_csv_matrix(Matrix::Identity(2, 2), {"a", "b"}) == "a,b\n1,0\n0,1\n");
}

TEST_CASE("files") {
  const auto path = scratch("cloud.csv").string();
  const auto cloud = generate_shape({"circle", 20, 0.0, {}}, 1);
  write_point_cloud(path, cloud);
  CHECK(read_point_cloud(path).points() == cloud.points());
  CHECK(read_signal(path).size() == 20);
  CHECK(kind_of([] { read_point_cloud("/nonexistent/dir/cloud.csv"); }) == ErrorKind::kIo);
  CHECK(kind_of([] { write_text_file("/nonexistent/dir/out.txt", "x"); }) == ErrorKind::kIo);
}

TEST_CASE("diagram json") {
  PersistenceDiagram d;
  d.dim = 0;
  d.pairs = {{0.0, 1.5}, {0.0, std::numeric_limits<double>::infinity()}};
  const auto j = to_json(d);
  CHECK(j["pairs"][1][1].is_null());
  CHECK(j["scale_cap"].is_null());
  const auto back = diagram_from_json(parse_json(dump_json(j)));
  CHECK(back.pairs == d.pairs);
  CHECK(back.dim == 0);

  CHECK(kind_of([] { diagram_from_json(parse_json(R"({"dim":1,"pairs":[[2,1]]})")); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { diagram_from_json(parse_json(R"({"dim":1,"pairs":[[1]]})")); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { diagram_from_json(parse_json(R"({"pairs":[]})")); }) == ErrorKind::kFormat);
  CHECK(kind_of([] { parse_json("{"); }) == ErrorKind::kFormat);
  // zero-persistence pairs are dropped
  CHECK(diagram_from_json(parse_json(R"({"dim":1,"pairs":[[1,1],[1,2]]})")).pairs.size() == 1);
}

TEST_CASE("skeleton json round trip") {
  const auto cloud = generate_shape({"torus", 300, 0.0, {}}, 2);
  const auto graph = build_knn_graph(cloud, kDefaultK);
  const auto s = compute_skeleton(cloud, graph, {});
  const auto j = to_json(s);
  const auto back = skeleton_from_json(parse_json(dump_json(j)));
  CHECK(to_json(back) == j);
  CHECK(back.nodes.size() == s.nodes.size());
  CHECK(back.edges.size() == s.edges.size());
  CHECK(j["cycle_rank"] == cycle_rank(s));

  auto broken = j;
  broken["edges"][0] = {0, 99999, 1};
  CHECK(kind_of([&] { skeleton_from_json(broken); }) == ErrorKind::kFormat);
  broken = j;
  broken.erase("nodes");
  CHECK(kind_of([&] { skeleton_from_json(broken); }) == ErrorKind::kFormat);
}

TEST_CASE("embedding files round trip") {
  const auto cloud = generate_shape({"swiss_roll", 200, 0.0, {}}, 4);
  const auto graph = build_knn_graph(cloud, kDefaultK);
  EmbedParams params;
  params.method = EmbeddingMethod::kLIsomapRandom;
  const auto e = compute_embedding(cloud, graph, params, nullptr, 5);
  const auto path = scratch("embedding.csv").string();
  write_embedding(path, e);
  CHECK(sidecar_path(path) == scratch("embedding.json").string());
  CHECK(std::filesystem::exists(sidecar_path(path)));
  const auto back = read_embedding(path);
  CHECK(back.coords == e.coords);
  CHECK(back.method == e.method);
  CHECK(back.landmarks == e.landmarks);
  CHECK(back.params == e.params);

  std::filesystem::remove(sidecar_path(path));
  const auto bare = read_embedding(path);
  CHECK(bare.method == EmbeddingMethod::kMds);
  CHECK(bare.coords == e.coords);
}

TEST_CASE("parameter objects round trip") {
  SkeletonParams s;
  s.k = 12;
  s.intervals = 20;
  s.eps = 0.25;
  CHECK(to_json(skeleton_params_from_json(to_json(s))) == to_json(s));
  CHECK(kind_of([] { skeleton_params_from_json(parse_json(R"({"colour":"red"})")); }) == ErrorKind::kParameter);
  CHECK(skeleton_params_from_json(parse_json(R"({"eps":"auto"})")).eps == std::nullopt);

  EmbedParams e;
  e.landmarks = 30;
  e.pca = false;
  CHECK(to_json(embed_params_from_json(to_json(e))) == to_json(e));
  CHECK_THROWS_AS(embed_params_from_json(parse_json(R"({"method":"linear_projection"})")), Error);

  CHECK(json_digest(to_json(s)) == json_digest(to_json(s)));
  CHECK(json_digest(to_json(s)) != json_digest(to_json(SkeletonParams{})));
  CHECK(json_digest(to_json(s)).size() == 16);
}

}  // TEST_SUITE
