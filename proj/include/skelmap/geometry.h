#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace skelmap {

using Index = std::size_t;
using IndexList = std::vector<Index>;

// Row-major so that each point (row) is contiguous.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N points in R^D, one per row. Construction rejects empty clouds and
// non-finite coordinates.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(Matrix points);

  Index size() const { return static_cast<Index>(points_.rows()); }
  Index dim() const { return static_cast<Index>(points_.cols()); }
  const Matrix& points() const { return points_; }
  auto point(Index i) const { return points_.row(static_cast<Eigen::Index>(i)); }

  PointCloud subset(std::span<const Index> indices) const;
  double distance(Index i, Index j) const;

 private:
  Matrix points_;
};

struct Edge {
  Index u = 0;  // u < v
  Index v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph over point indices. Edges are kept sorted by
// (u, v); an adjacency list is derived on construction.
class NeighborhoodGraph {
 public:
  struct Neighbor {
    Index vertex;
    double weight;
  };

  NeighborhoodGraph() = default;
  NeighborhoodGraph(Index vertex_count, std::vector<Edge> edges, int k);

  Index vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int k() const { return k_; }
  std::span<const Neighbor> neighbors(Index v) const;

  bool has_edge(Index a, Index b) const;
  bool connected() const { return component_sizes_.size() <= 1; }
  // Component id per vertex, numbered by lowest member index.
  const std::vector<Index>& component_labels() const { return labels_; }
  // Sizes in descending order.
  std::vector<Index> component_sizes() const;

  // Throws a connectivity error that names the component sizes.
  void require_connected(const std::string& operation) const;

 private:
  Index vertex_count_ = 0;
  std::vector<Edge> edges_;
  int k_ = 0;
  std::vector<Index> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<Index> labels_;
  std::vector<Index> component_sizes_;  // indexed by label
};

enum class DistanceKind { kEuclidean, kGeodesic };

// Dense m x n matrix of nonnegative distances. Entries between disconnected
// vertices of a geodesic matrix carry an explicit unreachable marker instead
// of a numeric sentinel.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(Matrix values, DistanceKind kind);
  DistanceMatrix(Matrix values, std::vector<std::uint8_t> reachable,
                 DistanceKind kind);

  Index rows() const { return static_cast<Index>(values_.rows()); }
  Index cols() const { return static_cast<Index>(values_.cols()); }
  bool square() const { return rows() == cols(); }
  DistanceKind kind() const { return kind_; }

  bool reachable(Index i, Index j) const {
    return reachable_.empty() || reachable_[i * cols() + j] != 0;
  }
  bool all_reachable() const { return unreachable_count_ == 0; }
  Index unreachable_count() const { return unreachable_count_; }

  std::optional<double> at(Index i, Index j) const;
  // Caller guarantees reachable(i, j).
  double operator()(Index i, Index j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  // Only meaningful where reachable.
  const Matrix& raw() const { return values_; }

  DistanceMatrix submatrix(std::span<const Index> rows,
                           std::span<const Index> cols) const;

  // Throws a connectivity error when any entry is unreachable.
  void require_reachable(const std::string& operation) const;

 private:
  Matrix values_;
  std::vector<std::uint8_t> reachable_;  // empty when everything is reachable
  Index unreachable_count_ = 0;
  DistanceKind kind_ = DistanceKind::kEuclidean;
};

DistanceMatrix euclidean_distances(const PointCloud& cloud);
DistanceMatrix euclidean_distances(const Matrix& points);

// Symmetrized kNN graph: (i, j) is an edge when j is among the k nearest
// neighbors of i or vice versa. Ties at the k-th distance go to the lower
// index. Requires 1 <= k < N.
NeighborhoodGraph build_knn_graph(const PointCloud& cloud, int k);

// Shortest-path lengths from every source (all vertices when `sources` is
// empty) to every vertex.
DistanceMatrix geodesic_distances(const NeighborhoodGraph& graph,
                                  std::span<const Index> sources = {});

std::vector<double> single_source_distances(const NeighborhoodGraph& graph,
                                            Index source);

struct ShapeSpec {
  std::string name;
  Index n = 0;
  double noise = 0.0;
  std::map<std::string, double> params;  // shape-specific overrides
};

// Names accepted by generate_shape.
std::vector<std::string> shape_names();

// Samples a synthetic shape; deterministic for a fixed seed.
PointCloud generate_shape(const ShapeSpec& spec, std::uint64_t seed);

// Consecutive windows signal[t .. t+window-1] for t = 0, step, 2*step, ...
PointCloud delay_embedding(std::span<const double> signal, Index window,
                           Index step);

// Greedy farthest-point sampling. The first index is drawn from `seed`;
// returned indices are in selection order.
IndexList maxmin_subsample(const PointCloud& cloud, Index m,
                           std::uint64_t seed);
IndexList maxmin_subsample_from(const PointCloud& cloud, Index m, Index start);

// Every index when N <= limit, otherwise a maxmin subsample of size `limit`.
// Used to keep persistence computations at a bounded size.
IndexList persistence_subsample(const PointCloud& cloud, Index limit, std::uint64_t seed);

inline constexpr Index kDefaultPersistenceLimit = 1024;

// Derives an independent stream seed for a named pipeline stage.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

}  // namespace skelmap
