#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skelmap/geometry.h"

namespace skelmap {

enum class EmbeddingMethod {
  kMds,
  kIsomap,
  kLIsomapRandom,
  kLIsomapHomology,
  kLinearProjection,
};

std::string to_string(EmbeddingMethod method);
EmbeddingMethod parse_embedding_method(const std::string& name);
bool uses_geodesics(EmbeddingMethod method);

// N points in R^d plus provenance. `params` holds the inputs (k, seed, ...)
// and solver diagnostics such as the negative-eigenvalue ratio.
struct Embedding {
  Matrix coords;
  EmbeddingMethod method = EmbeddingMethod::kMds;
  std::optional<IndexList> landmarks;
  nlohmann::json params = nlohmann::json::object();

  Index size() const { return static_cast<Index>(coords.rows()); }
  Index dim() const { return static_cast<Index>(coords.cols()); }
};

// Classical MDS: double-center the squared distances and keep the top-d
// eigenpairs. Negative eigenvalues among the kept ones are clamped to zero
// and counted in params["clamped_dims"].
Embedding classical_mds(const DistanceMatrix& dist, int d);

// Isomap on the symmetrized kNN graph of the cloud. The geodesic matrix used
// is written to `geodesic_out` when given.
Embedding isomap(const PointCloud& cloud, int k, int d, DistanceMatrix* geodesic_out = nullptr);
Embedding isomap(const NeighborhoodGraph& graph, int d, DistanceMatrix* geodesic_out = nullptr);

// ceil(sqrt(N)), the usual landmark budget.
Index auto_landmark_count(Index n);

// Uniform sample of n distinct indices from [0, N), in draw order.
IndexList random_landmarks(Index total, Index n, std::uint64_t seed);

struct LIsomapOptions {
  bool pca_normalize = true;
  EmbeddingMethod method = EmbeddingMethod::kLIsomapRandom;
};

// Landmark Isomap: MDS on the landmark block of the geodesic matrix, then
// every point is triangulated from its geodesic distances to the landmarks.
Embedding l_isomap(const PointCloud& cloud, const IndexList& landmarks, int k, int d,
                   const LIsomapOptions& options = {});
Embedding l_isomap(const NeighborhoodGraph& graph, const IndexList& landmarks, int d,
                   const LIsomapOptions& options = {});

// A unit projection direction and an orthonormal basis of its complement
// used as the 2-D image plane.
struct Direction {
  Eigen::VectorXd vector;
  std::array<Eigen::VectorXd, 2> basis;
};

Direction make_direction(const Eigen::VectorXd& v);

// m directions: a Fibonacci lattice on S^2 when dim == 3, otherwise seeded
// uniform samples on S^(dim-1).
std::vector<Direction> sphere_directions(Index m, Index dim = 3, std::uint64_t seed = 0);

Embedding linear_project(const PointCloud& cloud, const Direction& direction);

enum class RankMetric { kWd1, kWd1ThenWd0, kBottleneck };

std::string to_string(RankMetric metric);
RankMetric parse_rank_metric(const std::string& name);

struct ProjectionSearchOptions {
  Index subsample_size = 256;
  std::uint64_t seed = 0;
};

struct DirectionScore {
  Index index = 0;  // position in the sampled direction list
  Direction direction;
  double score = 0.0;  // the primary ranking value
  double wd1 = 0.0;
  std::optional<double> wd0;
  std::optional<double> bottleneck1;
  Index pb1 = 0;
};

struct ProjectionSearchResult {
  std::vector<DirectionScore> ranked;  // ascending by score, then wd0, then index
  IndexList subsample;                 // indices shared by every comparison
  Index source_pb1 = 0;
};

// Scores every direction by comparing the diagrams of the projected cloud
// with those of the source cloud, both on the same maxmin subsample.
ProjectionSearchResult projection_search(const PointCloud& cloud,
                                         const std::vector<Direction>& directions,
                                         RankMetric metric,
                                         const ProjectionSearchOptions& options = {});
ProjectionSearchResult projection_search(const PointCloud& cloud, Index m, RankMetric metric,
                                         const ProjectionSearchOptions& options = {});

}  // namespace skelmap
