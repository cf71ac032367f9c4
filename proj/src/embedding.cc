#include "skelmap/embedding.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_set>

#include "skelmap/diagram_metrics.h"
#include "skelmap/error.h"
#include "skelmap/parallel.h"
#include "skelmap/persistence.h"
#include "spectral.h"

namespace skelmap {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// -1/2 J S J for a matrix of squared distances S.
MatrixXd double_center(const MatrixXd& squared) {
  const VectorXd row_mean = squared.rowwise().mean();
  const VectorXd col_mean = squared.colwise().mean().transpose();
  const double grand = squared.mean();
  MatrixXd b(squared.rows(), squared.cols());
  for (Eigen::Index j = 0; j < squared.cols(); ++j) {
    for (Eigen::Index i = 0; i < squared.rows(); ++i) {
      b(i, j) = -0.5 * (squared(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  return 0.5 * (b + b.transpose());
}

struct SpectralFit {
  detail::TopEigen eig;
  int clamped = 0;
  double negative_ratio = 0.0;
};

SpectralFit fit(const MatrixXd& b, int d) {
  SpectralFit out{detail::top_eigenpairs(b, d)};
  for (Eigen::Index i = 0; i < out.eig.values.size(); ++i) {
    if (out.eig.values(i) <= 0.0) {
      out.eig.values(i) = 0.0;
      ++out.clamped;
    }
  }
  const double top = out.eig.values.size() > 0 ? out.eig.values(0) : 0.0;
  if (out.eig.min_value < 0.0) {
    out.negative_ratio = top > 0.0 ? -out.eig.min_value / top : 1.0;
  }
  return out;
}

void record_diagnostics(nlohmann::json& params, const SpectralFit& f) {
  params["clamped_dims"] = f.clamped;
  params["negative_eigenvalue_ratio"] = f.negative_ratio;
  params["eigensolver"] = f.eig.iterative ? "lanczos" : "dense";
}

void center_columns(Matrix& coords) {
  if (coords.rows() == 0) return;
  const Eigen::RowVectorXd mean = coords.colwise().mean();
  coords.rowwise() -= mean;
}

void validate_landmarks(const IndexList& landmarks, Index total, int d) {
  require(landmarks.size() >= static_cast<Index>(d) + 1, "landmark count >= d+1",
          "need at least d+1 landmarks, got " + std::to_string(landmarks.size()));
  std::unordered_set<Index> seen;
  for (Index l : landmarks) {
    require(l < total, "landmark index in range",
            "landmark index " + std::to_string(l) + " out of range");
    require(seen.insert(l).second, "landmarks distinct",
            "landmark index " + std::to_string(l) + " repeated");
  }
}

}  // namespace

std::string to_string(EmbeddingMethod method) {
  switch (method) {
    case EmbeddingMethod::kMds: return "mds";
    case EmbeddingMethod::kIsomap: return "isomap";
    case EmbeddingMethod::kLIsomapRandom: return "l-isomap-random";
    case EmbeddingMethod::kLIsomapHomology: return "l-isomap-homology";
    case EmbeddingMethod::kLinearProjection: return "linear-projection";
  }
  return "unknown";
}

EmbeddingMethod parse_embedding_method(const std::string& name) {
  for (auto m : {EmbeddingMethod::kMds, EmbeddingMethod::kIsomap, EmbeddingMethod::kLIsomapRandom,
                 EmbeddingMethod::kLIsomapHomology, EmbeddingMethod::kLinearProjection}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::kParameter, "known embedding method", "unknown embedding method '" + name + "'");
}

bool uses_geodesics(EmbeddingMethod method) {
  return method == EmbeddingMethod::kIsomap || method == EmbeddingMethod::kLIsomapRandom ||
         method == EmbeddingMethod::kLIsomapHomology;
}

Embedding classical_mds(const DistanceMatrix& dist, int d) {
  require(dist.square(), "square distance matrix", "classical MDS needs a square matrix");
  dist.require_reachable("classical MDS");
  const Index n = dist.rows();
  require(d >= 1 && static_cast<Index>(d) < n, "1 <= d < n",
          "target dimension " + std::to_string(d) + " invalid for " + std::to_string(n) + " points");
  const MatrixXd squared = dist.raw().array().square().matrix();
  const SpectralFit f = fit(double_center(squared), d);

  Embedding out;
  out.method = EmbeddingMethod::kMds;
  out.coords.resize(static_cast<Eigen::Index>(n), d);
  for (int i = 0; i < d; ++i) {
    out.coords.col(i) = f.eig.vectors.col(i) * std::sqrt(f.eig.values(i));
  }
  center_columns(out.coords);
  out.params["d"] = d;
  record_diagnostics(out.params, f);
  return out;
}

Embedding isomap(const NeighborhoodGraph& graph, int d, DistanceMatrix* geodesic_out) {
  graph.require_connected("isomap");
  DistanceMatrix geo = geodesic_distances(graph);
  Embedding out = classical_mds(geo, d);
  out.method = EmbeddingMethod::kIsomap;
  out.params["k"] = graph.k();
  if (geodesic_out) *geodesic_out = std::move(geo);
  return out;
}

Embedding isomap(const PointCloud& cloud, int k, int d, DistanceMatrix* geodesic_out) {
  return isomap(build_knn_graph(cloud, k), d, geodesic_out);
}

Index auto_landmark_count(Index n) {
  Index r = static_cast<Index>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return std::max<Index>(r, 1);
}

IndexList random_landmarks(Index total, Index n, std::uint64_t seed) {
  require(n >= 1 && n <= total, "1 <= n <= N",
          "cannot draw " + std::to_string(n) + " landmarks from " + std::to_string(total) + " points");
  IndexList pool(total);
  std::iota(pool.begin(), pool.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(n);
  return pool;
}

Embedding l_isomap(const NeighborhoodGraph& graph, const IndexList& landmarks, int d,
                   const LIsomapOptions& options) {
  const Index total = graph.vertex_count();
  validate_landmarks(landmarks, total, d);
  graph.require_connected("landmark isomap");
  const DistanceMatrix to_landmarks = geodesic_distances(graph, landmarks);

  const auto n = static_cast<Eigen::Index>(landmarks.size());
  MatrixXd squared(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double x = to_landmarks(a, landmarks[b]);
      const double y = to_landmarks(b, landmarks[a]);
      squared(a, b) = 0.5 * (x * x + y * y);
    }
  }
  const SpectralFit f = fit(double_center(squared), d);

  // Pseudoinverse transpose of the landmark coordinates: v_i / sqrt(lambda_i).
  MatrixXd pinv(d, n);
  for (int i = 0; i < d; ++i) {
    const double lambda = f.eig.values(i);
    if (lambda > 0.0) {
      pinv.row(i) = f.eig.vectors.col(i).transpose() / std::sqrt(lambda);
    } else {
      pinv.row(i).setZero();
    }
  }
  const VectorXd mean_sq = squared.colwise().mean().transpose();

  Embedding out;
  out.method = options.method;
  out.landmarks = landmarks;
  out.coords.resize(static_cast<Eigen::Index>(total), d);
  parallel_for(total, [&](std::size_t x) {
    VectorXd delta(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const double g = to_landmarks(a, x);
      delta(a) = g * g - mean_sq(a);
    }
    out.coords.row(static_cast<Eigen::Index>(x)) = (-0.5 * pinv * delta).transpose();
  });
  center_columns(out.coords);

  if (options.pca_normalize) {
    const MatrixXd cov = MatrixXd(out.coords.transpose() * out.coords);
    Eigen::SelfAdjointEigenSolver<MatrixXd> pca(cov);
    MatrixXd axes = pca.eigenvectors().rowwise().reverse();
    out.coords = out.coords * axes;
    MatrixXd cols = out.coords;
    detail::fix_signs(cols);
    out.coords = cols;
  }

  out.params["d"] = d;
  out.params["k"] = graph.k();
  out.params["landmark_count"] = landmarks.size();
  out.params["pca_normalize"] = options.pca_normalize;
  record_diagnostics(out.params, f);
  return out;
}

Embedding l_isomap(const PointCloud& cloud, const IndexList& landmarks, int k, int d,
                   const LIsomapOptions& options) {
  return l_isomap(build_knn_graph(cloud, k), landmarks, d, options);
}

Direction make_direction(const VectorXd& v) {
  const auto dim = v.size();
  require(dim >= 3, "D >= 3", "projection directions need at least 3 dimensions");
  require(v.allFinite() && v.norm() > 0.0, "nonzero direction", "direction must be finite and nonzero");
  Direction out;
  out.vector = v.normalized();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::abs(out.vector(a)) < std::abs(out.vector(b));
  });

  std::size_t found = 0;
  for (auto axis : order) {
    if (found == 2) break;
    VectorXd w = VectorXd::Unit(dim, axis);
    for (int pass = 0; pass < 2; ++pass) {
      w -= w.dot(out.vector) * out.vector;
      for (std::size_t j = 0; j < found; ++j) w -= w.dot(out.basis[j]) * out.basis[j];
    }
    if (w.norm() > 0.1) out.basis[found++] = w.normalized();
  }
  return out;
}

std::vector<Direction> sphere_directions(Index m, Index dim, std::uint64_t seed) {
  require(m >= 1, "m >= 1", "need at least one direction");
  require(dim >= 3, "D >= 3", "projection directions need at least 3 dimensions");
  std::vector<Direction> out;
  out.reserve(m);
  if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (Index i = 0; i < m; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      out.push_back(make_direction(VectorXd{{r * std::cos(phi), r * std::sin(phi), z}}));
    }
    return out;
  }
  std::mt19937_64 rng(derive_seed(seed, "directions"));
  std::normal_distribution<double> gauss;
  while (out.size() < m) {
    VectorXd v(static_cast<Eigen::Index>(dim));
    for (auto& x : v) x = gauss(rng);
    if (v.norm() > 1e-9) out.push_back(make_direction(v));
  }
  return out;
}

namespace {

Matrix project_points(const Matrix& points, const Direction& direction) {
  MatrixXd basis(direction.vector.size(), 2);
  basis.col(0) = direction.basis[0];
  basis.col(1) = direction.basis[1];
  return points * basis;
}

}  // namespace

Embedding linear_project(const PointCloud& cloud, const Direction& direction) {
  require(static_cast<Index>(direction.vector.size()) == cloud.dim(), "direction dimension = D",
          "direction dimension does not match the cloud");
  require(cloud.dim() >= 3, "D >= 3", "linear projection needs at least 3 dimensions");
  Embedding out;
  out.method = EmbeddingMethod::kLinearProjection;
  out.coords = project_points(cloud.points(), direction);
  out.params["direction"] = std::vector<double>(direction.vector.begin(), direction.vector.end());
  return out;
}

std::string to_string(RankMetric metric) {
  switch (metric) {
    case RankMetric::kWd1: return "wd1";
    case RankMetric::kWd1ThenWd0: return "wd1_then_wd0";
    case RankMetric::kBottleneck: return "bottleneck";
  }
  return "unknown";
}

RankMetric parse_rank_metric(const std::string& name) {
  for (auto m : {RankMetric::kWd1, RankMetric::kWd1ThenWd0, RankMetric::kBottleneck}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::kParameter, "known rank metric", "unknown rank metric '" + name + "'");
}

ProjectionSearchResult projection_search(const PointCloud& cloud,
                                         const std::vector<Direction>& directions,
                                         RankMetric metric,
                                         const ProjectionSearchOptions& options) {
  require(!directions.empty(), "m >= 1", "need at least one direction");
  ProjectionSearchResult result;
  result.subsample = persistence_subsample(cloud, options.subsample_size,
                                           derive_seed(options.seed, "projection-subsample"));
  const PointCloud source = cloud.subset(result.subsample);
  const auto source_pd = vr_persistence(euclidean_distances(source), 1);
  result.source_pb1 = persistent_betti(source_pd[1]).count;

  std::vector<DirectionScore> scores(directions.size());
  parallel_for(directions.size(), [&](std::size_t i) {
    DirectionScore& s = scores[i];
    s.index = i;
    s.direction = directions[i];
    const Matrix projected = project_points(source.points(), directions[i]);
    const auto pd = vr_persistence(euclidean_distances(projected), 1);
    s.pb1 = persistent_betti(pd[1]).count;
    s.wd1 = wasserstein(source_pd[1], pd[1], 2.0, CapPolicy::kIgnore).value;
    if (metric == RankMetric::kWd1ThenWd0) {
      s.wd0 = wasserstein(source_pd[0], pd[0], 2.0, CapPolicy::kIgnore).value;
    }
    if (metric == RankMetric::kBottleneck) {
      s.bottleneck1 = bottleneck(source_pd[1], pd[1], CapPolicy::kIgnore).value;
    }
    s.score = metric == RankMetric::kBottleneck ? *s.bottleneck1 : s.wd1;
  });
  std::sort(scores.begin(), scores.end(), [](const DirectionScore& a, const DirectionScore& b) {
    return std::make_tuple(a.score, a.wd0.value_or(0.0), a.index) <
           std::make_tuple(b.score, b.wd0.value_or(0.0), b.index);
  });
  result.ranked = std::move(scores);
  return result;
}

ProjectionSearchResult projection_search(const PointCloud& cloud, Index m, RankMetric metric,
                                         const ProjectionSearchOptions& options) {
  return projection_search(cloud, sphere_directions(m, cloud.dim(), options.seed), metric, options);
}

}  // namespace skelmap
