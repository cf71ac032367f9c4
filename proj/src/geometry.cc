#include "skelmap/geometry.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

#include "skelmap/error.h"
#include "skelmap/parallel.h"

namespace skelmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_sizes(const std::vector<Index>& sizes) {
  std::ostringstream out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out << ", ";
    out << sizes[i];
  }
  return out.str();
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kConnectivity: return "connectivity";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUndefined: return "undefined";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PointCloud

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  require(points_.rows() >= 1, "N >= 1", "point cloud must contain at least one point");
  require(points_.cols() >= 1, "D >= 1", "point cloud must have at least one coordinate");
  require(points_.allFinite(), "finite coordinates",
          "point cloud contains a non-finite coordinate");
}

PointCloud PointCloud::subset(std::span<const Index> indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), points_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    require(indices[r] < size(), "index in range", "subset index out of range");
    out.row(static_cast<Eigen::Index>(r)) = point(indices[r]);
  }
  return PointCloud(std::move(out));
}

double PointCloud::distance(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  return (point(i) - point(j)).norm();
}

// ---------------------------------------------------------------------------
// NeighborhoodGraph

NeighborhoodGraph::NeighborhoodGraph(Index vertex_count, std::vector<Edge> edges,
                                     int k)
    : vertex_count_(vertex_count), edges_(std::move(edges)), k_(k) {
  for (const Edge& e : edges_) {
    require(e.u < e.v, "edge u < v", "graph edges must satisfy u < v (no self-loops)");
    require(e.v < vertex_count_, "edge index in range", "graph edge references a missing vertex");
    require(std::isfinite(e.weight) && e.weight >= 0.0, "finite nonnegative weight",
            "graph edge weight must be finite and nonnegative");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    require(edges_[i - 1].u != edges_[i].u || edges_[i - 1].v != edges_[i].v,
            "no duplicate edges", "graph contains a duplicate edge");
  }

  offsets_.assign(vertex_count_ + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (Index v = 0; v < vertex_count_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(offsets_.back());
  std::vector<Index> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.u]++] = {e.v, e.weight};
    adjacency_[fill[e.v]++] = {e.u, e.weight};
  }

  constexpr Index kUnset = std::numeric_limits<Index>::max();
  labels_.assign(vertex_count_, kUnset);
  std::vector<Index> stack;
  for (Index s = 0; s < vertex_count_; ++s) {
    if (labels_[s] != kUnset) continue;
    const Index label = component_sizes_.size();
    component_sizes_.push_back(0);
    labels_[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      ++component_sizes_[label];
      for (const Neighbor& nb : neighbors(v)) {
        if (labels_[nb.vertex] == kUnset) {
          labels_[nb.vertex] = label;
          stack.push_back(nb.vertex);
        }
      }
    }
  }
}

std::span<const NeighborhoodGraph::Neighbor> NeighborhoodGraph::neighbors(
    Index v) const {
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool NeighborhoodGraph::has_edge(Index a, Index b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{a, b},
                             [](const Edge& e, const std::pair<Index, Index>& key) {
                               return std::tie(e.u, e.v) < std::tie(key.first, key.second);
                             });
  return it != edges_.end() && it->u == a && it->v == b;
}

std::vector<Index> NeighborhoodGraph::component_sizes() const {
  std::vector<Index> sizes = component_sizes_;
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

void NeighborhoodGraph::require_connected(const std::string& operation) const {
  if (connected()) return;
  fail(ErrorKind::kConnectivity, "graph connected",
       operation + ": neighborhood graph is disconnected (component sizes: " +
           join_sizes(component_sizes()) + ")");
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix::DistanceMatrix(Matrix values, DistanceKind kind)
    : values_(std::move(values)), kind_(kind) {}

DistanceMatrix::DistanceMatrix(Matrix values, std::vector<std::uint8_t> reachable,
                               DistanceKind kind)
    : values_(std::move(values)), reachable_(std::move(reachable)), kind_(kind) {
  require(reachable_.empty() ||
              reachable_.size() == static_cast<std::size_t>(values_.size()),
          "reachability mask shape", "reachability mask does not match matrix shape");
  unreachable_count_ = static_cast<Index>(
      std::count(reachable_.begin(), reachable_.end(), std::uint8_t{0}));
  if (unreachable_count_ == 0) reachable_.clear();
}

std::optional<double> DistanceMatrix::at(Index i, Index j) const {
  if (!reachable(i, j)) return std::nullopt;
  return (*this)(i, j);
}

DistanceMatrix DistanceMatrix::submatrix(std::span<const Index> row_ids,
                                         std::span<const Index> col_ids) const {
  Matrix out(static_cast<Eigen::Index>(row_ids.size()),
             static_cast<Eigen::Index>(col_ids.size()));
  std::vector<std::uint8_t> mask;
  if (!reachable_.empty()) mask.resize(row_ids.size() * col_ids.size());
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    for (std::size_t c = 0; c < col_ids.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (*this)(row_ids[r], col_ids[c]);
      if (!mask.empty()) mask[r * col_ids.size() + c] = reachable(row_ids[r], col_ids[c]);
    }
  }
  return DistanceMatrix(std::move(out), std::move(mask), kind_);
}

void DistanceMatrix::require_reachable(const std::string& operation) const {
  if (all_reachable()) return;
  fail(ErrorKind::kConnectivity, "no unreachable entries",
       operation + ": distance matrix has " + std::to_string(unreachable_count_) +
           " unreachable entries");
}

DistanceMatrix euclidean_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (points.row(i) - points.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d), DistanceKind::kEuclidean);
}

DistanceMatrix euclidean_distances(const PointCloud& cloud) {
  return euclidean_distances(cloud.points());
}

// ---------------------------------------------------------------------------
// kNN graph and shortest paths

NeighborhoodGraph build_knn_graph(const PointCloud& cloud, int k) {
  const Index n = cloud.size();
  require(k >= 1, "k >= 1", "k must be at least 1");
  require(static_cast<Index>(k) < n, "k < N",
          "k = " + std::to_string(k) + " must be smaller than N = " + std::to_string(n));

  std::vector<std::vector<Index>> nearest(n);
  parallel_for(n, [&](Index i) {
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(n - 1);
    for (Index j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(cloud.distance(i, j), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    nearest[i].reserve(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) nearest[i].push_back(cand[static_cast<std::size_t>(r)].second);
  });

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(n * static_cast<Index>(k));
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest[i]) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v, cloud.distance(u, v)});
  return NeighborhoodGraph(n, std::move(edges), k);
}

std::vector<double> single_source_distances(const NeighborhoodGraph& graph,
                                            Index source) {
  require(source < graph.vertex_count(), "source in range", "source index out of range");
  std::vector<double> dist(graph.vertex_count(), kInf);
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& nb : graph.neighbors(v)) {
      const double nd = d + nb.weight;
      if (nd < dist[nb.vertex]) {
        dist[nb.vertex] = nd;
        heap.emplace(nd, nb.vertex);
      }
    }
  }
  return dist;
}

DistanceMatrix geodesic_distances(const NeighborhoodGraph& graph,
                                  std::span<const Index> sources) {
  const Index n = graph.vertex_count();
  IndexList all;
  if (sources.empty()) {
    all.resize(n);
    for (Index i = 0; i < n; ++i) all[i] = i;
    sources = all;
  }
  for (Index s : sources) require(s < n, "sources in range", "geodesic source index out of range");

  const Index m = sources.size();
  Matrix values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<std::uint8_t> mask(graph.connected() ? 0 : m * n, 1);
  parallel_for(m, [&](Index r) {
    const std::vector<double> row = single_source_distances(graph, sources[r]);
    for (Index c = 0; c < n; ++c) {
      const bool ok = std::isfinite(row[c]);
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = ok ? row[c] : 0.0;
      if (!mask.empty()) mask[r * n + c] = ok ? 1 : 0;
    }
  });
  return DistanceMatrix(std::move(values), std::move(mask), DistanceKind::kGeodesic);
}

// ---------------------------------------------------------------------------
// Synthetic shapes

namespace {

using Rng = std::mt19937_64;

double param(const ShapeSpec& spec, const std::string& key, double fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Each generator fills `out` row by row with ideal surface samples.
using Sampler = std::function<Eigen::RowVectorXd(Rng&)>;

Matrix sample_rows(Index n, Index dim, Rng& rng, const Sampler& sampler) {
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Index i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = sampler(rng);
  return out;
}

Sampler circle_sampler(const ShapeSpec& spec) {
  const double r = param(spec, "radius", 1.0);
  return [r](Rng& rng) {
    const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    Eigen::RowVectorXd p(2);
    p << r * std::cos(a), r * std::sin(a);
    return p;
  };
}

Sampler torus_sampler(const ShapeSpec& spec) {
  const double big = param(spec, "major_radius", 2.0);
  const double small = param(spec, "minor_radius", 0.8);
  require(big > small && small > 0, "major_radius > minor_radius > 0", "invalid torus radii");
  return [big, small](Rng& rng) {
    for (;;) {
      const double u = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      // Accept proportionally to the area element so samples are uniform.
      if (uniform(rng, 0.0, big + small) > big + small * std::cos(v)) continue;
      Eigen::RowVectorXd p(3);
      p << (big + small * std::cos(v)) * std::cos(u),
          (big + small * std::cos(v)) * std::sin(u), small * std::sin(v);
      return p;
    }
  };
}

double spiral_arc_length(double t) {
  return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

Sampler swiss_roll_sampler(const ShapeSpec& spec, bool with_hole) {
  const double t0 = param(spec, "t_min", 1.5 * std::numbers::pi);
  const double t1 = param(spec, "t_max", 4.5 * std::numbers::pi);
  const double height = param(spec, "height", with_hole ? 21.0 : 10.0);
  const double hole_radius = with_hole ? param(spec, "hole_radius", 7.0) : 0.0;
  // The default centre sits on the stretch of the roll that has no other
  // layer beside it.
  const double hole_s = spiral_arc_length(param(spec, "hole_center_t", 3.0 * std::numbers::pi));
  const double hole_h = param(spec, "hole_center_h", 0.5) * height;
  require(t1 > t0 && t0 > 0 && height > 0, "t_max > t_min > 0, height > 0",
          "invalid swiss roll parameters");
  const double max_density = std::sqrt(1.0 + t1 * t1);
  return [=](Rng& rng) {
    for (;;) {
      const double t = uniform(rng, t0, t1);
      // Arc-length density is sqrt(1 + t^2) along the spiral.
      if (uniform(rng, 0.0, max_density) > std::sqrt(1.0 + t * t)) continue;
      const double h = uniform(rng, 0.0, height);
      if (hole_radius > 0.0) {
        const double ds = spiral_arc_length(t) - hole_s;
        const double dh = h - hole_h;
        if (ds * ds + dh * dh < hole_radius * hole_radius) continue;
      }
      Eigen::RowVectorXd p(3);
      p << t * std::cos(t), h, t * std::sin(t);
      return p;
    }
  };
}

Sampler figure_eight_sampler(const ShapeSpec& spec) {
  const double r = param(spec, "radius", 1.0);
  // Two unit rings in perpendicular planes sharing the origin.
  return [r](Rng& rng) {
    const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    Eigen::RowVectorXd p(3);
    if (uniform(rng, 0.0, 1.0) < 0.5) {
      p << r * (1.0 - std::cos(a)), r * std::sin(a), 0.0;
    } else {
      p << -r * (1.0 - std::cos(a)), 0.0, r * std::sin(a);
    }
    return p;
  };
}

Sampler cylinder_holes_sampler(const ShapeSpec& spec) {
  const int holes = static_cast<int>(param(spec, "holes", 3));
  const double radius = param(spec, "radius", 1.0);
  const double height = param(spec, "height", 3.0);
  require(holes >= 0, "holes >= 0", "hole count must be nonnegative");
  require(radius > 0 && height > 0, "radius > 0, height > 0", "invalid cylinder parameters");
  const double circumference = 2.0 * std::numbers::pi * radius;
  const double default_hole =
      holes > 0 ? std::min(0.6 * radius, 0.35 * circumference / holes) : 0.0;
  const double hole_radius = param(spec, "hole_radius", default_hole);
  require(hole_radius * 2.0 < height, "2 * hole_radius < height",
          "holes must fit inside the cylinder height");
  return [=](Rng& rng) {
    for (;;) {
      const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double z = uniform(rng, 0.0, height);
      bool carved = false;
      for (int h = 0; h < holes && !carved; ++h) {
        const double center = 2.0 * std::numbers::pi * h / holes;
        double da = std::remainder(a - center, 2.0 * std::numbers::pi);
        const double ds = radius * da;
        const double dz = z - 0.5 * height;
        carved = ds * ds + dz * dz < hole_radius * hole_radius;
      }
      if (carved) continue;
      Eigen::RowVectorXd p(3);
      p << radius * std::cos(a), radius * std::sin(a), z;
      return p;
    }
  };
}

Sampler s_surface_holes_sampler(const ShapeSpec& spec) {
  const int rows = static_cast<int>(param(spec, "hole_rows", 3));
  const int cols = static_cast<int>(param(spec, "hole_cols", 11));
  const double width = param(spec, "width", 3.0);
  require(rows >= 0 && cols >= 0 && width > 0, "hole grid >= 0, width > 0",
          "invalid s_surface_holes parameters");
  const double length = 3.0 * std::numbers::pi;  // arc length of the S curve
  const double cell_s = cols > 0 ? length / cols : length;
  const double cell_w = rows > 0 ? width / rows : width;
  const double hole_radius = param(spec, "hole_radius", 0.3 * std::min(cell_s, cell_w));
  return [=](Rng& rng) {
    for (;;) {
      const double t = uniform(rng, -1.5 * std::numbers::pi, 1.5 * std::numbers::pi);
      const double y = uniform(rng, 0.0, width);
      if (rows > 0 && cols > 0) {
        const double s = t + 1.5 * std::numbers::pi;
        const double cs = (std::floor(s / cell_s) + 0.5) * cell_s;
        const double cw = (std::floor(y / cell_w) + 0.5) * cell_w;
        if ((s - cs) * (s - cs) + (y - cw) * (y - cw) < hole_radius * hole_radius) continue;
      }
      Eigen::RowVectorXd p(3);
      p << std::sin(t), y, (t < 0 ? -1.0 : 1.0) * (std::cos(t) - 1.0);
      return p;
    }
  };
}

Sampler ring_chain_sampler(const ShapeSpec& spec) {
  const int rings = static_cast<int>(param(spec, "rings", 4));
  const double inner = param(spec, "inner_radius", 0.6);
  const double outer = param(spec, "outer_radius", 1.0);
  const double spacing = param(spec, "spacing", 1.8);
  const double bend = param(spec, "bend_radius", 4.0);
  require(rings >= 1 && outer > inner && inner > 0, "rings >= 1, outer > inner > 0",
          "invalid ring_chain parameters");
  require(spacing < 2.0 * outer, "spacing < 2 * outer_radius",
          "rings must overlap to form a connected chain");
  require(bend > 0, "bend_radius > 0", "bend radius must be positive");
  const double half = 0.5 * spacing * (rings - 1);
  return [=](Rng& rng) {
    for (;;) {
      const double x = uniform(rng, -half - outer, half + outer);
      const double y = uniform(rng, -outer, outer);
      bool inside = false;
      for (int r = 0; r < rings && !inside; ++r) {
        const double cx = -half + spacing * r;
        const double d = std::hypot(x - cx, y);
        inside = d >= inner && d <= outer;
      }
      if (!inside) continue;
      // Roll the plane onto a cylinder: an isometric bend.
      Eigen::RowVectorXd p(3);
      p << bend * std::sin(x / bend), y, bend * (1.0 - std::cos(x / bend));
      return p;
    }
  };
}

struct ShapeEntry {
  const char* name;
  Index dim;
  Sampler (*make)(const ShapeSpec&);
};

const ShapeEntry kShapes[] = {
    {"circle", 2, circle_sampler},
    {"torus", 3, torus_sampler},
    {"swiss_roll", 3, [](const ShapeSpec& s) { return swiss_roll_sampler(s, false); }},
    {"swiss_roll_hole", 3, [](const ShapeSpec& s) { return swiss_roll_sampler(s, true); }},
    {"figure_eight_bended", 3, figure_eight_sampler},
    {"cylinder_holes", 3, cylinder_holes_sampler},
    {"s_surface_holes", 3, s_surface_holes_sampler},
    {"ring_chain", 3, ring_chain_sampler},
};

}  // namespace

std::vector<std::string> shape_names() {
  std::vector<std::string> names;
  for (const auto& s : kShapes) names.emplace_back(s.name);
  return names;
}

PointCloud generate_shape(const ShapeSpec& spec, std::uint64_t seed) {
  require(spec.n > 0, "N > 0", "sample count must be positive");
  require(spec.noise >= 0 && std::isfinite(spec.noise), "noise >= 0",
          "noise standard deviation must be nonnegative");
  const ShapeEntry* entry = nullptr;
  for (const auto& s : kShapes) {
    if (spec.name == s.name) entry = &s;
  }
  if (entry == nullptr) {
    fail(ErrorKind::kParameter, "known shape", "unknown shape '" + spec.name + "'");
  }

  Rng rng(seed);
  Matrix points = sample_rows(spec.n, entry->dim, rng, entry->make(spec));
  if (spec.noise > 0) {
    std::normal_distribution<double> gauss(0.0, spec.noise);
    for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] += gauss(rng);
  }
  return PointCloud(std::move(points));
}

// ---------------------------------------------------------------------------

PointCloud delay_embedding(std::span<const double> signal, Index window,
                           Index step) {
  const Index length = signal.size();
  require(window >= 1, "window >= 1", "window must be at least 1");
  require(step >= 1, "step >= 1", "step must be at least 1");
  require(window <= length, "window <= L",
          "window " + std::to_string(window) + " exceeds signal length " +
              std::to_string(length));
  const Index count = (length - window) / step + 1;
  Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(window));
  for (Index r = 0; r < count; ++r) {
    for (Index c = 0; c < window; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = signal[r * step + c];
    }
  }
  return PointCloud(std::move(out));
}

IndexList maxmin_subsample_from(const PointCloud& cloud, Index m, Index start) {
  const Index n = cloud.size();
  require(m >= 1 && m <= n, "1 <= m <= N",
          "subsample size " + std::to_string(m) + " must lie in [1, " + std::to_string(n) + "]");
  require(start < n, "start in range", "start index out of range");
  IndexList chosen{start};
  chosen.reserve(m);
  std::vector<double> nearest(n, kInf);
  Index last = start;
  while (chosen.size() < m) {
    Index best = 0;
    double best_d = -1.0;
    for (Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], cloud.distance(i, last));
      if (nearest[i] > best_d) {  // strict: ties keep the lower index
        best_d = nearest[i];
        best = i;
      }
    }
    chosen.push_back(best);
    last = best;
  }
  return chosen;
}

IndexList maxmin_subsample(const PointCloud& cloud, Index m, std::uint64_t seed) {
  require(m >= 1 && m <= cloud.size(), "1 <= m <= N",
          "subsample size " + std::to_string(m) + " must lie in [1, " +
              std::to_string(cloud.size()) + "]");
  Rng rng(seed);
  const Index start = std::uniform_int_distribution<Index>(0, cloud.size() - 1)(rng);
  return maxmin_subsample_from(cloud, m, start);
}

IndexList persistence_subsample(const PointCloud& cloud, Index limit, std::uint64_t seed) {
  require(limit >= 1, "subsample limit >= 1", "subsample limit must be positive");
  if (cloud.size() <= limit) {
    IndexList all(cloud.size());
    for (Index i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return maxmin_subsample(cloud, limit, seed);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace skelmap
