#include "skelmap/skeleton.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "skelmap/error.h"
#include "skelmap/parallel.h"

namespace skelmap {

namespace {

Index nearest_to_mean(const PointCloud& cloud, const IndexList& members) {
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(cloud.dim()));
  for (Index i : members) mean += cloud.point(i);
  mean /= static_cast<double>(members.size());
  Index best = members.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (Index i : members) {
    const double d = (cloud.point(i) - mean).squaredNorm();
    if (d < best_d || (d == best_d && i < best)) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Index farthest(const std::vector<double>& values) {
  return static_cast<Index>(std::max_element(values.begin(), values.end()) - values.begin());
}

Eigen::MatrixXd pairwise(const PointCloud& cloud, const IndexList& members) {
  const auto m = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd d(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    d(a, a) = 0.0;
    for (Eigen::Index b = a + 1; b < m; ++b) {
      d(a, b) = d(b, a) = cloud.distance(members[a], members[b]);
    }
  }
  return d;
}

double auto_eps_from(const Eigen::MatrixXd& d, Index minpts) {
  const auto m = d.rows();
  if (m <= 1) return 0.0;
  const auto k = static_cast<Eigen::Index>(std::min<Index>(minpts, static_cast<Index>(m - 1)));
  double total = 0.0;
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) row[static_cast<std::size_t>(b)] = d(a, b);
    // row includes the zero self-distance, so the k-th other neighbor sits at k.
    std::nth_element(row.begin(), row.begin() + k, row.end());
    total += row[static_cast<std::size_t>(k)];
  }
  return total / static_cast<double>(m);
}

std::vector<int> dbscan_from(const Eigen::MatrixXd& d, double eps, Index minpts) {
  const auto m = d.rows();
  std::vector<std::vector<Eigen::Index>> neighborhood(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      if (d(a, b) <= eps) neighborhood[static_cast<std::size_t>(a)].push_back(b);
    }
  }
  auto core = [&](Eigen::Index a) {
    return neighborhood[static_cast<std::size_t>(a)].size() >= minpts;
  };
  constexpr int kUnvisited = -2;
  std::vector<int> label(static_cast<std::size_t>(m), kUnvisited);
  int next = 0;
  for (Eigen::Index a = 0; a < m; ++a) {
    if (label[static_cast<std::size_t>(a)] != kUnvisited) continue;
    if (!core(a)) {
      label[static_cast<std::size_t>(a)] = -1;
      continue;
    }
    const int id = next++;
    label[static_cast<std::size_t>(a)] = id;
    std::deque<Eigen::Index> queue{a};
    while (!queue.empty()) {
      const Eigen::Index x = queue.front();
      queue.pop_front();
      for (Eigen::Index y : neighborhood[static_cast<std::size_t>(x)]) {
        int& ly = label[static_cast<std::size_t>(y)];
        if (ly >= 0) continue;
        const bool fresh = ly == kUnvisited;
        ly = id;
        // Points marked noise earlier are never core, so only fresh ones expand.
        if (fresh && core(y)) queue.push_back(y);
      }
    }
  }
  return label;
}

}  // namespace

std::string to_string(BaseStrategy strategy) {
  switch (strategy) {
    case BaseStrategy::kExtreme: return "extreme";
    case BaseStrategy::kBarycenter: return "barycenter";
    case BaseStrategy::kExplicit: return "explicit";
  }
  return "unknown";
}

BaseStrategy parse_base_strategy(const std::string& name) {
  for (auto s : {BaseStrategy::kExtreme, BaseStrategy::kBarycenter, BaseStrategy::kExplicit}) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorKind::kParameter, "known base strategy", "unknown base strategy '" + name + "'");
}

FilterValues compute_filter(const PointCloud& cloud, const NeighborhoodGraph& graph,
                            BaseStrategy strategy, std::optional<Index> explicit_base) {
  require(graph.vertex_count() == cloud.size(), "graph matches cloud",
          "graph vertex count differs from the cloud size");
  graph.require_connected("distance-to-base filter");
  IndexList all(cloud.size());
  std::iota(all.begin(), all.end(), Index{0});

  Index base = 0;
  switch (strategy) {
    case BaseStrategy::kExplicit:
      require(explicit_base.has_value() && *explicit_base < cloud.size(), "base index in range",
              "explicit base point missing or out of range");
      base = *explicit_base;
      break;
    case BaseStrategy::kBarycenter:
      base = nearest_to_mean(cloud, all);
      break;
    case BaseStrategy::kExtreme: {
      const Index start = nearest_to_mean(cloud, all);
      const Index a = farthest(single_source_distances(graph, start));
      base = farthest(single_source_distances(graph, a));
      break;
    }
  }
  FilterValues out;
  out.values = single_source_distances(graph, base);
  out.base_point = base;
  return out;
}

bool CoverSpec::contains(Index interval, double value) const {
  const Interval& iv = intervals[interval];
  if (value < iv.lo) return false;
  return interval + 1 == intervals.size() ? value <= iv.hi : value < iv.hi;
}

CoverSpec build_cover(const FilterValues& filter, Index n, double p) {
  require(n >= 1, "n >= 1", "cover needs at least one interval");
  require(p >= 0.0 && p < 1.0, "0 <= p < 1", "overlap fraction must be in [0, 1)");
  require(!filter.values.empty(), "nonempty filter", "filter has no values");
  const auto [lo_it, hi_it] = std::minmax_element(filter.values.begin(), filter.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  require(std::isfinite(lo) && std::isfinite(hi), "finite filter", "filter values must be finite");

  CoverSpec cover;
  cover.n = n;
  cover.p = p;
  if (hi == lo) {
    cover.intervals.push_back({lo, hi});
    return cover;
  }
  const double length = (hi - lo) / (static_cast<double>(n) - static_cast<double>(n - 1) * p);
  const double step = length * (1.0 - p);
  for (Index i = 0; i < n; ++i) {
    const double a = lo + static_cast<double>(i) * step;
    cover.intervals.push_back({a, i + 1 == n ? hi : a + length});
  }
  return cover;
}

double auto_eps(const PointCloud& cloud, const IndexList& members, Index minpts) {
  return auto_eps_from(pairwise(cloud, members), minpts);
}

std::vector<int> dbscan(const PointCloud& cloud, const IndexList& members, double eps,
                        Index minpts) {
  require(minpts >= 1, "minpts >= 1", "DBSCAN minpts must be positive");
  require(eps >= 0.0, "eps >= 0", "DBSCAN eps must be nonnegative");
  return dbscan_from(pairwise(cloud, members), eps, minpts);
}

Skeleton mapper_skeleton(const PointCloud& cloud, const FilterValues& filter,
                         const CoverSpec& cover, const DbscanParams& params) {
  require(filter.values.size() == cloud.size(), "filter matches cloud",
          "filter length differs from the cloud size");
  require(!cover.intervals.empty(), "nonempty cover", "cover has no intervals");
  require(params.minpts >= 1, "minpts >= 1", "DBSCAN minpts must be positive");
  require(!params.eps || *params.eps > 0.0, "eps > 0", "DBSCAN eps must be positive");
  require(params.auto_scale > 0.0, "auto_scale > 0", "DBSCAN auto eps scale must be positive");

  const Index intervals = cover.intervals.size();
  std::vector<std::vector<SkeletonNode>> per_interval(intervals);
  std::vector<double> eps_used(intervals, 0.0);
  parallel_for(intervals, [&](std::size_t iv) {
    IndexList members;
    for (Index i = 0; i < cloud.size(); ++i) {
      if (cover.contains(iv, filter.values[i])) members.push_back(i);
    }
    if (members.empty()) return;
    const Eigen::MatrixXd d = pairwise(cloud, members);
    const double eps = params.eps ? *params.eps : params.auto_scale * auto_eps_from(d, params.minpts);
    eps_used[iv] = eps;
    const std::vector<int> label = dbscan_from(d, eps, params.minpts);
    const int clusters = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    std::vector<SkeletonNode> nodes(static_cast<std::size_t>(clusters));
    for (std::size_t a = 0; a < members.size(); ++a) {
      if (label[a] >= 0) {
        nodes[static_cast<std::size_t>(label[a])].members.push_back(members[a]);
      }
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
      if (label[a] < 0) nodes.push_back({{members[a]}, 0, 0});
    }
    for (auto& node : nodes) {
      node.interval = iv;
      node.centroid = nearest_to_mean(cloud, node.members);
    }
    per_interval[iv] = std::move(nodes);
  });

  Skeleton out;
  out.filter = filter;
  out.cover = cover;
  out.dbscan = params;
  out.eps_used = std::move(eps_used);
  for (auto& nodes : per_interval) {
    for (auto& node : nodes) out.nodes.push_back(std::move(node));
  }

  std::vector<std::vector<Index>> owners(cloud.size());
  for (Index id = 0; id < out.nodes.size(); ++id) {
    for (Index i : out.nodes[id].members) owners[i].push_back(id);
  }
  std::map<std::pair<Index, Index>, Index> shared;
  for (const auto& list : owners) {
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        const Index a = list[x];
        const Index b = list[y];
        const Index ia = out.nodes[a].interval;
        const Index ib = out.nodes[b].interval;
        if (ia == ib || (ia > ib ? ia - ib : ib - ia) > 1) continue;
        ++shared[{std::min(a, b), std::max(a, b)}];
      }
    }
  }
  for (const auto& [key, count] : shared) out.edges.push_back({key.first, key.second, count});
  return out;
}

IndexList extract_landmarks(const Skeleton& skeleton) {
  IndexList out;
  for (const auto& node : skeleton.nodes) out.push_back(node.centroid);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Index cycle_rank(const Skeleton& skeleton) {
  const Index v = skeleton.nodes.size();
  std::vector<Index> parent(v);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  Index components = v;
  for (const auto& e : skeleton.edges) {
    const Index a = find(e.u);
    const Index b = find(e.v);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return skeleton.edges.size() + components - v;
}

}  // namespace skelmap
