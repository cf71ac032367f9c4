#include "skelmap/tearing.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "skelmap/error.h"
#include "skelmap/parallel.h"

namespace skelmap {

namespace {

constexpr double kPlaneTolerance = 1e-12;

}  // namespace

TearResult tear_graph(const PointCloud& cloud, const NeighborhoodGraph& graph,
                      const Skeleton& skeleton, const CutSpec& cut) {
  require(graph.vertex_count() == cloud.size(), "graph matches cloud",
          "graph vertex count differs from the cloud size");
  require(cut.u < skeleton.nodes.size() && cut.v < skeleton.nodes.size(), "cut nodes exist",
          "cut refers to a node outside the skeleton");
  const bool is_edge = std::any_of(skeleton.edges.begin(), skeleton.edges.end(), [&](const auto& e) {
    return (e.u == cut.u && e.v == cut.v) || (e.u == cut.v && e.v == cut.u);
  });
  require(is_edge, "cut on a skeleton edge", "nodes of the cut are not joined by a skeleton edge");
  require(cut.t >= 0.0 && cut.t <= 1.0, "0 <= t <= 1", "cut position t must lie in [0, 1]");
  require(!cut.radius || *cut.radius > 0.0, "radius > 0", "locality radius must be positive");

  const Eigen::RowVectorXd cu = cloud.point(skeleton.nodes[cut.u].centroid);
  const Eigen::RowVectorXd cv = cloud.point(skeleton.nodes[cut.v].centroid);
  const Eigen::RowVectorXd axis = cv - cu;
  require(axis.norm() > 0.0, "distinct centroids", "cut edge has a zero-length centroid segment");
  const Eigen::RowVectorXd normal = axis.normalized();
  const Eigen::RowVectorXd q = cu + cut.t * axis;

  TearResult out;
  out.cut = cut;
  out.cut_point.assign(q.data(), q.data() + q.size());
  if (cut.global) {
    out.radius = std::numeric_limits<double>::infinity();
  } else if (cut.radius) {
    out.radius = *cut.radius;
  } else {
    for (Index node : {cut.u, cut.v}) {
      for (Index i : skeleton.nodes[node].members) {
        out.radius = std::max(out.radius, (cloud.point(i) - q).norm());
      }
    }
  }

  const Index n = cloud.size();
  std::vector<std::int8_t> side(n);
  std::vector<std::uint8_t> local(n);
  for (Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd rel = cloud.point(i) - q;
    side[i] = rel.dot(normal) >= -kPlaneTolerance ? 1 : -1;
    local[i] = rel.norm() <= out.radius ? 1 : 0;
  }
  std::vector<Edge> kept;
  for (const Edge& e : graph.edges()) {
    if (local[e.u] && local[e.v] && side[e.u] != side[e.v]) {
      out.removed.push_back(e);
    } else {
      kept.push_back(e);
    }
  }
  out.graph = NeighborhoodGraph(n, std::move(kept), graph.k());
  out.connected = out.graph.connected();
  return out;
}

std::vector<CutSpec> all_edge_cuts(const Skeleton& skeleton) {
  std::vector<CutSpec> out;
  for (const auto& e : skeleton.edges) out.push_back({e.u, e.v, 0.5, std::nullopt, false});
  return out;
}

std::vector<RankedCut> rank_cuts(const PointCloud& cloud, const NeighborhoodGraph& graph,
                                 const Skeleton& skeleton, const std::vector<CutSpec>& candidates,
                                 const RankOptions& options) {
  graph.require_connected("cut ranking");
  require(options.extra_k >= 0, "extra_k >= 0", "extra_k must be nonnegative");
  const NeighborhoodGraph base =
      options.extra_k > 0 ? build_knn_graph(cloud, graph.k() + options.extra_k) : graph;
  const QualityContext context = make_quality_context(cloud, options.quality);

  std::vector<RankedCut> ranked(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    RankedCut& r = ranked[i];
    r.candidate = i;
    r.result = tear_graph(cloud, base, skeleton, candidates[i]);
    r.valid = r.result.connected;
    if (!r.valid) return;
    Embedding emb = isomap(r.result.graph, options.d);
    r.result.quality = quality_report(context, emb, &r.result.graph, options.quality);
    r.result.embedding = std::move(emb);
  });

  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedCut& a, const RankedCut& b) {
    if (a.valid != b.valid) return a.valid;
    if (!a.valid) return a.candidate < b.candidate;
    const auto& qa = *a.result.quality;
    const auto& qb = *b.result.quality;
    return std::make_tuple(-static_cast<double>(qa.pb1_after), qa.wd1, a.candidate) <
           std::make_tuple(-static_cast<double>(qb.pb1_after), qb.wd1, b.candidate);
  });
  return ranked;
}

}  // namespace skelmap
