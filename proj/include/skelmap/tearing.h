#pragma once

#include <optional>
#include <vector>

#include "skelmap/embedding.h"
#include "skelmap/geometry.h"
#include "skelmap/quality.h"
#include "skelmap/skeleton.h"

namespace skelmap {

struct CutSpec {
  Index u = 0;  // skeleton node ids joined by a skeleton edge
  Index v = 0;
  double t = 0.5;
  std::optional<double> radius;  // nullopt: farthest member of u or v from q
  bool global = false;           // ignore the locality ball
};

struct TearResult {
  CutSpec cut;
  NeighborhoodGraph graph;
  std::vector<Edge> removed;
  bool connected = true;
  double radius = 0.0;  // radius actually applied (infinite when global)
  std::vector<double> cut_point;
  std::optional<Embedding> embedding;
  std::optional<QualityReport> quality;
};

// Removes every graph edge whose endpoints fall on opposite sides of the
// plane through q = c_u + t (c_v - c_u) with normal c_v - c_u, restricted to
// edges with both endpoints within the radius of q. Points on the plane
// (|signed distance| <= 1e-12) count as the positive side.
TearResult tear_graph(const PointCloud& cloud, const NeighborhoodGraph& graph,
                      const Skeleton& skeleton, const CutSpec& cut);

struct RankOptions {
  int d = 2;
  QualityOptions quality;
  int extra_k = 0;  // rebuild the kNN graph with k + extra_k before tearing
};

struct RankedCut {
  Index candidate = 0;  // position in the candidate list
  TearResult result;
  bool valid = false;   // false when the cut disconnects the graph
};

// One candidate per skeleton edge at t = 0.5.
std::vector<CutSpec> all_edge_cuts(const Skeleton& skeleton);

// Tears, embeds with Isomap and scores every candidate. Valid cuts come first,
// ordered by PB_1 descending, WD_1 ascending, then candidate index; invalid
// cuts follow in candidate order.
std::vector<RankedCut> rank_cuts(const PointCloud& cloud, const NeighborhoodGraph& graph,
                                 const Skeleton& skeleton, const std::vector<CutSpec>& candidates,
                                 const RankOptions& options = {});

}  // namespace skelmap
