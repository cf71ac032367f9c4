#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skelmap/geometry.h"

namespace skelmap {

enum class BaseStrategy { kExtreme, kBarycenter, kExplicit };

std::string to_string(BaseStrategy strategy);
BaseStrategy parse_base_strategy(const std::string& name);

struct FilterValues {
  std::vector<double> values;
  std::string name = "dtb";
  std::optional<Index> base_point;
};

// Distance-to-base-point filter: geodesic distances from a base point chosen
// by `strategy`. `extreme` starts at the point nearest the coordinate mean,
// walks to the farthest point a, then takes the farthest point from a.
FilterValues compute_filter(const PointCloud& cloud, const NeighborhoodGraph& graph,
                            BaseStrategy strategy, std::optional<Index> explicit_base = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct CoverSpec {
  Index n = 1;
  double p = 0.0;
  std::vector<Interval> intervals;

  // Membership is half-open [lo, hi) except for the last interval, which is
  // closed so the maximum is covered.
  bool contains(Index interval, double value) const;
};

// n equal-length intervals over [min f, max f] with overlap fraction p.
CoverSpec build_cover(const FilterValues& filter, Index n, double p);

struct DbscanParams {
  // nullopt: auto_scale times the mean distance to the minpts-th neighbor
  // within the interval's members.
  std::optional<double> eps;
  Index minpts = 5;
  double auto_scale = 2.0;
};

// Cluster labels for the given points (indices into cloud), -1 for noise.
// Points are visited in the given order, which fixes border assignment.
std::vector<int> dbscan(const PointCloud& cloud, const IndexList& members, double eps,
                        Index minpts);

// Mean distance from each member to its minpts-th nearest other member.
double auto_eps(const PointCloud& cloud, const IndexList& members, Index minpts);

struct SkeletonNode {
  IndexList members;  // ascending
  Index centroid = 0;
  Index interval = 0;
};

struct SkeletonEdge {
  Index u = 0;  // u < v
  Index v = 0;
  Index shared = 0;
};

struct Skeleton {
  std::vector<SkeletonNode> nodes;
  std::vector<SkeletonEdge> edges;
  FilterValues filter;
  CoverSpec cover;
  DbscanParams dbscan;
  std::vector<double> eps_used;  // per interval
};

inline constexpr Index kDefaultIntervals = 10;
inline constexpr double kDefaultOverlap = 0.3;
inline constexpr Index kDefaultMinPts = 5;

// Mapper: DBSCAN on each interval's pullback (ambient Euclidean metric);
// noise points become singleton nodes. Nodes in the same or adjacent
// intervals are joined when their member sets intersect.
Skeleton mapper_skeleton(const PointCloud& cloud, const FilterValues& filter,
                         const CoverSpec& cover, const DbscanParams& params = {});

// Centroid indices, deduplicated and sorted.
IndexList extract_landmarks(const Skeleton& skeleton);

// |E| - |V| + #components of the skeleton graph.
Index cycle_rank(const Skeleton& skeleton);

}  // namespace skelmap
