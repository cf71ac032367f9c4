#pragma once

#include <limits>
#include <vector>

#include "skelmap/persistence.h"

namespace skelmap {

// Marks a point matched to the diagonal.
inline constexpr Index kDiagonal = std::numeric_limits<Index>::max();

struct Assignment {
  Index a = kDiagonal;  // index into the first diagram's pairs, or kDiagonal
  Index b = kDiagonal;  // index into the second diagram's pairs, or kDiagonal
  double cost = 0.0;    // L-infinity ground cost of this pair
};

// Bijection between the finite points of two diagrams, augmented with the
// diagonal. Diagonal-to-diagonal pairs are implicit and omitted.
struct Matching {
  std::vector<Assignment> assignments;
  double cost = 0.0;  // the distance value implied by the assignments
};

struct MetricResult {
  double value = 0.0;
  Matching matching;
};

enum class CapPolicy {
  kRequireEqual,  // diagrams computed with different caps are rejected
  kIgnore,        // caller vouches that the diagrams are comparable
};

inline constexpr double kBottleneckP = std::numeric_limits<double>::infinity();

// Ground cost between two points, and from a point to its nearest diagonal
// point, under the L-infinity metric.
double point_cost(const PersistencePair& x, const PersistencePair& y);
double diagonal_cost(const PersistencePair& x);

// Recomputes (sum cost^p)^(1/p), or the max for p = infinity.
double matching_value(const Matching& matching, double p);

// Degree-p Wasserstein distance solved exactly with the Hungarian algorithm
// on the augmented (|A| + |B|)-square cost matrix. Infinite-death pairs are
// dropped from both sides when their counts agree; otherwise the distance is
// +infinity with an empty matching. Diagrams whose finite births all coincide
// (dimension 0) take an exact O(|A| |B|) path over points sorted by death.
MetricResult wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                         CapPolicy policy = CapPolicy::kRequireEqual);

// Always the Hungarian solver, whatever the births.
MetricResult wasserstein_hungarian(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   double p, CapPolicy policy = CapPolicy::kRequireEqual);

// Bottleneck distance: binary search over candidate costs with a bipartite
// perfect-matching feasibility test.
MetricResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                        CapPolicy policy = CapPolicy::kRequireEqual);

// Exhaustive enumeration of augmented matchings (|A| + |B| <= 8). p may be
// kBottleneckP.
MetricResult brute_force_match(const PersistenceDiagram& a, const PersistenceDiagram& b,
                               double p, CapPolicy policy = CapPolicy::kRequireEqual);

inline constexpr Index kBruteForceMatchLimit = 8;

}  // namespace skelmap
