#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "skelmap/geometry.h"

namespace skelmap {

struct PersistencePair {
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();

  bool infinite() const { return death == std::numeric_limits<double>::infinity(); }
  double persistence() const { return death - birth; }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

// Birth/death pairs of one homology dimension. Pairs are kept sorted by
// (birth, death); zero-persistence pairs never appear.
struct PersistenceDiagram {
  int dim = 0;
  double scale_cap = std::numeric_limits<double>::infinity();
  std::vector<PersistencePair> pairs;

  Index infinite_count() const;
  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

// min_i max_j d(i, j): at this scale the Rips complex is a cone, so every
// finite class has died.
double enclosing_radius(const DistanceMatrix& dist);

// Vietoris-Rips persistence in dimensions 0..max_dim (max_dim <= 1) over Z/2.
// Simplices with filtration value above the cap are omitted; nullopt means
// the enclosing radius. Dimension 0 uses union-find over sorted edges;
// dimension 1 reduces the coboundary matrix of the non-tree edges (tree edges
// are cleared), which yields the same pairs as reducing the triangle boundary
// matrix.
std::vector<PersistenceDiagram> vr_persistence(const DistanceMatrix& dist, int max_dim,
                                               std::optional<double> scale_cap = {});

// Reference implementation: enumerates every simplex up to dimension
// max_dim + 1 and reduces the full boundary matrix column by column with no
// shortcuts. Limited to 25 points.
std::vector<PersistenceDiagram> brute_force_persistence(
    const DistanceMatrix& dist, int max_dim, std::optional<double> scale_cap = {});

inline constexpr Index kBruteForcePersistenceLimit = 25;

struct BettiSummary {
  int dim = 0;
  Index count = 0;
  double threshold = 0.0;
  double gap_width = 0.0;
  // True when the winning gap is narrower than 1.5x the runner-up, i.e. the
  // separation between features and noise is not clean.
  bool ambiguous = false;
};

inline constexpr double kCleanGapRatio = 1.5;

// Counts pairs whose persistence exceeds the threshold, plus infinite pairs.
// Without an explicit threshold the widest absolute gap between consecutive
// finite persistences (sorted descending, with 0 appended) is located and the
// threshold placed at its midpoint.
BettiSummary persistent_betti(const PersistenceDiagram& diagram,
                              std::optional<double> threshold = {});

}  // namespace skelmap
