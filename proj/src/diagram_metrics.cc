#include "skelmap/diagram_metrics.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <tuple>

#include "skelmap/error.h"

namespace skelmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite points of both diagrams after the essential-class convention.
struct Prepared {
  std::vector<Index> a;  // indices of finite pairs in the first diagram
  std::vector<Index> b;
  bool comparable = true;  // false when infinite-death counts differ
};

Prepared prepare(const PersistenceDiagram& a, const PersistenceDiagram& b, CapPolicy policy) {
  require(a.dim == b.dim, "equal homology dimension",
          "cannot compare diagrams of dimension " + std::to_string(a.dim) + " and " +
              std::to_string(b.dim));
  if (policy == CapPolicy::kRequireEqual) {
    require(a.scale_cap == b.scale_cap, "identical scale_cap",
            "diagrams were computed with different scale caps");
  }
  Prepared out;
  for (Index i = 0; i < a.pairs.size(); ++i) {
    if (!a.pairs[i].infinite()) out.a.push_back(i);
  }
  for (Index j = 0; j < b.pairs.size(); ++j) {
    if (!b.pairs[j].infinite()) out.b.push_back(j);
  }
  out.comparable = a.infinite_count() == b.infinite_count();
  return out;
}

MetricResult incomparable() {
  MetricResult r;
  r.value = kInf;
  r.matching.cost = kInf;
  return r;
}

void sort_assignments(Matching& m) {
  std::sort(m.assignments.begin(), m.assignments.end(), [](const Assignment& x, const Assignment& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
}

double powered(double c, double p) { return p == 1.0 ? c : std::pow(c, p); }

// Minimum-cost perfect assignment on a dense square matrix (Kuhn-Munkres with
// potentials, O(n^3)). Returns the column assigned to each row.
std::vector<Index> hungarian(const std::vector<double>& cost, Index n) {
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);  // match[col] = row, 1-based
  std::vector<std::uint8_t> used(n + 1);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const Index r = match[col0];
      double delta = kInf;
      Index col1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const Index col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Index> row_to_col(n);
  for (Index c = 1; c <= n; ++c) row_to_col[match[c] - 1] = c - 1;
  return row_to_col;
}

// Hopcroft-Karp maximum matching; returns the partner of every left vertex
// (or npos).
class BipartiteMatcher {
 public:
  static constexpr Index npos = std::numeric_limits<Index>::max();

  explicit BipartiteMatcher(const std::vector<std::vector<Index>>& adj, Index right)
      : adj_(adj), left_(adj.size()), match_l_(left_, npos), match_r_(right, npos), dist_(left_) {}

  Index run() {
    Index size = 0;
    while (bfs()) {
      for (Index l = 0; l < left_; ++l) {
        if (match_l_[l] == npos && dfs(l)) ++size;
      }
    }
    return size;
  }

  const std::vector<Index>& left_matches() const { return match_l_; }

 private:
  bool bfs() {
    std::queue<Index> q;
    bool found = false;
    for (Index l = 0; l < left_; ++l) {
      if (match_l_[l] == npos) {
        dist_[l] = 0;
        q.push(l);
      } else {
        dist_[l] = npos;
      }
    }
    while (!q.empty()) {
      const Index l = q.front();
      q.pop();
      for (Index r : adj_[l]) {
        const Index next = match_r_[r];
        if (next == npos) {
          found = true;
        } else if (dist_[next] == npos) {
          dist_[next] = dist_[l] + 1;
          q.push(next);
        }
      }
    }
    return found;
  }

  bool dfs(Index l) {
    for (Index r : adj_[l]) {
      const Index next = match_r_[r];
      if (next == npos || (dist_[next] == dist_[l] + 1 && dfs(next))) {
        match_l_[l] = r;
        match_r_[r] = l;
        return true;
      }
    }
    dist_[l] = npos;
    return false;
  }

  const std::vector<std::vector<Index>>& adj_;
  Index left_;
  std::vector<Index> match_l_, match_r_, dist_;
};

// Own-copy augmentation used by the bottleneck search and the brute force:
// rows are A points then one diagonal copy per B point, columns are B points
// then one diagonal copy per A point. Unusable cells cost +infinity.
struct AugmentedCosts {
  Index na = 0, nb = 0;
  std::vector<double> cost;  // (na + nb)^2, row-major

  AugmentedCosts(const PersistenceDiagram& a, const PersistenceDiagram& b, const Prepared& prep)
      : na(prep.a.size()), nb(prep.b.size()) {
    const Index n = na + nb;
    cost.assign(n * n, kInf);
    for (Index i = 0; i < na; ++i) {
      for (Index j = 0; j < nb; ++j) cost[i * n + j] = point_cost(a.pairs[prep.a[i]], b.pairs[prep.b[j]]);
      cost[i * n + nb + i] = diagonal_cost(a.pairs[prep.a[i]]);
    }
    for (Index j = 0; j < nb; ++j) {
      cost[(na + j) * n + j] = diagonal_cost(b.pairs[prep.b[j]]);
      for (Index i = 0; i < na; ++i) cost[(na + j) * n + nb + i] = 0.0;
    }
  }

  Index size() const { return na + nb; }
  double at(Index r, Index c) const { return cost[r * size() + c]; }

  // Translates a row -> column assignment into diagram indices.
  Matching to_matching(const std::vector<Index>& row_to_col, const Prepared& prep) const {
    Matching m;
    for (Index r = 0; r < size(); ++r) {
      const Index c = row_to_col[r];
      const bool row_point = r < na;
      const bool col_point = c < nb;
      if (!row_point && !col_point) continue;
      Assignment as;
      as.a = row_point ? prep.a[r] : kDiagonal;
      as.b = col_point ? prep.b[c] : kDiagonal;
      as.cost = at(r, c);
      m.assignments.push_back(as);
    }
    sort_assignments(m);
    return m;
  }
};

}  // namespace

double point_cost(const PersistencePair& x, const PersistencePair& y) {
  return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

double diagonal_cost(const PersistencePair& x) { return 0.5 * (x.death - x.birth); }

double matching_value(const Matching& matching, double p) {
  if (p == kBottleneckP) {
    double worst = 0.0;
    for (const auto& as : matching.assignments) worst = std::max(worst, as.cost);
    return worst;
  }
  double total = 0.0;
  for (const auto& as : matching.assignments) total += powered(as.cost, p);
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

namespace {

bool common_birth(const PersistenceDiagram& a, const PersistenceDiagram& b, const Prepared& prep) {
  std::optional<double> birth;
  auto same = [&](const PersistencePair& x) {
    if (!birth) birth = x.birth;
    return x.birth == *birth;
  };
  for (Index i : prep.a) if (!same(a.pairs[i])) return false;
  for (Index j : prep.b) if (!same(b.pairs[j])) return false;
  return true;
}

// When every birth coincides the points lie on a line and the cost |d - d'|^p
// is convex, so some optimal matching pairs points monotonically in death
// order, with the rest sent to the diagonal. An edit-distance style table
// finds it in O(|A| |B|).
MetricResult line_wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b,
                              Prepared prep, double p) {
  auto by_death = [](const PersistenceDiagram& d) {
    return [&d](Index x, Index y) {
      return std::tie(d.pairs[x].death, x) < std::tie(d.pairs[y].death, y);
    };
  };
  std::sort(prep.a.begin(), prep.a.end(), by_death(a));
  std::sort(prep.b.begin(), prep.b.end(), by_death(b));
  const Index na = prep.a.size();
  const Index nb = prep.b.size();
  const Index w = nb + 1;
  std::vector<double> table((na + 1) * w, 0.0);
  auto at = [&](Index i, Index j) -> double& { return table[i * w + j]; };
  auto diag_a = [&](Index i) { return powered(diagonal_cost(a.pairs[prep.a[i]]), p); };
  auto diag_b = [&](Index j) { return powered(diagonal_cost(b.pairs[prep.b[j]]), p); };
  auto pair_ab = [&](Index i, Index j) {
    return powered(point_cost(a.pairs[prep.a[i]], b.pairs[prep.b[j]]), p);
  };
  for (Index i = 1; i <= na; ++i) at(i, 0) = at(i - 1, 0) + diag_a(i - 1);
  for (Index j = 1; j <= nb; ++j) at(0, j) = at(0, j - 1) + diag_b(j - 1);
  for (Index i = 1; i <= na; ++i) {
    for (Index j = 1; j <= nb; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + pair_ab(i - 1, j - 1), at(i - 1, j) + diag_a(i - 1),
                           at(i, j - 1) + diag_b(j - 1)});
    }
  }

  MetricResult result;
  Matching& m = result.matching;
  for (Index i = na, j = nb; i > 0 || j > 0;) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + pair_ab(i - 1, j - 1)) {
      m.assignments.push_back({prep.a[i - 1], prep.b[j - 1],
                               point_cost(a.pairs[prep.a[i - 1]], b.pairs[prep.b[j - 1]])});
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + diag_a(i - 1)) {
      m.assignments.push_back({prep.a[i - 1], kDiagonal, diagonal_cost(a.pairs[prep.a[i - 1]])});
      --i;
    } else {
      m.assignments.push_back({kDiagonal, prep.b[j - 1], diagonal_cost(b.pairs[prep.b[j - 1]])});
      --j;
    }
  }
  sort_assignments(m);
  m.cost = matching_value(m, p);
  result.value = m.cost;
  return result;
}

}  // namespace

MetricResult wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                         CapPolicy policy) {
  require(p >= 1.0 && std::isfinite(p), "p >= 1", "Wasserstein degree p must be finite and >= 1");
  const Prepared prep = prepare(a, b, policy);
  if (!prep.comparable) return incomparable();
  if (common_birth(a, b, prep)) return line_wasserstein(a, b, prep, p);
  return wasserstein_hungarian(a, b, p, policy);
}

MetricResult wasserstein_hungarian(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   double p, CapPolicy policy) {
  require(p >= 1.0 && std::isfinite(p), "p >= 1", "Wasserstein degree p must be finite and >= 1");
  const Prepared prep = prepare(a, b, policy);
  if (!prep.comparable) return incomparable();

  const Index na = prep.a.size();
  const Index nb = prep.b.size();
  const Index n = na + nb;
  MetricResult result;
  if (n == 0) return result;

  // Any diagonal copy is interchangeable, so every diagonal cell carries the
  // point's own diagonal cost; this keeps the matrix finite.
  std::vector<double> cost(n * n, 0.0);
  for (Index i = 0; i < na; ++i) {
    const auto& x = a.pairs[prep.a[i]];
    for (Index j = 0; j < nb; ++j) cost[i * n + j] = powered(point_cost(x, b.pairs[prep.b[j]]), p);
    const double to_diag = powered(diagonal_cost(x), p);
    for (Index c = nb; c < n; ++c) cost[i * n + c] = to_diag;
  }
  for (Index j = 0; j < nb; ++j) {
    const double to_diag = powered(diagonal_cost(b.pairs[prep.b[j]]), p);
    for (Index r = na; r < n; ++r) cost[r * n + j] = to_diag;
  }

  const std::vector<Index> row_to_col = hungarian(cost, n);
  Matching& m = result.matching;
  for (Index r = 0; r < n; ++r) {
    const Index c = row_to_col[r];
    const bool row_point = r < na;
    const bool col_point = c < nb;
    if (!row_point && !col_point) continue;
    Assignment as;
    as.a = row_point ? prep.a[r] : kDiagonal;
    as.b = col_point ? prep.b[c] : kDiagonal;
    if (row_point && col_point) {
      as.cost = point_cost(a.pairs[as.a], b.pairs[as.b]);
    } else {
      as.cost = row_point ? diagonal_cost(a.pairs[as.a]) : diagonal_cost(b.pairs[as.b]);
    }
    m.assignments.push_back(as);
  }
  sort_assignments(m);
  m.cost = matching_value(m, p);
  result.value = m.cost;
  return result;
}

MetricResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                        CapPolicy policy) {
  const Prepared prep = prepare(a, b, policy);
  if (!prep.comparable) return incomparable();
  const AugmentedCosts costs(a, b, prep);
  const Index n = costs.size();
  MetricResult result;
  if (n == 0) return result;

  std::vector<double> candidates;
  for (double c : costs.cost) {
    if (c != kInf) candidates.push_back(c);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<std::vector<Index>> adj(n);
  auto feasible = [&](double eps, std::vector<Index>* assignment) {
    for (Index r = 0; r < n; ++r) {
      adj[r].clear();
      for (Index c = 0; c < n; ++c) {
        if (costs.at(r, c) <= eps) adj[r].push_back(c);
      }
    }
    BipartiteMatcher matcher(adj, n);
    const bool perfect = matcher.run() == n;
    if (perfect && assignment) *assignment = matcher.left_matches();
    return perfect;
  };

  std::size_t lo = 0, hi = candidates.size() - 1;  // the largest is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid], nullptr)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::vector<Index> row_to_col;
  feasible(candidates[lo], &row_to_col);
  result.matching = costs.to_matching(row_to_col, prep);
  result.matching.cost = matching_value(result.matching, kBottleneckP);
  result.value = result.matching.cost;
  return result;
}

MetricResult brute_force_match(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                               CapPolicy policy) {
  require(p >= 1.0, "p >= 1", "matching degree p must be >= 1");
  const Prepared prep = prepare(a, b, policy);
  if (!prep.comparable) return incomparable();
  const AugmentedCosts costs(a, b, prep);
  const Index n = costs.size();
  require(n <= kBruteForceMatchLimit, "|A| + |B| <= 8",
          "brute_force_match is limited to 8 finite points in total");
  MetricResult result;
  if (n == 0) return result;

  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  double best = kInf;
  std::vector<Index> best_perm;
  do {
    double total = 0.0;
    bool valid = true;
    for (Index r = 0; r < n && valid; ++r) {
      const double c = costs.at(r, perm[r]);
      if (c == kInf) {
        valid = false;
      } else if (p == kBottleneckP) {
        total = std::max(total, c);
      } else {
        total += powered(c, p);
      }
    }
    if (valid && total < best) {
      best = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  result.matching = costs.to_matching(best_perm, prep);
  result.matching.cost = matching_value(result.matching, p);
  result.value = result.matching.cost;
  return result;
}

}  // namespace skelmap
