#include "skelmap/persistence.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "skelmap/error.h"

namespace skelmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SimplexId = std::uint64_t;

// Combinatorial number system: simplex {v_k > ... > v_0} maps to
// sum_i C(v_i, i + 1), which is unique per dimension.
SimplexId binom(SimplexId n, SimplexId k) {
  if (k > n) return 0;
  switch (k) {
    case 0: return 1;
    case 1: return n;
    case 2: return n * (n - 1) / 2;
    case 3: return n * (n - 1) * (n - 2) / 6;
    default: break;
  }
  SimplexId r = 1;
  for (SimplexId i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SimplexId edge_id(Index a, Index b) {
  if (a < b) std::swap(a, b);
  return binom(a, 2) + b;
}

SimplexId triangle_id(Index a, Index b, Index c) {
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  return binom(a, 3) + binom(b, 2) + c;
}

struct FiltrationEdge {
  double diam;
  SimplexId id;
  Index a;
  Index b;
};

bool edge_before(const FiltrationEdge& x, const FiltrationEdge& y) {
  return x.diam != y.diam ? x.diam < y.diam : x.id < y.id;
}

struct Entry {
  double diam;
  SimplexId id;
};

inline bool entry_less(const Entry& x, const Entry& y) {
  return x.diam != y.diam ? x.diam < y.diam : x.id < y.id;
}

// Min-heap ordering for std::push_heap / pop_heap. A functor so the heap
// algorithms can inline it.
struct EntryGreater {
  bool operator()(const Entry& x, const Entry& y) const { return entry_less(y, x); }
};
constexpr EntryGreater entry_greater{};

void validate(const DistanceMatrix& dist, const char* operation) {
  require(dist.square(), "square distance matrix",
          std::string(operation) + ": distance matrix must be square");
  require(dist.rows() >= 1, "n >= 1", std::string(operation) + ": need at least one point");
  dist.require_reachable(operation);
  const Index n = dist.rows();
  for (Index i = 0; i < n; ++i) {
    require(dist(i, i) == 0.0, "zero diagonal",
            std::string(operation) + ": distance matrix diagonal must be zero");
    for (Index j = i + 1; j < n; ++j) {
      const double a = dist(i, j);
      const double b = dist(j, i);
      require(std::isfinite(a) && a >= 0.0, "nonnegative finite distances",
              std::string(operation) + ": distances must be finite and nonnegative");
      require(a == b, "symmetric distance matrix",
              std::string(operation) + ": distance matrix is not symmetric");
    }
  }
}

double resolve_cap(const DistanceMatrix& dist, std::optional<double> cap) {
  if (!cap) return enclosing_radius(dist);
  require(std::isfinite(*cap) && *cap > 0.0, "scale_cap > 0",
          "scale cap must be a positive finite value");
  return *cap;
}

void finish(PersistenceDiagram& diagram) {
  std::sort(diagram.pairs.begin(), diagram.pairs.end());
}

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), Index{0}); }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Links the larger root under the smaller one; false if already joined.
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<Index> parent_;
};

// Pops the minimal entry that survives Z/2 cancellation, leaving it on top.
std::optional<Entry> pivot_of(std::vector<Entry>& heap) {
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), entry_greater);
    const Entry top = heap.back();
    heap.pop_back();
    if (!heap.empty() && heap.front().id == top.id) {
      std::pop_heap(heap.begin(), heap.end(), entry_greater);
      heap.pop_back();
      continue;
    }
    heap.push_back(top);
    std::push_heap(heap.begin(), heap.end(), entry_greater);
    return top;
  }
  return std::nullopt;
}

}  // namespace

Index PersistenceDiagram::infinite_count() const {
  return static_cast<Index>(std::count_if(pairs.begin(), pairs.end(),
                                          [](const PersistencePair& p) { return p.infinite(); }));
}

double enclosing_radius(const DistanceMatrix& dist) {
  double best = kInf;
  for (Index i = 0; i < dist.rows(); ++i) {
    double row_max = 0.0;
    for (Index j = 0; j < dist.cols(); ++j) row_max = std::max(row_max, dist(i, j));
    best = std::min(best, row_max);
  }
  return best;
}

std::vector<PersistenceDiagram> vr_persistence(const DistanceMatrix& dist, int max_dim,
                                               std::optional<double> scale_cap) {
  require(max_dim == 0 || max_dim == 1, "max_dim in {0, 1}", "max_dim must be 0 or 1");
  validate(dist, "vr_persistence");
  const double cap = resolve_cap(dist, scale_cap);
  const Index n = dist.rows();

  std::vector<FiltrationEdge> edges;
  for (Index a = 1; a < n; ++a) {
    for (Index b = 0; b < a; ++b) {
      const double d = dist(a, b);
      if (d <= cap) edges.push_back({d, edge_id(a, b), a, b});
    }
  }
  std::sort(edges.begin(), edges.end(), edge_before);

  std::vector<PersistenceDiagram> out;
  PersistenceDiagram pd0{0, cap, {}};
  std::vector<std::uint8_t> tree(edges.size(), 0);
  {
    UnionFind uf(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!uf.unite(edges[e].a, edges[e].b)) continue;
      tree[e] = 1;
      if (edges[e].diam > 0.0) pd0.pairs.push_back({0.0, edges[e].diam});
    }
    for (Index v = 0; v < n; ++v) {
      if (uf.find(v) == v) pd0.pairs.push_back({0.0, kInf});
    }
  }
  finish(pd0);
  out.push_back(std::move(pd0));
  if (max_dim < 1) return out;

  PersistenceDiagram pd1{1, cap, {}};

  // Appends the coboundary entries of e that are not below `floor`.
  auto coboundary = [&](const FiltrationEdge& e, std::vector<Entry>& column, Entry floor) {
    for (Index k = 0; k < n; ++k) {
      if (k == e.a || k == e.b) continue;
      const double d = std::max({e.diam, dist(e.a, k), dist(e.b, k)});
      if (d > cap || d < floor.diam) continue;
      const Entry entry{d, triangle_id(e.a, e.b, k)};
      if (!entry_less(entry, floor)) column.push_back(entry);
    }
  };

  // pivot triangle -> edges whose coboundaries sum to the reduced column
  std::unordered_map<SimplexId, std::vector<std::size_t>> reduced;
  std::vector<Entry> work;
  for (std::size_t pos = edges.size(); pos-- > 0;) {
    if (tree[pos]) continue;  // cleared: paired in dimension 0
    const FiltrationEdge& edge = edges[pos];
    // An unreduced column whose pivot is unclaimed is already reduced; find
    // its pivot with a scan and skip the heap.
    std::optional<Entry> lowest;
    for (Index k = 0; k < n; ++k) {
      if (k == edge.a || k == edge.b) continue;
      const double d = std::max({edge.diam, dist(edge.a, k), dist(edge.b, k)});
      if (d > cap || (lowest && d > lowest->diam)) continue;
      const Entry entry{d, triangle_id(edge.a, edge.b, k)};
      if (!lowest || entry_less(entry, *lowest)) lowest = entry;
    }
    if (!lowest) {
      pd1.pairs.push_back({edge.diam, kInf});
      continue;
    }
    if (!reduced.contains(lowest->id)) {
      if (lowest->diam > edge.diam) pd1.pairs.push_back({edge.diam, lowest->diam});
      reduced.emplace(lowest->id, std::vector<std::size_t>{pos});
      continue;
    }

    work.clear();
    coboundary(edge, work, *lowest);
    std::make_heap(work.begin(), work.end(), entry_greater);
    std::vector<std::size_t> combination{pos};
    std::optional<Entry> pivot = pivot_of(work);
    while (pivot) {
      auto it = reduced.find(pivot->id);
      if (it == reduced.end()) break;
      // Entries of the added column below its pivot cancel among themselves.
      for (std::size_t other : it->second) {
        combination.push_back(other);
        const std::size_t before = work.size();
        coboundary(edges[other], work, *pivot);
        for (std::size_t i = before; i < work.size(); ++i) {
          std::push_heap(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(i + 1),
                         entry_greater);
        }
      }
      pivot = pivot_of(work);
    }

    if (!pivot) {
      pd1.pairs.push_back({edge.diam, kInf});
      continue;
    }
    if (pivot->diam > edge.diam) pd1.pairs.push_back({edge.diam, pivot->diam});
    // Keep only edges with odd multiplicity.
    std::sort(combination.begin(), combination.end());
    std::vector<std::size_t> odd;
    for (std::size_t i = 0; i < combination.size();) {
      std::size_t j = i;
      while (j < combination.size() && combination[j] == combination[i]) ++j;
      if ((j - i) % 2 == 1) odd.push_back(combination[i]);
      i = j;
    }
    reduced.emplace(pivot->id, std::move(odd));
  }
  finish(pd1);
  out.push_back(std::move(pd1));
  return out;
}

std::vector<PersistenceDiagram> brute_force_persistence(const DistanceMatrix& dist,
                                                        int max_dim,
                                                        std::optional<double> scale_cap) {
  require(max_dim == 0 || max_dim == 1, "max_dim in {0, 1}", "max_dim must be 0 or 1");
  validate(dist, "brute_force_persistence");
  const Index n = dist.rows();
  require(n <= kBruteForcePersistenceLimit, "n <= 25",
          "brute_force_persistence is limited to " +
              std::to_string(kBruteForcePersistenceLimit) + " points");
  const double cap = resolve_cap(dist, scale_cap);

  struct Simplex {
    int dim;
    double diam;
    std::vector<Index> vertices;  // ascending
  };
  std::vector<Simplex> simplices;
  for (Index a = 0; a < n; ++a) simplices.push_back({0, 0.0, {a}});
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      if (dist(a, b) <= cap) simplices.push_back({1, dist(a, b), {a, b}});
      if (max_dim < 1) continue;
      for (Index c = b + 1; c < n; ++c) {
        const double d = std::max({dist(a, b), dist(a, c), dist(b, c)});
        if (d <= cap) simplices.push_back({2, d, {a, b, c}});
      }
    }
  }
  // Faces never come after their cofaces: diameter first, then dimension.
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& x, const Simplex& y) {
    if (x.diam != y.diam) return x.diam < y.diam;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.vertices < y.vertices;
  });

  std::vector<std::vector<std::size_t>> columns(simplices.size());
  {
    std::vector<std::pair<std::vector<Index>, std::size_t>> lookup;
    for (std::size_t i = 0; i < simplices.size(); ++i) lookup.emplace_back(simplices[i].vertices, i);
    std::sort(lookup.begin(), lookup.end());
    auto position = [&](const std::vector<Index>& verts) {
      auto it = std::lower_bound(lookup.begin(), lookup.end(),
                                 std::pair<std::vector<Index>, std::size_t>{verts, 0});
      return it->second;
    };
    for (std::size_t j = 0; j < simplices.size(); ++j) {
      const auto& verts = simplices[j].vertices;
      if (verts.size() < 2) continue;
      for (std::size_t drop = 0; drop < verts.size(); ++drop) {
        std::vector<Index> face;
        for (std::size_t k = 0; k < verts.size(); ++k) {
          if (k != drop) face.push_back(verts[k]);
        }
        columns[j].push_back(position(face));
      }
      std::sort(columns[j].begin(), columns[j].end());
    }
  }

  // Plain left-to-right reduction over Z/2.
  std::vector<std::ptrdiff_t> owner(simplices.size(), -1);  // low row -> column
  std::vector<std::uint8_t> paired(simplices.size(), 0);
  std::vector<PersistenceDiagram> out;
  for (int d = 0; d <= max_dim; ++d) out.push_back({d, cap, {}});
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto& col = columns[j];
    while (!col.empty() && owner[col.back()] >= 0) {
      const auto& other = columns[static_cast<std::size_t>(owner[col.back()])];
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(sum));
      col.swap(sum);
    }
    if (col.empty()) continue;
    const std::size_t low = col.back();
    owner[low] = static_cast<std::ptrdiff_t>(j);
    paired[low] = paired[j] = 1;
    const int dim = simplices[low].dim;
    if (dim <= max_dim && simplices[j].diam > simplices[low].diam) {
      out[static_cast<std::size_t>(dim)].pairs.push_back({simplices[low].diam, simplices[j].diam});
    }
  }
  for (std::size_t i = 0; i < simplices.size(); ++i) {
    if (!paired[i] && simplices[i].dim <= max_dim) {
      out[static_cast<std::size_t>(simplices[i].dim)].pairs.push_back({simplices[i].diam, kInf});
    }
  }
  for (auto& pd : out) finish(pd);
  return out;
}

BettiSummary persistent_betti(const PersistenceDiagram& diagram,
                              std::optional<double> threshold) {
  BettiSummary s;
  s.dim = diagram.dim;
  std::vector<double> finite;
  Index infinite = 0;
  for (const auto& p : diagram.pairs) {
    if (p.infinite()) {
      ++infinite;
    } else {
      finite.push_back(p.persistence());
    }
  }

  if (threshold) {
    s.threshold = *threshold;
    s.count = infinite + static_cast<Index>(std::count_if(
                             finite.begin(), finite.end(),
                             [&](double v) { return v > *threshold; }));
    return s;
  }

  s.count = infinite;
  if (finite.empty()) return s;
  std::sort(finite.begin(), finite.end(), std::greater<>());
  finite.push_back(0.0);
  double widest = -1.0;
  double runner_up = 0.0;
  std::size_t cut = 0;
  for (std::size_t i = 0; i + 1 < finite.size(); ++i) {
    const double gap = finite[i] - finite[i + 1];
    if (gap > widest) {  // strict: ties keep the fewer-features cut
      runner_up = std::max(runner_up, widest);
      widest = gap;
      cut = i;
    } else {
      runner_up = std::max(runner_up, gap);
    }
  }
  s.count += cut + 1;
  s.gap_width = widest;
  s.threshold = 0.5 * (finite[cut] + finite[cut + 1]);
  s.ambiguous = finite.size() > 2 && widest < kCleanGapRatio * runner_up;
  return s;
}

}  // namespace skelmap
