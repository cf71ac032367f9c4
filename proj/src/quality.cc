#include "skelmap/quality.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "skelmap/diagram_metrics.h"
#include "skelmap/error.h"
#include "skelmap/parallel.h"

namespace skelmap {

namespace {

// Running co-moments, merged with the pairwise update so row partials can be
// combined in a fixed order.
struct Moments {
  double n = 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double m2x = 0.0;
  double m2y = 0.0;
  double cxy = 0.0;

  void add(double x, double y) {
    n += 1.0;
    const double dx = x - mean_x;
    mean_x += dx / n;
    const double dy = y - mean_y;
    mean_y += dy / n;
    m2x += dx * (x - mean_x);
    m2y += dy * (y - mean_y);
    cxy += dx * (y - mean_y);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    m2x += o.m2x + dx * dx * n * o.n / total;
    m2y += o.m2y + dy * dy * n * o.n / total;
    cxy += o.cxy + dx * dy * n * o.n / total;
    mean_x += dx * o.n / total;
    mean_y += dy * o.n / total;
    n = total;
  }

  double rv() const {
    if (n < 2.0 || m2x <= 0.0 || m2y <= 0.0) {
      fail(ErrorKind::kUndefined, "nonconstant distances",
           "residual variance is undefined: a distance vector has zero variance");
    }
    const double r = cxy / std::sqrt(m2x * m2y);
    return std::clamp(1.0 - r * r, 0.0, 1.0);
  }
};

Matrix rows_of(const Matrix& coords, const IndexList& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), coords.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = coords.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double residual_variance(const DistanceMatrix& dx, const DistanceMatrix& dy) {
  require(dx.square() && dy.square() && dx.rows() == dy.rows(), "same square shape",
          "residual variance needs two square matrices of equal size");
  dx.require_reachable("residual variance");
  dy.require_reachable("residual variance");
  Moments m;
  for (Index i = 0; i < dx.rows(); ++i) {
    for (Index j = i + 1; j < dx.rows(); ++j) m.add(dx(i, j), dy(i, j));
  }
  return m.rv();
}

double residual_variance(const PointCloud& cloud, const NeighborhoodGraph* graph,
                         const Matrix& coords) {
  const Index n = cloud.size();
  require(static_cast<Index>(coords.rows()) == n, "embedding rows = cloud rows",
          "embedding and cloud have different point counts");
  if (graph) {
    require(graph->vertex_count() == n, "graph matches cloud",
            "graph vertex count differs from the cloud size");
    graph->require_connected("residual variance");
  }
  std::vector<Moments> rows(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> geo;
    if (graph) geo = single_source_distances(*graph, i);
    Moments& m = rows[i];
    for (Index j = i + 1; j < n; ++j) {
      const double x = graph ? geo[j] : cloud.distance(i, j);
      const double y = (coords.row(static_cast<Eigen::Index>(i)) -
                        coords.row(static_cast<Eigen::Index>(j))).norm();
      m.add(x, y);
    }
  });
  Moments total;
  for (const auto& m : rows) total.merge(m);
  return total.rv();
}

QualityContext make_quality_context(const PointCloud& cloud, const QualityOptions& options) {
  require(options.subsample_size >= 1, "subsample_size >= 1", "subsample size must be positive");
  QualityContext ctx;
  ctx.cloud = &cloud;
  ctx.subsample = persistence_subsample(cloud, options.subsample_size,
                                        derive_seed(options.seed, "quality-subsample"));
  ctx.input_diagrams = vr_persistence(euclidean_distances(cloud.subset(ctx.subsample)), 1);
  ctx.pb1_before = persistent_betti(ctx.input_diagrams[1], options.threshold_before);
  return ctx;
}

QualityReport quality_report(const QualityContext& context, const Embedding& embedding,
                             const NeighborhoodGraph* graph, const QualityOptions& options) {
  const PointCloud& cloud = *context.cloud;
  require(embedding.size() == cloud.size(), "embedding rows = cloud rows",
          "embedding and cloud have different point counts");
  const bool geodesic = uses_geodesics(embedding.method) && graph != nullptr;
  require(!uses_geodesics(embedding.method) || graph != nullptr, "graph for geodesic method",
          "quality of a graph-based embedding needs its neighborhood graph");

  QualityReport report;
  report.rv = residual_variance(cloud, geodesic ? graph : nullptr, embedding.coords);

  const auto out = vr_persistence(euclidean_distances(rows_of(embedding.coords, context.subsample)), 1);
  report.wd1 = wasserstein(context.input_diagrams[1], out[1], 2.0, CapPolicy::kIgnore).value;
  if (options.include_wd0) {
    report.wd0 = wasserstein(context.input_diagrams[0], out[0], 2.0, CapPolicy::kIgnore).value;
  }
  const BettiSummary after = persistent_betti(out[1], options.threshold_after);
  report.pb1_before = context.pb1_before.count;
  report.pb1_after = after.count;
  report.threshold_before = context.pb1_before.threshold;
  report.threshold_after = after.threshold;
  report.subsample_size = context.subsample.size();

  if (context.pb1_before.ambiguous && !options.threshold_before) {
    report.flags.push_back("pb1_before_threshold_ambiguous");
  }
  if (after.ambiguous && !options.threshold_after) {
    report.flags.push_back("pb1_after_threshold_ambiguous");
  }
  if (report.subsample_size < cloud.size()) report.flags.push_back("persistence_subsampled");
  if (embedding.params.contains("clamped_dims") && embedding.params["clamped_dims"].get<int>() > 0) {
    report.flags.push_back("negative_eigenvalues_clamped");
  }

  report.conventions["rv"] = geodesic ? "geodesic_vs_euclidean" : "euclidean_vs_euclidean";
  report.conventions["wd"] = "euclidean_vs_euclidean";
  report.conventions["wd_p"] = 2;
  report.conventions["diagram_caps"] = "enclosing_radius_per_side";
  return report;
}

QualityReport quality_report(const PointCloud& cloud, const Embedding& embedding,
                             const NeighborhoodGraph* graph, const QualityOptions& options) {
  return quality_report(make_quality_context(cloud, options), embedding, graph, options);
}

nlohmann::json to_json(const QualityReport& r) {
  nlohmann::json j;
  j["rv"] = r.rv;
  j["wd0"] = r.wd0 ? nlohmann::json(*r.wd0) : nlohmann::json(nullptr);
  j["wd1"] = r.wd1;
  j["pb1_before"] = r.pb1_before;
  j["pb1_after"] = r.pb1_after;
  j["subsample_size"] = r.subsample_size;
  j["thresholds"] = {{"before", r.threshold_before}, {"after", r.threshold_after}};
  j["flags"] = r.flags;
  j["conventions"] = r.conventions;
  return j;
}

std::string csv_header() {
  return "label,rv,wd0,wd1,pb1_before,pb1_after,subsample_size,threshold_before,threshold_after";
}

std::string csv_row(const std::string& label, const QualityReport& r) {
  std::string row = label;
  row += ',' + number(r.rv);
  row += ',' + (r.wd0 ? number(*r.wd0) : std::string());
  row += ',' + number(r.wd1);
  row += ',' + std::to_string(r.pb1_before);
  row += ',' + std::to_string(r.pb1_after);
  row += ',' + std::to_string(r.subsample_size);
  row += ',' + number(r.threshold_before);
  row += ',' + number(r.threshold_after);
  return row;
}

}  // namespace skelmap
