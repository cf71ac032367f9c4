#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skelmap/embedding.h"
#include "skelmap/geometry.h"
#include "skelmap/persistence.h"

namespace skelmap {

// 1 - R^2, R the Pearson correlation of the strict upper triangles.
double residual_variance(const DistanceMatrix& dx, const DistanceMatrix& dy);

// Same, with D_X the graph geodesics (or Euclidean distances when `graph` is
// null) and D_Y the Euclidean distances of `coords`, accumulated row by row
// so no N x N matrix is held.
double residual_variance(const PointCloud& cloud, const NeighborhoodGraph* graph,
                         const Matrix& coords);

struct QualityOptions {
  Index subsample_size = kDefaultPersistenceLimit;
  std::uint64_t seed = 0;
  std::optional<double> threshold_before;  // explicit PB_1 thresholds
  std::optional<double> threshold_after;
  bool include_wd0 = true;
};

// Input-side quantities shared by every embedding of the same cloud.
struct QualityContext {
  const PointCloud* cloud = nullptr;
  IndexList subsample;
  std::vector<PersistenceDiagram> input_diagrams;  // dims 0 and 1
  BettiSummary pb1_before;
};

QualityContext make_quality_context(const PointCloud& cloud, const QualityOptions& options);

struct QualityReport {
  double rv = 0.0;
  std::optional<double> wd0;
  double wd1 = 0.0;
  Index pb1_before = 0;
  Index pb1_after = 0;
  Index subsample_size = 0;
  double threshold_before = 0.0;
  double threshold_after = 0.0;
  std::vector<std::string> flags;
  nlohmann::json conventions = nlohmann::json::object();
};

// RV uses geodesic-vs-Euclidean distances for graph-based methods (pass the
// graph the embedding was built from) and Euclidean-vs-Euclidean otherwise.
// Diagrams are Euclidean on both sides over the same subsample indices;
// WD is degree 2.
QualityReport quality_report(const QualityContext& context, const Embedding& embedding,
                             const NeighborhoodGraph* graph, const QualityOptions& options);
QualityReport quality_report(const PointCloud& cloud, const Embedding& embedding,
                             const NeighborhoodGraph* graph, const QualityOptions& options = {});

nlohmann::json to_json(const QualityReport& report);
std::string csv_header();
std::string csv_row(const std::string& label, const QualityReport& report);

}  // namespace skelmap
