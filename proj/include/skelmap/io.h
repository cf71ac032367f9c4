#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skelmap/embedding.h"
#include "skelmap/geometry.h"
#include "skelmap/persistence.h"
#include "skelmap/quality.h"
#include "skelmap/skeleton.h"
#include "skelmap/tearing.h"

namespace skelmap {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// One row per point, comma-separated. A first row that does not parse as
// numbers is taken as a header. Rows must all have the same width.
Matrix parse_csv_matrix(const std::string& text);
std::string format_csv_matrix(const Matrix& values, const std::vector<std::string>& header = {});

PointCloud read_point_cloud(const std::string& path);
void write_point_cloud(const std::string& path, const PointCloud& cloud);

// A signal is the first column of a CSV file.
std::vector<double> read_signal(const std::string& path);

// JSON is written with sorted keys and two-space indentation.
std::string dump_json(const nlohmann::json& value);
nlohmann::json parse_json(const std::string& text);

nlohmann::json to_json(const PersistenceDiagram& diagram);
PersistenceDiagram diagram_from_json(const nlohmann::json& value);

nlohmann::json to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const nlohmann::json& value);

nlohmann::json embedding_sidecar(const Embedding& embedding);
nlohmann::json to_json(const Embedding& embedding);  // sidecar plus coords
// Accepts either form; coords may instead be supplied by the caller.
Embedding embedding_from_json(const nlohmann::json& value, std::optional<Matrix> coords = {});

// Sidecar path for an embedding CSV: the same path with a .json extension.
std::string sidecar_path(const std::string& csv_path);
void write_embedding(const std::string& csv_path, const Embedding& embedding);
// Reads the CSV and its sidecar. Without a sidecar the embedding is treated
// as plain coordinates (method mds, no landmarks).
Embedding read_embedding(const std::string& csv_path);

nlohmann::json to_json(const CutSpec& cut);
nlohmann::json to_json(const TearResult& result);
nlohmann::json to_json(const std::vector<RankedCut>& ranked);

nlohmann::json to_json(const ProjectionSearchResult& result, RankMetric metric);

}  // namespace skelmap
