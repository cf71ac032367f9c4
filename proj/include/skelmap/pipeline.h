#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "skelmap/embedding.h"
#include "skelmap/geometry.h"
#include "skelmap/quality.h"
#include "skelmap/skeleton.h"
#include "skelmap/tearing.h"

// Parameter bundles shared by the command line and the HTTP service, so both
// front ends resolve defaults and seeds the same way.
namespace skelmap {

inline constexpr int kDefaultK = 10;

struct SkeletonParams {
  int k = kDefaultK;
  BaseStrategy base = BaseStrategy::kExtreme;
  std::optional<Index> base_point;
  Index intervals = kDefaultIntervals;
  double overlap = kDefaultOverlap;
  std::optional<double> eps;
  Index minpts = kDefaultMinPts;
  double eps_scale = 2.0;
};

// Unknown keys are rejected; missing keys keep their defaults.
SkeletonParams skeleton_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SkeletonParams& params);

Skeleton compute_skeleton(const PointCloud& cloud, const NeighborhoodGraph& graph,
                          const SkeletonParams& params);

struct EmbedParams {
  EmbeddingMethod method = EmbeddingMethod::kIsomap;
  int k = kDefaultK;
  int d = 2;
  std::optional<Index> landmarks;  // random landmark count; default ceil(sqrt N)
  bool pca = true;
};

EmbedParams embed_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EmbedParams& params);

// `skeleton` is required for l-isomap-homology and ignored otherwise. Random
// landmarks are drawn from derive_seed(seed, "landmarks").
Embedding compute_embedding(const PointCloud& cloud, const NeighborhoodGraph& graph,
                            const EmbedParams& params, const Skeleton* skeleton,
                            std::uint64_t seed);

std::uint64_t generator_seed(std::uint64_t seed);

// Stable 16-hex-digit digest of a canonical JSON value.
std::string json_digest(const nlohmann::json& value);

}  // namespace skelmap
