#include "skelmap/pipeline.h"

#include <set>

#include "skelmap/error.h"

namespace skelmap {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const char* what) {
  if (j.is_null()) return;
  if (!j.is_object()) fail(ErrorKind::kFormat, std::string(what) + " object", std::string(what) + " parameters must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(ErrorKind::kParameter, "known parameter", "unknown " + std::string(what) + " parameter '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.is_null() || !j.contains(key) || j[key].is_null()) return;
  try {
    out = j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kParameter, std::string("valid ") + key, std::string("parameter '") + key + "' has the wrong type");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (j.is_null() || !j.contains(key) || j[key].is_null()) return;
  if (j[key].is_string() && j[key] == "auto") return;
  T value{};
  read(j, key, value);
  out = value;
}

}  // namespace

SkeletonParams skeleton_params_from_json(const nlohmann::json& j) {
  check_keys(j, {"k", "filter", "base", "base_point", "n", "p", "eps", "minpts", "eps_scale"}, "skeleton");
  SkeletonParams p;
  read(j, "k", p.k);
  std::string base = to_string(p.base);
  read(j, "base", base);
  p.base = parse_base_strategy(base);
  if (!j.is_null() && j.contains("filter") && j["filter"] != "dtb") {
    fail(ErrorKind::kParameter, "filter = dtb", "the only supported filter is 'dtb'");
  }
  read(j, "base_point", p.base_point);
  read(j, "n", p.intervals);
  read(j, "p", p.overlap);
  read(j, "eps", p.eps);
  read(j, "minpts", p.minpts);
  read(j, "eps_scale", p.eps_scale);
  return p;
}

nlohmann::json to_json(const SkeletonParams& p) {
  return {{"k", p.k},
          {"filter", "dtb"},
          {"base", to_string(p.base)},
          {"base_point", p.base_point ? nlohmann::json(*p.base_point) : nlohmann::json(nullptr)},
          {"n", p.intervals},
          {"p", p.overlap},
          {"eps", p.eps ? nlohmann::json(*p.eps) : nlohmann::json("auto")},
          {"minpts", p.minpts},
          {"eps_scale", p.eps_scale}};
}

Skeleton compute_skeleton(const PointCloud& cloud, const NeighborhoodGraph& graph,
                          const SkeletonParams& params) {
  require(params.eps_scale > 0.0, "eps_scale > 0", "eps_scale must be positive");
  const FilterValues filter = compute_filter(cloud, graph, params.base, params.base_point);
  const CoverSpec cover = build_cover(filter, params.intervals, params.overlap);
  DbscanParams db;
  db.eps = params.eps;
  db.minpts = params.minpts;
  db.auto_scale = params.eps_scale;
  return mapper_skeleton(cloud, filter, cover, db);
}

EmbedParams embed_params_from_json(const nlohmann::json& j) {
  check_keys(j, {"method", "k", "d", "landmarks", "pca", "skeleton"}, "embed");
  EmbedParams p;
  std::string method = to_string(p.method);
  read(j, "method", method);
  p.method = parse_embedding_method(method);
  require(p.method == EmbeddingMethod::kIsomap || p.method == EmbeddingMethod::kLIsomapRandom ||
              p.method == EmbeddingMethod::kLIsomapHomology,
          "method in {isomap, l-isomap-random, l-isomap-homology}",
          "unsupported embedding method '" + method + "'");
  read(j, "k", p.k);
  read(j, "d", p.d);
  read(j, "landmarks", p.landmarks);
  read(j, "pca", p.pca);
  return p;
}

nlohmann::json to_json(const EmbedParams& p) {
  return {{"method", to_string(p.method)},
          {"k", p.k},
          {"d", p.d},
          {"landmarks", p.landmarks ? nlohmann::json(*p.landmarks) : nlohmann::json("auto")},
          {"pca", p.pca}};
}

Embedding compute_embedding(const PointCloud& cloud, const NeighborhoodGraph& graph,
                            const EmbedParams& params, const Skeleton* skeleton,
                            std::uint64_t seed) {
  LIsomapOptions opts;
  opts.pca_normalize = params.pca;
  opts.method = params.method;
  switch (params.method) {
    case EmbeddingMethod::kIsomap:
      return isomap(graph, params.d);
    case EmbeddingMethod::kLIsomapRandom: {
      const Index count = params.landmarks.value_or(auto_landmark_count(cloud.size()));
      return l_isomap(graph, random_landmarks(cloud.size(), count, derive_seed(seed, "landmarks")),
                      params.d, opts);
    }
    case EmbeddingMethod::kLIsomapHomology:
      require(skeleton != nullptr, "skeleton available", "l-isomap-homology needs a skeleton");
      return l_isomap(graph, extract_landmarks(*skeleton), params.d, opts);
    default:
      fail(ErrorKind::kParameter, "graph embedding method", "method is not a graph embedding");
  }
}

std::uint64_t generator_seed(std::uint64_t seed) { return derive_seed(seed, "generate"); }

std::string json_digest(const nlohmann::json& value) {
  // FNV-1a over the compact dump; nlohmann orders object keys.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : value.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

}  // namespace skelmap
