#include "skelmap/io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "skelmap/error.h"

namespace skelmap {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::kFormat, std::string("field ") + key, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kFormat, std::string("field ") + key, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "readable input file", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "writable output file", "cannot write '" + path + "'");
  out << contents;
  if (!out) fail(ErrorKind::kIo, "writable output file", "failed writing '" + path + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Matrix parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& cell : split(line, ',')) {
      double v = 0.0;
      if (!parse_number(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      fail(ErrorKind::kFormat, "numeric CSV rows",
           "line " + std::to_string(line_no) + " is not a row of numbers");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorKind::kFormat, "rectangular CSV",
           "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
               " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::kFormat, "nonempty CSV", "CSV contains no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string format_csv_matrix(const Matrix& values, const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += '\n';
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  return out;
}

PointCloud read_point_cloud(const std::string& path) {
  try {
    return PointCloud(parse_csv_matrix(read_text_file(path)));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParameter) throw Error(ErrorKind::kFormat, e.precondition(), e.what());
    throw;
  }
}

void write_point_cloud(const std::string& path, const PointCloud& cloud) {
  write_text_file(path, format_csv_matrix(cloud.points()));
}

std::vector<double> read_signal(const std::string& path) {
  const Matrix m = parse_csv_matrix(read_text_file(path));
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, 0);
  return out;
}

std::string dump_json(const nlohmann::json& value) { return value.dump(2) + "\n"; }

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kFormat, "well-formed JSON", std::string("malformed JSON: ") + e.what());
  }
}

nlohmann::json to_json(const PersistenceDiagram& d) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : d.pairs) {
    pairs.push_back({p.birth, p.infinite() ? nlohmann::json(nullptr) : nlohmann::json(p.death)});
  }
  return {{"dim", d.dim},
          {"scale_cap", std::isfinite(d.scale_cap) ? nlohmann::json(d.scale_cap) : nlohmann::json(nullptr)},
          {"pairs", pairs}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kFormat, "diagram object", "diagram JSON must be an object");
  PersistenceDiagram d;
  d.dim = field<int>(j, "dim");
  if (j.contains("scale_cap") && !j["scale_cap"].is_null()) d.scale_cap = field<double>(j, "scale_cap");
  const auto pairs = field<nlohmann::json>(j, "pairs");
  if (!pairs.is_array()) fail(ErrorKind::kFormat, "pairs array", "diagram 'pairs' must be an array");
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !(p[1].is_number() || p[1].is_null())) {
      fail(ErrorKind::kFormat, "[birth, death] pairs", "each pair must be [birth, death|null]");
    }
    PersistencePair pair;
    pair.birth = p[0].get<double>();
    if (!p[1].is_null()) pair.death = p[1].get<double>();
    if (!(pair.birth <= pair.death) || pair.birth < 0.0) {
      fail(ErrorKind::kFormat, "0 <= birth <= death", "pair violates 0 <= birth <= death");
    }
    if (pair.birth == pair.death) continue;
    d.pairs.push_back(pair);
  }
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

nlohmann::json to_json(const Skeleton& s) {
  nlohmann::json nodes = nlohmann::json::array();
  for (Index i = 0; i < s.nodes.size(); ++i) {
    const auto& n = s.nodes[i];
    nodes.push_back({{"id", i}, {"members", n.members}, {"centroid", n.centroid}, {"interval", n.interval}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : s.edges) edges.push_back({e.u, e.v, e.shared});
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : s.cover.intervals) intervals.push_back({iv.lo, iv.hi});
  nlohmann::json out;
  out["nodes"] = nodes;
  out["edges"] = edges;
  out["filter"] = {{"kind", s.filter.name},
                   {"base", s.filter.base_point ? nlohmann::json(*s.filter.base_point) : nlohmann::json(nullptr)}};
  out["cover"] = {{"n", s.cover.n}, {"p", s.cover.p}, {"intervals", intervals}};
  out["dbscan"] = {{"eps", s.dbscan.eps ? nlohmann::json(*s.dbscan.eps) : nlohmann::json("auto")},
                   {"minpts", s.dbscan.minpts},
                   {"auto_scale", s.dbscan.auto_scale},
                   {"eps_used", s.eps_used}};
  out["landmarks"] = extract_landmarks(s);
  out["cycle_rank"] = cycle_rank(s);
  return out;
}

Skeleton skeleton_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kFormat, "skeleton object", "skeleton JSON must be an object");
  Skeleton s;
  for (const auto& n : field<nlohmann::json>(j, "nodes")) {
    SkeletonNode node;
    node.members = field<IndexList>(n, "members");
    node.centroid = field<Index>(n, "centroid");
    node.interval = field<Index>(n, "interval");
    if (node.members.empty()) fail(ErrorKind::kFormat, "nonempty node", "skeleton node has no members");
    s.nodes.push_back(std::move(node));
  }
  for (const auto& e : field<nlohmann::json>(j, "edges")) {
    if (!e.is_array() || e.size() != 3) fail(ErrorKind::kFormat, "[u, v, shared] edges", "edges must be [u, v, shared]");
    if (!e[0].is_number_unsigned() || !e[1].is_number_unsigned() || !e[2].is_number_unsigned()) {
      fail(ErrorKind::kFormat, "[u, v, shared] edges", "edge entries must be nonnegative integers");
    }
    SkeletonEdge edge{e[0].get<Index>(), e[1].get<Index>(), e[2].get<Index>()};
    if (edge.u >= s.nodes.size() || edge.v >= s.nodes.size()) {
      fail(ErrorKind::kFormat, "edge endpoints exist", "skeleton edge refers to a missing node");
    }
    s.edges.push_back(edge);
  }
  // The descriptive blocks are optional so hand-written skeletons load.
  try {
    if (j.contains("filter")) {
      const auto& f = j["filter"];
      s.filter.name = f.value("kind", std::string("dtb"));
      if (f.contains("base") && !f["base"].is_null()) s.filter.base_point = f["base"].get<Index>();
    }
    if (j.contains("cover")) {
      const auto& c = j["cover"];
      s.cover.n = c.value("n", Index{1});
      s.cover.p = c.value("p", 0.0);
      for (const auto& iv : c.value("intervals", nlohmann::json::array())) {
        s.cover.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      }
    }
    if (j.contains("dbscan")) {
      const auto& d = j["dbscan"];
      if (d.contains("eps") && d["eps"].is_number()) s.dbscan.eps = d["eps"].get<double>();
      s.dbscan.minpts = d.value("minpts", kDefaultMinPts);
      s.dbscan.auto_scale = d.value("auto_scale", s.dbscan.auto_scale);
      s.eps_used = d.value("eps_used", std::vector<double>{});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, "skeleton metadata", std::string("malformed skeleton metadata: ") + e.what());
  }
  return s;
}

nlohmann::json embedding_sidecar(const Embedding& e) {
  nlohmann::json out;
  out["method"] = to_string(e.method);
  out["n"] = e.size();
  out["d"] = e.dim();
  out["params"] = e.params;
  out["landmarks"] = e.landmarks ? nlohmann::json(*e.landmarks) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json to_json(const Embedding& e) {
  nlohmann::json out = embedding_sidecar(e);
  nlohmann::json coords = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.coords.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < e.coords.cols(); ++j) row.push_back(e.coords(i, j));
    coords.push_back(std::move(row));
  }
  out["coords"] = std::move(coords);
  return out;
}

nlohmann::json to_json(const CutSpec& c) {
  return {{"edge", {c.u, c.v}},
          {"t", c.t},
          {"radius", c.radius ? nlohmann::json(*c.radius) : nlohmann::json("auto")},
          {"global", c.global}};
}

nlohmann::json to_json(const TearResult& r) {
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& e : r.removed) removed.push_back({e.u, e.v});
  nlohmann::json out;
  out["cut"] = to_json(r.cut);
  out["cut_point"] = r.cut_point;
  out["radius"] = std::isfinite(r.radius) ? nlohmann::json(r.radius) : nlohmann::json(nullptr);
  out["removed_count"] = r.removed.size();
  out["removed_edges"] = removed;
  out["connected"] = r.connected;
  out["component_sizes"] = r.graph.component_sizes();
  out["embedding"] = r.embedding ? to_json(*r.embedding) : nlohmann::json(nullptr);
  out["quality"] = r.quality ? to_json(*r.quality) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json to_json(const std::vector<RankedCut>& ranked) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : ranked) {
    nlohmann::json row;
    row["candidate"] = r.candidate;
    row["cut"] = to_json(r.result.cut);
    row["valid"] = r.valid;
    row["removed_count"] = r.result.removed.size();
    const auto& q = r.result.quality;
    row["pb1"] = q ? nlohmann::json(q->pb1_after) : nlohmann::json(nullptr);
    row["wd1"] = q ? nlohmann::json(q->wd1) : nlohmann::json(nullptr);
    row["rv"] = q ? nlohmann::json(q->rv) : nlohmann::json(nullptr);
    if (!r.valid) row["component_sizes"] = r.result.graph.component_sizes();
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json to_json(const ProjectionSearchResult& result, RankMetric metric) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& s : result.ranked) {
    nlohmann::json row;
    row["index"] = s.index;
    row["direction"] = std::vector<double>(s.direction.vector.begin(), s.direction.vector.end());
    row["basis"] = {std::vector<double>(s.direction.basis[0].begin(), s.direction.basis[0].end()),
                    std::vector<double>(s.direction.basis[1].begin(), s.direction.basis[1].end())};
    row["score"] = s.score;
    row["wd1"] = s.wd1;
    row["wd0"] = s.wd0 ? nlohmann::json(*s.wd0) : nlohmann::json(nullptr);
    row["bottleneck1"] = s.bottleneck1 ? nlohmann::json(*s.bottleneck1) : nlohmann::json(nullptr);
    row["pb1"] = s.pb1;
    ranked.push_back(std::move(row));
  }
  return {{"metric", to_string(metric)},
          {"source_pb1", result.source_pb1},
          {"subsample_size", result.subsample.size()},
          {"ranked", ranked}};
}

}  // namespace skelmap

namespace skelmap {

Embedding embedding_from_json(const nlohmann::json& j, std::optional<Matrix> coords) {
  if (!j.is_object()) fail(ErrorKind::kFormat, "embedding object", "embedding JSON must be an object");
  Embedding e;
  try {
    e.method = parse_embedding_method(field<std::string>(j, "method"));
  } catch (const Error& err) {
    fail(ErrorKind::kFormat, "known embedding method", err.what());
  }
  if (j.contains("params")) e.params = j["params"];
  if (j.contains("landmarks") && !j["landmarks"].is_null()) e.landmarks = field<IndexList>(j, "landmarks");
  if (coords) {
    e.coords = std::move(*coords);
  } else {
    const auto rows = field<std::vector<std::vector<double>>>(j, "coords");
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    e.coords.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) fail(ErrorKind::kFormat, "rectangular coords", "embedding rows differ in width");
      for (std::size_t c = 0; c < d; ++c) {
        e.coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
  }
  if (j.contains("n") && j["n"].get<Index>() != e.size()) {
    fail(ErrorKind::kFormat, "sidecar matches coordinates", "sidecar row count differs from the coordinates");
  }
  return e;
}

std::string sidecar_path(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv_path.substr(0, dot) + ".json";
  }
  return csv_path + ".json";
}

void write_embedding(const std::string& csv_path, const Embedding& embedding) {
  std::vector<std::string> header;
  for (Index c = 0; c < embedding.dim(); ++c) header.push_back("y" + std::to_string(c));
  write_text_file(csv_path, format_csv_matrix(embedding.coords, header));
  write_text_file(sidecar_path(csv_path), dump_json(embedding_sidecar(embedding)));
}

Embedding read_embedding(const std::string& csv_path) {
  Matrix coords = parse_csv_matrix(read_text_file(csv_path));
  std::ifstream probe(sidecar_path(csv_path));
  if (!probe) {
    Embedding e;
    e.coords = std::move(coords);
    return e;
  }
  return embedding_from_json(parse_json(read_text_file(sidecar_path(csv_path))), std::move(coords));
}

}  // namespace skelmap
