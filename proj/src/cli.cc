#include "skelmap/cli.h"

#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "skelmap/diagram_metrics.h"
#include "skelmap/embedding.h"
#include "skelmap/error.h"
#include "skelmap/io.h"
#include "skelmap/persistence.h"
#include "skelmap/pipeline.h"
#include "skelmap/quality.h"
#include "skelmap/service.h"
#include "skelmap/skeleton.h"
#include "skelmap/tearing.h"

namespace skelmap::cli {

namespace {

using json = nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kIo;
    case ErrorKind::kFormat:
      return kFormat;
    case ErrorKind::kParameter:
      return kParameter;
    case ErrorKind::kConnectivity:
      return kConnectivity;
    case ErrorKind::kUndefined:
      return kUndefined;
  }
  return kOther;
}

// Writes to the file when a path was given, else to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

struct SkeletonFlags {
  SkeletonParams params;
  std::string base = "extreme";
  Index base_point = 0;
  double eps = 0.0;
  std::string file;  // precomputed skeleton JSON

  void add(CLI::App* app, bool allow_file) {
    app->add_option("--k", params.k, "kNN graph neighbours")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--base", base, "DTB base point strategy")
        ->capture_default_str()
        ->check(CLI::IsMember({"extreme", "barycenter", "explicit"}));
    app->add_option("--base-point", base_point, "base point index for --base explicit");
    app->add_option("--intervals", params.intervals, "cover interval count")->capture_default_str();
    app->add_option("--overlap", params.overlap, "cover overlap fraction in [0, 1)")->capture_default_str();
    app->add_option("--eps", eps, "DBSCAN radius (default: auto per interval)");
    app->add_option("--minpts", params.minpts, "DBSCAN core size, self included")->capture_default_str();
    app->add_option("--eps-scale", params.eps_scale, "multiplier on the automatic radius")->capture_default_str();
    if (allow_file) app->add_option("--skeleton", file, "precomputed skeleton JSON");
  }

  SkeletonParams resolve(const CLI::App* app) {
    params.base = parse_base_strategy(base);
    if (app->count("--base-point")) params.base_point = base_point;
    if (app->count("--eps")) params.eps = eps;
    return params;
  }
};

// Loads --skeleton when given, otherwise computes one from the flags. A
// skeleton file carries the k it was built with; --k overrides it.
Skeleton obtain_skeleton(const PointCloud& cloud, SkeletonFlags& flags, const CLI::App* app,
                         int& k, std::optional<NeighborhoodGraph>& graph) {
  SkeletonParams params = flags.resolve(app);
  if (!flags.file.empty()) {
    const json j = parse_json(read_text_file(flags.file));
    if (!app->count("--k") && j.contains("params") && j["params"].contains("k")) {
      params.k = j["params"]["k"].get<int>();
    }
    k = params.k;
    graph = build_knn_graph(cloud, k);
    return skeleton_from_json(j);
  }
  k = params.k;
  graph = build_knn_graph(cloud, k);
  return compute_skeleton(cloud, *graph, params);
}

const PersistenceDiagram& pick_diagram(const std::vector<PersistenceDiagram>& ds, int dim,
                                       const std::string& path) {
  for (const auto& d : ds) {
    if (d.dim == dim) return d;
  }
  fail(ErrorKind::kFormat, "diagram of the requested dimension",
       "'" + path + "' has no diagram of dimension " + std::to_string(dim));
}

std::vector<PersistenceDiagram> load_diagrams(const std::string& path) {
  const json j = parse_json(read_text_file(path));
  std::vector<PersistenceDiagram> out;
  if (j.is_object() && j.contains("diagrams")) {
    for (const auto& d : j["diagrams"]) out.push_back(diagram_from_json(d));
  } else if (j.is_array()) {
    for (const auto& d : j) out.push_back(diagram_from_json(d));
  } else {
    out.push_back(diagram_from_json(j));
  }
  return out;
}

json betti_json(const BettiSummary& b) {
  return {{"dim", b.dim}, {"count", b.count}, {"threshold", b.threshold},
          {"gap_width", b.gap_width}, {"ambiguous", b.ambiguous}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"skelmap: topology-preserving embeddings guided by homological skeletons"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed may follow the subcommand
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "master seed; every stage derives its own")->capture_default_str();
  std::function<void()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic shape to CSV");
  ShapeSpec shape;
  std::vector<std::string> shape_params;
  std::string gen_out;
  gen->add_option("--shape", shape.name, "shape name")->required()->check(CLI::IsMember(shape_names()));
  gen->add_option("--n", shape.n, "point count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--noise", shape.noise, "Gaussian noise standard deviation")->capture_default_str();
  gen->add_option("--param", shape_params, "shape parameter override, key=value (repeatable)");
  gen->add_option("-o,--output", gen_out, "output CSV (default stdout)");
  gen->callback([&] {
    action = [&] {
      for (const auto& kv : shape_params) {
        const auto eq = kv.find('=');
        require(eq != std::string::npos && eq > 0, "--param key=value", "malformed --param '" + kv + "'");
        try {
          shape.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
          fail(ErrorKind::kParameter, "--param key=value", "value of --param '" + kv + "' is not a number");
        }
      }
      const PointCloud cloud = generate_shape(shape, generator_seed(seed));
      emit(gen_out, format_csv_matrix(cloud.points()), out);
    };
  });

  // delay-embed
  auto* delay = app.add_subcommand("delay-embed", "sliding-window embedding of a signal CSV");
  std::string delay_in, delay_out;
  Index window = 0, step = 1;
  delay->add_option("-i,--input", delay_in, "signal CSV (first column)")->required();
  delay->add_option("--window", window, "window length")->required()->check(CLI::PositiveNumber);
  delay->add_option("--step", step, "lag between window entries")->capture_default_str()->check(CLI::PositiveNumber);
  delay->add_option("-o,--output", delay_out, "output CSV (default stdout)");
  delay->callback([&] {
    action = [&] {
      const auto signal = read_signal(delay_in);
      emit(delay_out, format_csv_matrix(delay_embedding(signal, window, step).points()), out);
    };
  });

  // skeleton
  auto* skel = app.add_subcommand("skeleton", "mapper skeleton of a cloud as JSON");
  std::string skel_in, skel_out;
  SkeletonFlags skel_flags;
  skel->add_option("-i,--input", skel_in, "cloud CSV")->required();
  skel_flags.add(skel, false);
  skel->add_option("-o,--output", skel_out, "output JSON (default stdout)");
  skel->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(skel_in);
      const SkeletonParams params = skel_flags.resolve(skel);
      const NeighborhoodGraph graph = build_knn_graph(cloud, params.k);
      json j = to_json(compute_skeleton(cloud, graph, params));
      j["params"] = to_json(params);
      emit(skel_out, dump_json(j), out);
    };
  });

  // embed
  auto* emb = app.add_subcommand("embed", "Isomap or landmark Isomap embedding");
  std::string emb_in, emb_out, emb_report;
  std::string emb_method = "isomap";
  EmbedParams emb_params;
  Index emb_landmarks = 0;
  bool no_pca = false;
  Index emb_subsample = kDefaultPersistenceLimit;
  SkeletonFlags emb_flags;
  emb->add_option("-i,--input", emb_in, "cloud CSV")->required();
  emb->add_option("--method", emb_method, "embedding method")
      ->capture_default_str()
      ->check(CLI::IsMember({"isomap", "l-isomap-random", "l-isomap-homology"}));
  emb->add_option("--d", emb_params.d, "target dimension")->capture_default_str()->check(CLI::PositiveNumber);
  emb->add_option("--landmarks", emb_landmarks, "random landmark count (default ceil(sqrt N))");
  emb->add_flag("--no-pca", no_pca, "skip the final PCA normalisation of L-Isomap");
  emb_flags.add(emb, true);
  emb->add_option("-o,--output", emb_out, "output CSV; the sidecar JSON goes next to it")->required();
  emb->add_option("--report", emb_report, "also write a quality report JSON");
  emb->add_option("--subsample", emb_subsample, "persistence subsample size for --report")->capture_default_str();
  emb->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(emb_in);
      emb_params.method = parse_embedding_method(emb_method);
      emb_params.pca = !no_pca;
      if (emb->count("--landmarks")) emb_params.landmarks = emb_landmarks;
      std::optional<NeighborhoodGraph> graph;
      std::optional<Skeleton> skeleton;
      int k = 0;
      if (emb_params.method == EmbeddingMethod::kLIsomapHomology) {
        skeleton = obtain_skeleton(cloud, emb_flags, emb, k, graph);
      } else {
        k = emb_flags.resolve(emb).k;
        graph = build_knn_graph(cloud, k);
      }
      emb_params.k = k;
      const Embedding e = compute_embedding(cloud, *graph, emb_params, skeleton ? &*skeleton : nullptr, seed);
      write_embedding(emb_out, e);
      if (!emb_report.empty()) {
        QualityOptions q;
        q.subsample_size = emb_subsample;
        q.seed = seed;
        write_text_file(emb_report, dump_json(to_json(quality_report(cloud, e, &*graph, q))));
      }
    };
  });

  // persistence
  auto* pers = app.add_subcommand("persistence", "Vietoris-Rips diagrams of a cloud or embedding CSV");
  std::string pers_in, pers_out, pers_cap = "enclosing";
  int max_dim = 1;
  Index pers_subsample = kDefaultPersistenceLimit;
  pers->add_option("-i,--input", pers_in, "points CSV")->required();
  pers->add_option("--max-dim", max_dim, "highest homology dimension")->capture_default_str()->check(CLI::Range(0, 1));
  pers->add_option("--subsample", pers_subsample, "maxmin subsample size")->capture_default_str()->check(CLI::PositiveNumber);
  pers->add_option("--cap", pers_cap, "scale cap: enclosing, none, or a number")->capture_default_str();
  pers->add_option("-o,--output", pers_out, "output JSON (default stdout)");
  pers->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(pers_in);
      const IndexList sub = persistence_subsample(cloud, pers_subsample, derive_seed(seed, "persistence-subsample"));
      std::optional<double> cap;
      if (pers_cap == "none") {
        cap = std::numeric_limits<double>::infinity();
      } else if (pers_cap != "enclosing") {
        try {
          cap = std::stod(pers_cap);
        } catch (const std::exception&) {
          fail(ErrorKind::kParameter, "--cap enclosing|none|number", "invalid --cap '" + pers_cap + "'");
        }
      }
      const auto diagrams = vr_persistence(euclidean_distances(cloud.subset(sub)), max_dim, cap);
      json ds = json::array(), bs = json::array();
      for (const auto& d : diagrams) {
        ds.push_back(to_json(d));
        bs.push_back(betti_json(persistent_betti(d)));
      }
      emit(pers_out, dump_json({{"diagrams", ds}, {"betti", bs}, {"subsample_size", sub.size()}}), out);
    };
  });

  // compare
  auto* cmp = app.add_subcommand("compare", "distance between two diagram files");
  std::string cmp_a, cmp_b, cmp_metric = "wasserstein";
  double cmp_p = 2.0;
  int cmp_dim = 1;
  bool ignore_cap = false;
  cmp->add_option("first", cmp_a, "diagram JSON")->required();
  cmp->add_option("second", cmp_b, "diagram JSON")->required();
  cmp->add_option("--metric", cmp_metric, "wasserstein or bottleneck")
      ->capture_default_str()
      ->check(CLI::IsMember({"wasserstein", "bottleneck"}));
  cmp->add_option("--p", cmp_p, "Wasserstein degree, p >= 1")->capture_default_str();
  cmp->add_option("--dim", cmp_dim, "homology dimension to compare")->capture_default_str();
  cmp->add_flag("--ignore-cap", ignore_cap, "compare diagrams computed with different scale caps");
  cmp->callback([&] {
    action = [&] {
      const auto a = load_diagrams(cmp_a);
      const auto b = load_diagrams(cmp_b);
      const auto policy = ignore_cap ? CapPolicy::kIgnore : CapPolicy::kRequireEqual;
      const auto& da = pick_diagram(a, cmp_dim, cmp_a);
      const auto& db = pick_diagram(b, cmp_dim, cmp_b);
      const MetricResult r = cmp_metric == "bottleneck" ? bottleneck(da, db, policy) : wasserstein(da, db, cmp_p, policy);
      out << format_double(r.value) << "\n";
    };
  });

  // quality
  auto* qual = app.add_subcommand("quality", "quality report of an embedding against its cloud");
  std::string qual_in, qual_emb, qual_out;
  QualityOptions qopts;
  double thr_before = 0.0, thr_after = 0.0;
  int qual_k = kDefaultK;
  qual->add_option("-i,--input", qual_in, "cloud CSV")->required();
  qual->add_option("-e,--embedding", qual_emb, "embedding CSV (sidecar JSON read if present)")->required();
  qual->add_option("--k", qual_k, "kNN graph for geodesic RV (default: the sidecar's k)");
  qual->add_option("--subsample", qopts.subsample_size, "persistence subsample size")->capture_default_str();
  qual->add_option("--threshold-before", thr_before, "explicit PB_1 threshold for the input");
  qual->add_option("--threshold-after", thr_after, "explicit PB_1 threshold for the embedding");
  qual->add_flag("!--no-wd0", qopts.include_wd0, "skip the dimension-0 Wasserstein distance");
  qual->add_option("-o,--output", qual_out, "output JSON (default stdout)");
  qual->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(qual_in);
      const Embedding e = read_embedding(qual_emb);
      qopts.seed = seed;
      if (qual->count("--threshold-before")) qopts.threshold_before = thr_before;
      if (qual->count("--threshold-after")) qopts.threshold_after = thr_after;
      std::optional<NeighborhoodGraph> graph;
      if (uses_geodesics(e.method)) {
        int k = qual_k;
        if (!qual->count("--k") && e.params.contains("k")) k = e.params["k"].get<int>();
        graph = build_knn_graph(cloud, k);
      }
      emit(qual_out, dump_json(to_json(quality_report(cloud, e, graph ? &*graph : nullptr, qopts))), out);
    };
  });

  // tear
  auto* tear = app.add_subcommand("tear", "tear the graph at one skeleton edge and re-embed");
  std::string tear_in, tear_out, tear_emb_out;
  SkeletonFlags tear_flags;
  std::vector<Index> tear_edge;
  CutSpec cut;
  double tear_radius = 0.0;
  int tear_d = 2;
  Index tear_subsample = kDefaultPersistenceLimit;
  tear->add_option("-i,--input", tear_in, "cloud CSV")->required();
  tear_flags.add(tear, true);
  tear->add_option("--edge", tear_edge, "skeleton edge u,v")->required()->expected(2)->delimiter(',');
  tear->add_option("--t", cut.t, "cut position along the edge, 0..1")->capture_default_str();
  tear->add_option("--radius", tear_radius, "locality radius (default: farthest member of u or v)");
  tear->add_flag("--global", cut.global, "cut every crossing edge regardless of distance");
  tear->add_option("--d", tear_d, "embedding dimension")->capture_default_str();
  tear->add_option("--subsample", tear_subsample, "persistence subsample size")->capture_default_str();
  tear->add_option("--embedding-output", tear_emb_out, "also write the torn embedding CSV");
  tear->add_option("-o,--output", tear_out, "output JSON (default stdout)");
  tear->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(tear_in);
      std::optional<NeighborhoodGraph> graph;
      int k = 0;
      const Skeleton skeleton = obtain_skeleton(cloud, tear_flags, tear, k, graph);
      cut.u = tear_edge[0];
      cut.v = tear_edge[1];
      if (tear->count("--radius")) cut.radius = tear_radius;
      TearResult r = tear_graph(cloud, *graph, skeleton, cut);
      if (r.connected) {
        QualityOptions q;
        q.subsample_size = tear_subsample;
        q.seed = seed;
        r.embedding = isomap(r.graph, tear_d);
        r.quality = quality_report(cloud, *r.embedding, &r.graph, q);
        if (!tear_emb_out.empty()) write_embedding(tear_emb_out, *r.embedding);
      } else {
        err << "warning: the cut disconnects the graph; no embedding computed\n";
      }
      emit(tear_out, dump_json(to_json(r)), out);
    };
  });

  // tear-rank
  auto* rank = app.add_subcommand("tear-rank", "tear at every skeleton edge and rank the results");
  std::string rank_in, rank_out;
  SkeletonFlags rank_flags;
  RankOptions rank_opts;
  rank->add_option("-i,--input", rank_in, "cloud CSV")->required();
  rank_flags.add(rank, true);
  rank->add_option("--d", rank_opts.d, "embedding dimension")->capture_default_str();
  rank->add_option("--extra-k", rank_opts.extra_k, "rebuild the graph with k + extra-k before tearing")->capture_default_str();
  rank->add_option("--subsample", rank_opts.quality.subsample_size, "persistence subsample size")->capture_default_str();
  rank->add_option("-o,--output", rank_out, "output JSON (default stdout)");
  rank->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(rank_in);
      std::optional<NeighborhoodGraph> graph;
      int k = 0;
      const Skeleton skeleton = obtain_skeleton(cloud, rank_flags, rank, k, graph);
      rank_opts.quality.seed = seed;
      emit(rank_out, dump_json(to_json(rank_cuts(cloud, *graph, skeleton, all_edge_cuts(skeleton), rank_opts))), out);
    };
  });

  // project-search
  auto* proj = app.add_subcommand("project-search", "rank linear projections sampled on the sphere");
  std::string proj_in, proj_out, proj_metric = "wd1";
  Index proj_m = 200;
  ProjectionSearchOptions proj_opts;
  proj->add_option("-i,--input", proj_in, "cloud CSV")->required();
  proj->add_option("--m", proj_m, "number of directions")->capture_default_str()->check(CLI::PositiveNumber);
  proj->add_option("--metric", proj_metric, "wd1, wd1_then_wd0 or bottleneck")->capture_default_str();
  proj->add_option("--subsample", proj_opts.subsample_size, "persistence subsample size")->capture_default_str();
  proj->add_option("-o,--output", proj_out, "output JSON (default stdout)");
  proj->callback([&] {
    action = [&] {
      const PointCloud cloud = read_point_cloud(proj_in);
      const RankMetric metric = parse_rank_metric(proj_metric);
      proj_opts.seed = seed;
      emit(proj_out, dump_json(to_json(projection_search(cloud, proj_m, metric, proj_opts), metric)), out);
    };
  });

  // serve
  auto* srv = app.add_subcommand("serve", "start the HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir;
  long timeout_ms = 30000;
  ServiceOptions sopts;
  srv->add_option("--host", host, "bind address")->capture_default_str();
  srv->add_option("--port", port, "TCP port")->capture_default_str()->check(CLI::Range(1, 65535));
  srv->add_option("--state-dir", state_dir, "directory for session persistence");
  srv->add_option("--timeout-ms", timeout_ms, "wait before answering 202 with a job id")->capture_default_str();
  srv->add_option("--subsample", sopts.subsample_size, "default persistence subsample size")->capture_default_str();
  srv->add_option("--cors-origin", sopts.cors_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  srv->callback([&] {
    action = [&] {
      if (!state_dir.empty()) sopts.state_dir = state_dir;
      sopts.timeout = std::chrono::milliseconds(timeout_ms);
      sopts.seed = seed;
      Service service(sopts);
      err << "serving on http://" << host << ":" << port << "\n";
      serve(service, host, port);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "error: " << e.what() << " [precondition: " << e.precondition() << "]\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOk;
}

}  // namespace skelmap::cli
