// Acceptance run: one PASS/FAIL line per criterion. Pass criterion names as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.h"
#include "skelmap/diagram_metrics.h"
#include "skelmap/io.h"
#include "skelmap/pipeline.h"
#include "skelmap/service.h"
#include "skelmap/tearing.h"

using namespace skelmap;
using nlohmann::json;

namespace {

// Pinned tolerances and budgets.
constexpr double kMetricTol = 1e-12;
constexpr double kMdsTol = 1e-9;
constexpr double kLandmarkTol = 1e-6;
constexpr Index kSubsample = 512;
constexpr Index kProjectionSubsample = 256;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double relative_error(const Matrix& a, const Matrix& b) {
  const Matrix da = oracle::pairwise(a);
  const Matrix db = oracle::pairwise(b);
  return (da - db).norm() / db.norm();
}

PersistenceDiagram random_diagram(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  PersistenceDiagram d;
  d.dim = 1;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double b = u(rng);
    d.pairs.push_back({b, b + 0.01 + u(rng)});
  }
  std::sort(d.pairs.begin(), d.pairs.end());
  return d;
}

QualityOptions quality_options(Index subsample = kSubsample) {
  QualityOptions q;
  q.subsample_size = subsample;
  return q;
}

// ---- criteria ---------------------------------------------------------------

Outcome persistence_oracle() {
  int equal = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index n = 5 + seed % 11;  // 5..15
    const Matrix pts = oracle::random_points(n, 2 + seed % 2, 1000 + seed);
    const auto d = euclidean_distances(pts);
    if (vr_persistence(d, 1) == brute_force_persistence(d, 1)) ++equal;
  }
  return {equal == 50, std::to_string(equal) + "/50 clouds identical"};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(4242);
  int agree = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_diagram(rng);
    const auto b = random_diagram(rng);
    bool ok = true;
    for (double p : {1.0, 2.0}) {
      const double want = brute_force_match(a, b, p).value;
      const double err = std::abs(wasserstein(a, b, p).value - want) / std::max(1.0, want);
      worst = std::max(worst, err);
      ok = ok && err <= kMetricTol;
    }
    const double want = brute_force_match(a, b, kBottleneckP).value;
    const double err = std::abs(bottleneck(a, b).value - want) / std::max(1.0, want);
    worst = std::max(worst, err);
    if (ok && err <= kMetricTol) ++agree;
  }

  const auto make = [](std::initializer_list<std::pair<double, double>> list) {
    PersistenceDiagram d;
    d.dim = 1;
    for (auto [b, e] : list) d.pairs.push_back({b, e});
    return d;
  };
  const auto same = make({{0, 2}, {1, 3.5}});
  const auto single = make({{0, 2}});
  const auto big = make({{0, 4}});
  const bool hand = wasserstein(same, same, 2).value == 0.0 && bottleneck(same, same).value == 0.0 &&
                    std::abs(wasserstein(single, make({}), 2).value - 1.0) <= kMetricTol &&
                    std::abs(bottleneck(single, make({})).value - 1.0) <= kMetricTol &&
                    std::abs(wasserstein(big, single, 2).value - 2.0) <= kMetricTol &&
                    std::abs(bottleneck(big, single).value - 2.0) <= kMetricTol;
  return {agree == 100 && hand,
          std::to_string(agree) + "/100 pairs agree, worst rel err " + fmt(worst) + ", hand cases " + (hand ? "ok" : "wrong")};
}

Outcome mds_exactness() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix pts = oracle::random_points(20, 2, 500 + seed, 10.0);
    const Matrix d = oracle::pairwise(pts);
    const auto e = classical_mds(DistanceMatrix(d, DistanceKind::kEuclidean), 2);
    worst = std::max(worst, (oracle::pairwise(e.coords) - d).cwiseAbs().maxCoeff());
  }
  const auto cloud = generate_shape({"swiss_roll", 400, 0.0, {}}, 3);
  const auto graph = build_knn_graph(cloud, kDefaultK);
  IndexList all(cloud.size());
  std::iota(all.begin(), all.end(), Index{0});
  const double rel = relative_error(l_isomap(graph, all, 2).coords, isomap(graph, 2).coords);
  return {worst <= kMdsTol && rel <= kLandmarkTol,
          "max MDS distance error " + fmt(worst) + ", all-landmark L-Isomap rel error " + fmt(rel)};
}

Outcome figure_eight_projection() {
  const auto cloud = generate_shape({"figure_eight_bended", 1500, 0.0, {}}, generator_seed(1));
  const auto r = projection_search(cloud, 200, RankMetric::kWd1, {kProjectionSubsample, 1});
  std::vector<double> scores;
  for (const auto& s : r.ranked) scores.push_back(s.score);
  std::sort(scores.begin(), scores.end());
  const double p10 = scores[scores.size() / 10];
  const auto& top = r.ranked.front();
  return {r.source_pb1 == 2 && top.pb1 == 2 && top.wd1 <= p10,
          "source PB_1 " + std::to_string(r.source_pb1) + ", top direction PB_1 " + std::to_string(top.pb1) +
              ", WD_1 " + fmt(top.wd1) + " vs 10th percentile " + fmt(p10)};
}

Outcome swiss_roll_landmarks() {
  const auto cloud = generate_shape({"swiss_roll_hole", 2000, 0.0, {}}, generator_seed(1));
  const auto graph = build_knn_graph(cloud, kDefaultK);
  SkeletonParams sp;
  sp.intervals = 20;
  const auto skeleton = compute_skeleton(cloud, graph, sp);
  const auto landmarks = extract_landmarks(skeleton);
  EmbedParams ep;
  ep.method = EmbeddingMethod::kLIsomapHomology;
  const auto e = compute_embedding(cloud, graph, ep, &skeleton, 1);
  const auto q = quality_report(cloud, e, &graph, quality_options());
  const bool count_ok = landmarks.size() >= 20 && landmarks.size() <= 30;
  return {count_ok && q.pb1_before == 1 && q.pb1_after == 1,
          std::to_string(landmarks.size()) + " landmarks, PB_1 " + std::to_string(q.pb1_before) + " -> " +
              std::to_string(q.pb1_after) + ", RV " + fmt(q.rv)};
}

// The 4-loop composite shared by the loop-count and RV criteria.
struct RingCase {
  PointCloud cloud;
  NeighborhoodGraph graph;
  Skeleton skeleton;
  IndexList landmarks;
};

RingCase ring_case(std::uint64_t seed) {
  auto cloud = generate_shape({"ring_chain", 2000, 0.0, {}}, generator_seed(seed));
  auto graph = build_knn_graph(cloud, kDefaultK);
  SkeletonParams sp;
  sp.intervals = 12;
  auto skeleton = compute_skeleton(cloud, graph, sp);
  auto landmarks = extract_landmarks(skeleton);
  return {std::move(cloud), std::move(graph), std::move(skeleton), std::move(landmarks)};
}

Outcome ring_chain_loops() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rc = ring_case(seed);
    const auto context = make_quality_context(rc.cloud, quality_options());
    const auto hom = l_isomap(rc.graph, rc.landmarks, 2, {true, EmbeddingMethod::kLIsomapHomology});
    const auto rnd = l_isomap(rc.graph, random_landmarks(rc.cloud.size(), rc.landmarks.size(), seed), 2);
    const auto qh = quality_report(context, hom, &rc.graph, quality_options());
    const auto qr = quality_report(context, rnd, &rc.graph, quality_options());
    ok = ok && qh.pb1_before == 4 && qh.pb1_after == 4 && qr.pb1_after <= qh.pb1_after;
    detail += (seed > 1 ? "; " : "") + std::string("seed ") + std::to_string(seed) + ": " +
              std::to_string(rc.landmarks.size()) + " lm, in " + std::to_string(qh.pb1_before) + " hom " +
              std::to_string(qh.pb1_after) + " rnd " + std::to_string(qr.pb1_after);
  }
  return {ok, detail};
}

Outcome cylinder_tearing() {
  const auto cloud = generate_shape({"cylinder_holes", 2000, 0.0, {}}, generator_seed(1));
  const auto graph = build_knn_graph(cloud, kDefaultK);
  const auto skeleton = compute_skeleton(cloud, graph, {});
  const auto untorn = quality_report(cloud, isomap(graph, 2), &graph, quality_options());
  RankOptions ro;
  ro.quality = quality_options();
  const auto ranked = rank_cuts(cloud, graph, skeleton, all_edge_cuts(skeleton), ro);
  const Index top = ranked.empty() || !ranked[0].valid ? 0 : ranked[0].result.quality->pb1_after;
  return {untorn.pb1_before == 4 && untorn.pb1_after <= 1 && top >= 3,
          "input PB_1 " + std::to_string(untorn.pb1_before) + ", untorn " + std::to_string(untorn.pb1_after) +
              ", top cut " + std::to_string(top) + " of " + std::to_string(ranked.size()) + " candidates"};
}

Outcome ring_chain_rv() {
  const auto rc = ring_case(1);
  const double hom =
      residual_variance(rc.cloud, &rc.graph,
                        l_isomap(rc.graph, rc.landmarks, 2, {true, EmbeddingMethod::kLIsomapHomology}).coords);
  std::vector<double> random;
  for (std::uint64_t run = 0; run < 20; ++run) {
    const auto lm = random_landmarks(rc.cloud.size(), rc.landmarks.size(), derive_seed(run, "landmarks"));
    random.push_back(residual_variance(rc.cloud, &rc.graph, l_isomap(rc.graph, lm, 2).coords));
  }
  std::sort(random.begin(), random.end());
  const double median = 0.5 * (random[9] + random[10]);
  return {hom <= median, "homological RV " + fmt(hom) + " vs random median " + fmt(median) + " (" +
                             std::to_string(rc.landmarks.size()) + " landmarks)"};
}

// Runs the CLI binary and returns everything it wrote.
std::string run_cli(const std::string& args, const std::filesystem::path& dir, const std::vector<std::string>& files) {
  const std::string cmd = std::string(SKELMAP_BIN) + " " + args + " > " + (dir / "stdout").string() + " 2>&1";
  const int code = std::system(cmd.c_str());
  std::string all = "exit " + std::to_string(code) + "\n" + read_text_file((dir / "stdout").string());
  for (const auto& f : files) {
    const auto path = dir / f;
    all += "--- " + f + "\n" + (std::filesystem::exists(path) ? read_text_file(path.string()) : "missing\n");
    std::filesystem::remove(path);
  }
  return all;
}

Outcome cli_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "skelmap_acceptance_cli";
  std::filesystem::remove_all(root);
  const auto d = [&](const std::string& f) { return (root / f).string(); };
  std::filesystem::create_directories(root);
  // shared inputs
  std::system((std::string(SKELMAP_BIN) + " generate --shape cylinder_holes --n 400 --seed 3 -o " + d("cyl.csv")).c_str());
  std::system((std::string(SKELMAP_BIN) + " generate --shape circle --n 300 --seed 3 -o " + d("circle.csv")).c_str());
  {
    std::string signal = "x\n";
    for (int t = 0; t < 300; ++t) signal += format_double(std::sin(t * 0.2)) + "\n";
    write_text_file(d("signal.csv"), signal);
  }
  std::system((std::string(SKELMAP_BIN) + " persistence -i " + d("circle.csv") + " -o " + d("da.json")).c_str());
  std::system((std::string(SKELMAP_BIN) + " persistence -i " + d("cyl.csv") + " --subsample 128 -o " + d("db.json")).c_str());
  std::system((std::string(SKELMAP_BIN) + " embed -i " + d("cyl.csv") + " -o " + d("e0.csv")).c_str());

  struct Case {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases = {
      {"generate", "generate --shape torus --n 300 --noise 0.05 --seed 9 -o " + d("g.csv"), {"g.csv"}},
      {"delay-embed", "delay-embed -i " + d("signal.csv") + " --window 20 -o " + d("w.csv"), {"w.csv"}},
      {"skeleton", "skeleton -i " + d("cyl.csv") + " -o " + d("s.json"), {"s.json"}},
      {"embed", "embed -i " + d("cyl.csv") + " --method l-isomap-random --seed 4 --report " + d("r.json") +
                    " --subsample 128 -o " + d("e.csv"),
       {"e.csv", "e.json", "r.json"}},
      {"persistence", "persistence -i " + d("cyl.csv") + " --subsample 128 --seed 2 -o " + d("p.json"), {"p.json"}},
      {"compare", "compare " + d("da.json") + " " + d("db.json") + " --ignore-cap", {}},
      {"quality", "quality -i " + d("cyl.csv") + " -e " + d("e0.csv") + " --subsample 128 -o " + d("q.json"), {"q.json"}},
      {"tear", "tear -i " + d("circle.csv") + " --minpts 8 --intervals 6 --edge 1,3 --subsample 128 --embedding-output " +
                   d("t.csv") + " -o " + d("t.json"),
       {"t.json", "t.csv"}},
      {"tear-rank", "tear-rank -i " + d("cyl.csv") + " --subsample 128 -o " + d("tr.json"), {"tr.json"}},
      {"project-search", "project-search -i " + d("cyl.csv") + " --m 20 --subsample 128 -o " + d("ps.json"), {"ps.json"}},
  };
  std::vector<std::string> differing;
  for (const auto& c : cases) {
    const auto first = run_cli(c.args, root, c.files);
    const auto second = run_cli(c.args, root, c.files);
    if (first != second || first.rfind("exit 0\n", 0) != 0) differing.push_back(c.name);
  }

  // serve: two fresh service instances answer identical request sequences identically
  const auto script = [](Service& svc) {
    std::string all;
    const auto s = svc.handle("POST", "/sessions", {}, R"({"generator":{"shape":"circle","n":200,"seed":5}})");
    const std::string base = "/sessions/" + s.body["id"].get<std::string>();
    all += s.body["n"].dump();
    const auto sk = svc.handle("POST", base + "/skeleton", {}, R"({"n":6,"minpts":8})");
    all += sk.body.dump();
    all += svc.handle("POST", base + "/embed", {}, R"({"method":"l-isomap-homology","subsample":128})").body.dump();
    const auto e = sk.body["edges"][2];
    all += svc.handle("POST", base + "/tear", {}, json{{"edge", e}, {"subsample", 128}}.dump()).body.dump();
    all += svc.handle("GET", base + "/tear/rank", {{"subsample", "64"}}, "").body.dump();
    all += svc.handle("GET", base + "/project/search", {{"m", "10"}, {"subsample", "64"}}, "").body.dump();
    all += svc.handle("GET", base + "/persistence", {{"subsample", "128"}}, "").body.dump();
    return all;
  };
  Service a, b;
  if (script(a) != script(b)) differing.push_back("serve");
  std::filesystem::remove_all(root);
  return {differing.empty(), differing.empty() ? std::to_string(cases.size() + 1) + " subcommands byte-identical"
                                               : "differs or failed: " + [&] {
                                                   std::string s;
                                                   for (const auto& n : differing) s += n + " ";
                                                   return s;
                                                 }()};
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"persistence-oracle", 30, persistence_oracle},
      {"metric-oracle", 10, metric_oracle},
      {"mds-exactness", 10, mds_exactness},
      {"figure-eight-projection", 120, figure_eight_projection},
      {"swiss-roll-landmarks", 120, swiss_roll_landmarks},
      {"ring-chain-loops", 300, ring_chain_loops},
      {"cylinder-tearing", 300, cylinder_tearing},
      {"ring-chain-rv", 300, ring_chain_rv},
      {"cli-determinism", 600, cli_determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt(secs) << " s of "
              << c.budget_s << " s" << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
