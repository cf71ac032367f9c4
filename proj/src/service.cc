#include "skelmap/service.h"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <thread>
#include <vector>

#include "skelmap/embedding.h"
#include "skelmap/error.h"
#include "skelmap/io.h"
#include "skelmap/parallel.h"
#include "skelmap/persistence.h"
#include "skelmap/pipeline.h"
#include "skelmap/quality.h"
#include "skelmap/skeleton.h"
#include "skelmap/tearing.h"

namespace skelmap {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct HttpError {
  int status;
  json body;
};

[[noreturn]] void http_fail(int status, const std::string& message, const std::string& precondition = {}) {
  json body = {{"error", message}};
  if (!precondition.empty()) body["precondition"] = precondition;
  throw HttpError{status, body};
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConnectivity:
      return 409;
    case ErrorKind::kIo:
      return 500;
    default:
      return 422;
  }
}

std::string random_token(char prefix) {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  return prefix + json_digest(json(rng()));
}

class WorkerPool {
 public:
  explicit WorkerPool(std::size_t n) {
    for (std::size_t i = 0; i < std::max<std::size_t>(1, n); ++i) {
      threads_.emplace_back([this] { loop(); });
    }
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }
  void submit(std::function<void()> task) {
    {
      std::lock_guard lock(mu_);
      tasks_.push_back(std::move(task));
    }
    cv_.notify_one();
  }

 private:
  void loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !tasks_.empty(); });
        if (tasks_.empty()) return;
        task = std::move(tasks_.front());
        tasks_.pop_front();
      }
      task();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> tasks_;
  std::vector<std::thread> threads_;
  bool stop_ = false;
};

struct Job {
  std::string id;
  std::string kind;
  std::chrono::steady_clock::time_point created = std::chrono::steady_clock::now();
  std::mutex mu;
  std::condition_variable cv;
  std::string status = "queued";
  std::optional<Response> result;
};

struct Session {
  std::string id;
  PointCloud cloud;
  json source;
  std::optional<fs::path> dir;

  mutable std::shared_mutex mu;
  std::map<std::string, Response> responses;
  std::map<int, std::shared_ptr<const NeighborhoodGraph>> graphs;
  std::map<std::string, std::shared_ptr<const Skeleton>> skeletons;
  std::map<std::string, SkeletonParams> skeleton_params;
  std::map<std::string, std::shared_ptr<const Embedding>> embeddings;
  std::map<Index, std::shared_ptr<const QualityContext>> contexts;
  std::string last_skeleton;
};

// Read-locked lookup, unlocked compute, write-locked insert. The first value
// inserted wins, so entries never change once visible.
template <typename Map, typename Fn>
typename Map::mapped_type cached(Session& s, Map& map, const typename Map::key_type& key, Fn compute) {
  {
    std::shared_lock lock(s.mu);
    if (auto it = map.find(key); it != map.end()) return it->second;
  }
  auto value = compute();
  std::unique_lock lock(s.mu);
  return map.emplace(key, std::move(value)).first->second;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    const std::string seg = path.substr(i, j == std::string::npos ? std::string::npos : j - i);
    if (!seg.empty()) out.push_back(seg);
    if (j == std::string::npos) break;
    i = j;
  }
  return out;
}

json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) http_fail(400, "request body must be a JSON object", "well-formed JSON");
    return j;
  } catch (const json::parse_error& e) {
    http_fail(400, std::string("malformed JSON body: ") + e.what(), "well-formed JSON");
  }
}

template <typename T>
T body_value(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kParameter, std::string("valid ") + key, std::string("parameter '") + key + "' has the wrong type");
  }
}

template <typename T>
T query_number(const Query& q, const char* key, T fallback) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(it->second, &used));
    } else {
      const long long v = std::stoll(it->second, &used);
      if (v < 0) throw std::invalid_argument("negative");
      value = static_cast<T>(v);
    }
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    fail(ErrorKind::kParameter, std::string("numeric ") + key, std::string("query parameter '") + key + "' must be a nonnegative number");
  }
}

// Concurrent writers of one artifact produce identical bytes; rename keeps
// readers from seeing a partial file.
void atomic_write(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + "." + random_token('t');
  write_text_file(tmp.string(), text);
  fs::rename(tmp, path);
}

json betti_json(const BettiSummary& b) {
  return {{"dim", b.dim}, {"count", b.count}, {"threshold", b.threshold},
          {"gap_width", b.gap_width}, {"ambiguous", b.ambiguous}};
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  std::shared_mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  WorkerPool pool;  // last member: joined before the maps above go away

  explicit Impl(ServiceOptions o)
      : options(std::move(o)), pool(options.workers ? options.workers : thread_count()) {
    if (options.state_dir) load_state();
  }

  // ---- persistence -------------------------------------------------------

  fs::path session_dir(const std::string& id) const { return fs::path(*options.state_dir) / "sessions" / id; }

  void save_session_meta(const Session& s) {
    if (!s.dir) return;
    json skel = json::object();
    for (const auto& [hash, params] : s.skeleton_params) skel[hash] = to_json(params);
    atomic_write(*s.dir / "session.json",
                    dump_json({{"id", s.id}, {"source", s.source}, {"skeletons", skel},
                               {"last_skeleton", s.last_skeleton}}));
  }

  void save_response(const Session& s, const std::string& key, const Response& r) {
    if (!s.dir) return;
    atomic_write(*s.dir / "responses" / (json_digest(json(key)) + ".json"),
                    dump_json({{"key", key}, {"status", r.status}, {"body", r.body}}));
  }

  void save_embedding(const Session& s, const std::string& hash, const Embedding& e) {
    if (!s.dir) return;
    atomic_write(*s.dir / "embeddings" / (hash + ".json"), dump_json(to_json(e)));
  }

  void load_state() {
    const fs::path root = fs::path(*options.state_dir) / "sessions";
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) fail(ErrorKind::kIo, "writable state directory", "cannot create " + root.string());
    for (const auto& entry : fs::directory_iterator(root)) {
      if (!entry.is_directory() || !fs::exists(entry.path() / "session.json")) continue;
      auto s = std::make_shared<Session>();
      const json meta = parse_json(read_text_file((entry.path() / "session.json").string()));
      s->id = meta.at("id").get<std::string>();
      s->source = meta.value("source", json());
      s->dir = entry.path();
      s->cloud = read_point_cloud((entry.path() / "cloud.csv").string());
      for (const auto& [hash, params] : meta.value("skeletons", json::object()).items()) {
        s->skeleton_params[hash] = skeleton_params_from_json(params);
      }
      s->last_skeleton = meta.value("last_skeleton", std::string());
      if (fs::exists(entry.path() / "responses")) {
        for (const auto& f : fs::directory_iterator(entry.path() / "responses")) {
          if (f.path().extension() != ".json") continue;
          const json r = parse_json(read_text_file(f.path().string()));
          s->responses[r.at("key").get<std::string>()] = Response{r.at("status").get<int>(), r.at("body")};
        }
      }
      sessions[s->id] = s;
    }
  }

  // ---- artifacts ---------------------------------------------------------

  std::shared_ptr<Session> session(const std::string& id) {
    std::shared_lock lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) http_fail(404, "unknown session '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const NeighborhoodGraph> graph(Session& s, int k) {
    return cached(s, s.graphs, k, [&] {
      return std::make_shared<const NeighborhoodGraph>(build_knn_graph(s.cloud, k));
    });
  }

  std::shared_ptr<const Skeleton> skeleton(Session& s, const std::string& hash) {
    SkeletonParams params;
    {
      std::shared_lock lock(s.mu);
      params = s.skeleton_params.at(hash);
    }
    return cached(s, s.skeletons, hash, [&] {
      return std::make_shared<const Skeleton>(compute_skeleton(s.cloud, *graph(s, params.k), params));
    });
  }

  std::string register_skeleton(Session& s, const SkeletonParams& params, bool make_last) {
    const std::string hash = json_digest(to_json(params));
    std::unique_lock lock(s.mu);
    s.skeleton_params.emplace(hash, params);
    if (make_last) s.last_skeleton = hash;
    save_session_meta(s);
    return hash;
  }

  // Hash string of a computed skeleton, an object of skeleton parameters, or
  // nothing: the most recently computed skeleton, else the defaults.
  std::string resolve_skeleton(Session& s, const json& ref) {
    if (ref.is_string()) {
      std::shared_lock lock(s.mu);
      if (!s.skeleton_params.count(ref.get<std::string>())) {
        fail(ErrorKind::kParameter, "skeleton computed", "no skeleton with hash '" + ref.get<std::string>() + "'");
      }
      return ref.get<std::string>();
    }
    if (ref.is_object()) return register_skeleton(s, skeleton_params_from_json(ref), false);
    {
      std::shared_lock lock(s.mu);
      if (!s.last_skeleton.empty()) return s.last_skeleton;
    }
    return register_skeleton(s, SkeletonParams{}, false);
  }

  QualityOptions quality_options(Index subsample) const {
    QualityOptions q;
    q.subsample_size = subsample;
    q.seed = options.seed;
    return q;
  }

  std::shared_ptr<const QualityContext> context(Session& s, Index subsample) {
    return cached(s, s.contexts, subsample, [&] {
      return std::make_shared<const QualityContext>(make_quality_context(s.cloud, quality_options(subsample)));
    });
  }

  std::shared_ptr<const Embedding> add_embedding(Session& s, const std::string& hash, Embedding e) {
    auto stored = cached(s, s.embeddings, hash, [&] { return std::make_shared<const Embedding>(std::move(e)); });
    save_embedding(s, hash, *stored);
    return stored;
  }

  std::shared_ptr<const Embedding> find_embedding(Session& s, const std::string& hash) {
    {
      std::shared_lock lock(s.mu);
      if (auto it = s.embeddings.find(hash); it != s.embeddings.end()) return it->second;
    }
    if (s.dir && fs::exists(*s.dir / "embeddings" / (hash + ".json"))) {
      Embedding e = embedding_from_json(parse_json(read_text_file((*s.dir / "embeddings" / (hash + ".json")).string())));
      return cached(s, s.embeddings, hash, [&] { return std::make_shared<const Embedding>(std::move(e)); });
    }
    http_fail(404, "unknown embedding '" + hash + "'");
  }

  Index subsample_of(const json& body, const Query& query) const {
    Index n = query_number<Index>(query, "subsample", options.subsample_size);
    return body_value<Index>(body, "subsample", n);
  }

  // ---- jobs --------------------------------------------------------------

  static Response run_guarded(const std::function<Response()>& fn) {
    try {
      return fn();
    } catch (const HttpError& e) {
      return {e.status, e.body};
    } catch (const Error& e) {
      return {status_for(e.kind()), {{"error", e.what()}, {"precondition", e.precondition()}, {"kind", to_string(e.kind())}}};
    } catch (const std::exception& e) {
      return {500, {{"error", e.what()}}};
    }
  }

  // Serves from the response cache, otherwise runs `fn` on the worker pool and
  // waits up to the configured timeout before handing back a job id.
  Response run_job(const std::shared_ptr<Session>& s, const std::string& kind, const std::string& key,
                   std::function<Response()> fn) {
    {
      std::shared_lock lock(s->mu);
      if (auto it = s->responses.find(key); it != s->responses.end()) return it->second;
    }
    auto job = std::make_shared<Job>();
    job->id = random_token('j');
    job->kind = kind;
    {
      std::lock_guard lock(jobs_mu);
      jobs[job->id] = job;
    }
    pool.submit([this, s, job, key, fn = std::move(fn)] {
      {
        std::lock_guard lock(job->mu);
        job->status = "running";
      }
      Response r = run_guarded(fn);
      if (r.status == 200 || r.status == 409) {
        std::unique_lock lock(s->mu);
        const Response& stored = s->responses.emplace(key, r).first->second;
        save_response(*s, key, stored);
        r = stored;
      }
      {
        std::lock_guard lock(job->mu);
        job->status = r.status < 400 ? "done" : "failed";
        job->result = std::move(r);
      }
      job->cv.notify_all();
    });
    std::unique_lock lock(job->mu);
    if (job->cv.wait_for(lock, options.timeout, [&] { return job->result.has_value(); })) {
      return *job->result;
    }
    return {202, {{"job", job->id}, {"status", job->status}, {"poll", "/jobs/" + job->id}}};
  }

  Response job_status(const std::string& id) {
    std::shared_ptr<Job> job;
    {
      std::lock_guard lock(jobs_mu);
      auto it = jobs.find(id);
      if (it == jobs.end()) http_fail(404, "unknown job '" + id + "'");
      job = it->second;
    }
    std::lock_guard lock(job->mu);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - job->created);
    json body = {{"id", job->id}, {"kind", job->kind}, {"status", job->status},
                 {"elapsed_ms", elapsed.count()}, {"result", nullptr}};
    if (job->result) body["result"] = {{"status", job->result->status}, {"body", job->result->body}};
    return {200, body};
  }

  // ---- endpoints ---------------------------------------------------------

  Response create_session(const std::string& raw) {
    const bool is_json = raw.find_first_not_of(" \t\r\n") != std::string::npos &&
                         raw[raw.find_first_not_of(" \t\r\n")] == '{';
    auto s = std::make_shared<Session>();
    if (!is_json) {
      s->cloud = PointCloud(parse_csv_matrix(raw));
      s->source = {{"kind", "upload"}};
    } else {
      const json body = parse_body(raw);
      if (body.contains("csv")) {
        s->cloud = PointCloud(parse_csv_matrix(body_value<std::string>(body, "csv", "")));
        s->source = {{"kind", "upload"}};
      } else if (body.contains("generator")) {
        const json& g = body["generator"];
        ShapeSpec spec;
        spec.name = body_value<std::string>(g, "shape", "");
        spec.n = body_value<Index>(g, "n", 0);
        spec.noise = body_value<double>(g, "noise", 0.0);
        spec.params = body_value<std::map<std::string, double>>(g, "params", {});
        const auto seed = body_value<std::uint64_t>(g, "seed", options.seed);
        s->cloud = generate_shape(spec, generator_seed(seed));
        s->source = {{"kind", "generator"}, {"shape", spec.name}, {"n", spec.n},
                     {"noise", spec.noise}, {"params", spec.params}, {"seed", seed}};
      } else {
        fail(ErrorKind::kParameter, "csv or generator", "session body needs 'csv' or 'generator'");
      }
    }
    s->id = random_token('s');
    if (options.state_dir) {
      s->dir = session_dir(s->id);
      fs::create_directories(*s->dir / "responses");
      fs::create_directories(*s->dir / "embeddings");
      write_point_cloud((*s->dir / "cloud.csv").string(), s->cloud);
      save_session_meta(*s);
    }
    {
      std::unique_lock lock(sessions_mu);
      sessions[s->id] = s;
    }
    return {200, {{"id", s->id}, {"n", s->cloud.size()}, {"dim", s->cloud.dim()}, {"source", s->source}}};
  }

  Response describe(Session& s) {
    std::shared_lock lock(s.mu);
    json skel = json::object();
    for (const auto& [hash, params] : s.skeleton_params) skel[hash] = to_json(params);
    json embeddings = json::array();
    for (const auto& [hash, e] : s.embeddings) embeddings.push_back(hash);
    return {200, {{"id", s.id}, {"n", s.cloud.size()}, {"dim", s.cloud.dim()}, {"source", s.source},
                  {"skeletons", skel}, {"last_skeleton", s.last_skeleton.empty() ? json(nullptr) : json(s.last_skeleton)},
                  {"embeddings", embeddings}}};
  }

  Response post_skeleton(const std::shared_ptr<Session>& s, const json& body) {
    const SkeletonParams params = skeleton_params_from_json(body);
    const std::string hash = register_skeleton(*s, params, true);
    return run_job(s, "skeleton", "skeleton:" + hash, [this, s, hash, params] {
      json out = to_json(*skeleton(*s, hash));
      out["hash"] = hash;
      out["params"] = to_json(params);
      return Response{200, out};
    });
  }

  Response post_embed(const std::shared_ptr<Session>& s, json body, const Query& query) {
    const Index subsample = subsample_of(body, query);
    const auto seed = body_value<std::uint64_t>(body, "seed", options.seed);
    const json skel_ref = body.value("skeleton", json());
    body.erase("subsample");
    body.erase("seed");
    body.erase("skeleton");
    const EmbedParams params = embed_params_from_json(body);
    json identity = {{"params", to_json(params)}};
    std::string skel_hash;
    if (params.method == EmbeddingMethod::kLIsomapHomology) {
      skel_hash = resolve_skeleton(*s, skel_ref);
      identity["skeleton"] = skel_hash;
    }
    if (params.method == EmbeddingMethod::kLIsomapRandom) identity["seed"] = seed;
    const std::string hash = json_digest(identity);
    const std::string key = "embed:" + hash + ":" + std::to_string(subsample);
    return run_job(s, "embed", key, [=, this] {
      const auto g = graph(*s, params.k);
      std::shared_ptr<const Skeleton> skel;
      if (!skel_hash.empty()) skel = skeleton(*s, skel_hash);
      auto emb = add_embedding(*s, hash, compute_embedding(s->cloud, *g, params, skel.get(), seed));
      const QualityReport report = quality_report(*context(*s, subsample), *emb, g.get(), quality_options(subsample));
      return Response{200, {{"hash", hash}, {"identity", identity}, {"embedding", to_json(*emb)}, {"quality", to_json(report)}}};
    });
  }

  Response post_tear(const std::shared_ptr<Session>& s, const json& body, const Query& query) {
    const Index subsample = subsample_of(body, query);
    const json edge = body.value("edge", json());
    if (!edge.is_array() || edge.size() != 2 || !edge[0].is_number_unsigned() || !edge[1].is_number_unsigned()) {
      fail(ErrorKind::kParameter, "edge = [u, v]", "'edge' must be a pair of node ids");
    }
    CutSpec cut;
    cut.u = edge[0].get<Index>();
    cut.v = edge[1].get<Index>();
    cut.t = body_value<double>(body, "t", 0.5);
    if (body.contains("radius") && !body["radius"].is_null() && body["radius"] != "auto") {
      cut.radius = body_value<double>(body, "radius", 0.0);
    }
    cut.global = body_value<bool>(body, "global", false);
    const int d = body_value<int>(body, "d", 2);
    const std::string skel_hash = resolve_skeleton(*s, body.value("skeleton", json()));
    const json identity = {{"cut", to_json(cut)}, {"d", d}, {"skeleton", skel_hash}};
    const std::string hash = json_digest(identity);
    const std::string key = "tear:" + hash + ":" + std::to_string(subsample);
    return run_job(s, "tear", key, [=, this] {
      const auto skel = skeleton(*s, skel_hash);
      int k = 0;
      {
        std::shared_lock lock(s->mu);
        k = s->skeleton_params.at(skel_hash).k;
      }
      const auto g = graph(*s, k);
      TearResult result = tear_graph(s->cloud, *g, *skel, cut);
      if (!result.connected) {
        json out = to_json(result);
        out["error"] = "cut disconnects the neighborhood graph";
        out["precondition"] = "connected graph after tearing";
        return Response{409, out};
      }
      auto emb = add_embedding(*s, hash, isomap(result.graph, d));
      result.quality = quality_report(*context(*s, subsample), *emb, &result.graph, quality_options(subsample));
      result.embedding = *emb;
      json out = to_json(result);
      out["hash"] = hash;
      out["skeleton"] = skel_hash;
      return Response{200, out};
    });
  }

  Response get_rank(const std::shared_ptr<Session>& s, const Query& query) {
    const Index subsample = subsample_of(json::object(), query);
    RankOptions opts;
    opts.d = query_number<int>(query, "d", 2);
    opts.extra_k = query_number<int>(query, "extra_k", 0);
    opts.quality = quality_options(subsample);
    auto ref = query.find("skeleton");
    const std::string skel_hash = resolve_skeleton(*s, ref == query.end() ? json() : json(ref->second));
    const std::string key = "rank:" + skel_hash + ":" + std::to_string(opts.d) + ":" +
                            std::to_string(opts.extra_k) + ":" + std::to_string(subsample);
    return run_job(s, "tear-rank", key, [=, this] {
      const auto skel = skeleton(*s, skel_hash);
      int k = 0;
      {
        std::shared_lock lock(s->mu);
        k = s->skeleton_params.at(skel_hash).k;
      }
      const auto ranked = rank_cuts(s->cloud, *graph(*s, k), *skel, all_edge_cuts(*skel), opts);
      return Response{200, to_json(ranked)};
    });
  }

  Response post_project(const std::shared_ptr<Session>& s, const json& body, const Query& query) {
    const Index subsample = subsample_of(body, query);
    const auto v = body_value<std::vector<double>>(body, "direction", {});
    require(v.size() == s->cloud.dim(), "direction length = cloud dimension",
            "direction must have one entry per cloud coordinate");
    const json identity = {{"direction", v}};
    const std::string hash = json_digest(identity);
    const std::string key = "project:" + hash + ":" + std::to_string(subsample);
    return run_job(s, "project", key, [=, this] {
      const Eigen::VectorXd dir = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      auto emb = add_embedding(*s, hash, linear_project(s->cloud, make_direction(dir)));
      const QualityReport report = quality_report(*context(*s, subsample), *emb, nullptr, quality_options(subsample));
      return Response{200, {{"hash", hash}, {"embedding", to_json(*emb)}, {"quality", to_json(report)}}};
    });
  }

  Response get_search(const std::shared_ptr<Session>& s, const Query& query) {
    const Index m = query_number<Index>(query, "m", 100);
    const auto metric_it = query.find("metric");
    const RankMetric metric = parse_rank_metric(metric_it == query.end() ? "wd1" : metric_it->second);
    ProjectionSearchOptions opts;
    opts.subsample_size = query_number<Index>(query, "subsample", opts.subsample_size);
    opts.seed = options.seed;
    const std::string key = "search:" + std::to_string(m) + ":" + to_string(metric) + ":" +
                            std::to_string(opts.subsample_size);
    return run_job(s, "project-search", key, [=] {
      return Response{200, to_json(projection_search(s->cloud, m, metric, opts), metric)};
    });
  }

  Response get_persistence(const std::shared_ptr<Session>& s, const Query& query) {
    const Index subsample = subsample_of(json::object(), query);
    const auto it = query.find("target");
    const std::string target = it == query.end() ? "input" : it->second;
    std::string hash;
    if (target.rfind("embedding:", 0) == 0) {
      hash = target.substr(10);
      find_embedding(*s, hash);
    } else if (target != "input") {
      fail(ErrorKind::kParameter, "target = input | embedding:{hash}", "unknown persistence target '" + target + "'");
    }
    const std::string key = "persistence:" + target + ":" + std::to_string(subsample);
    return run_job(s, "persistence", key, [=, this] {
      const auto ctx = context(*s, subsample);
      std::vector<PersistenceDiagram> diagrams;
      if (hash.empty()) {
        diagrams = ctx->input_diagrams;
      } else {
        const auto emb = find_embedding(*s, hash);
        Matrix sub(static_cast<Eigen::Index>(ctx->subsample.size()), emb->coords.cols());
        for (Index i = 0; i < ctx->subsample.size(); ++i) {
          sub.row(static_cast<Eigen::Index>(i)) = emb->coords.row(static_cast<Eigen::Index>(ctx->subsample[i]));
        }
        diagrams = vr_persistence(euclidean_distances(sub), 1);
      }
      json ds = json::array();
      json bs = json::array();
      for (const auto& d : diagrams) {
        ds.push_back(to_json(d));
        bs.push_back(betti_json(persistent_betti(d)));
      }
      return Response{200, {{"target", target}, {"subsample_size", ctx->subsample.size()},
                            {"diagrams", ds}, {"betti", bs}}};
    });
  }

  Response route(const std::string& method, const std::string& path, const Query& query, const std::string& raw) {
    const auto seg = split_path(path);
    if (seg.size() == 2 && seg[0] == "jobs" && method == "GET") return job_status(seg[1]);
    if (seg.empty() || seg[0] != "sessions") http_fail(404, "no route for " + path);
    if (seg.size() == 1) {
      if (method != "POST") http_fail(405, "use POST /sessions");
      return create_session(raw);
    }
    const auto s = session(seg[1]);
    std::string rest;
    for (std::size_t i = 2; i < seg.size(); ++i) rest += (i > 2 ? "/" : "") + seg[i];
    const auto want = [&](const char* m) {
      if (method != m) http_fail(405, std::string("use ") + m + " " + path);
    };
    if (rest.empty()) {
      want("GET");
      return describe(*s);
    }
    if (rest == "skeleton") {
      want("POST");
      return post_skeleton(s, parse_body(raw));
    }
    if (rest == "embed") {
      want("POST");
      return post_embed(s, parse_body(raw), query);
    }
    if (rest == "tear") {
      want("POST");
      return post_tear(s, parse_body(raw), query);
    }
    if (rest == "tear/rank") {
      want("GET");
      return get_rank(s, query);
    }
    if (rest == "project") {
      want("POST");
      return post_project(s, parse_body(raw), query);
    }
    if (rest == "project/search") {
      want("GET");
      return get_search(s, query);
    }
    if (rest == "persistence") {
      want("GET");
      return get_persistence(s, query);
    }
    http_fail(404, "no route for " + path);
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Service::~Service() = default;

const ServiceOptions& Service::options() const { return impl_->options; }

Response Service::handle(const std::string& method, const std::string& path, const Query& query,
                         const std::string& body) {
  return Impl::run_guarded([&] { return impl_->route(method, path, query, body); });
}

}  // namespace skelmap
