#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "skelmap/geometry.h"

namespace skelmap {

struct ServiceOptions {
  std::optional<std::string> state_dir;  // sessions and cached responses persist here
  std::chrono::milliseconds timeout{30000};  // longer requests answer 202 + job id
  std::size_t workers = 0;                   // 0: thread_count()
  Index subsample_size = kDefaultPersistenceLimit;
  std::uint64_t seed = 0;
  std::string cors_origin = "*";
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

using Query = std::map<std::string, std::string>;

// Transport-independent request handler. Safe to call from many threads.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const std::string& method, const std::string& path, const Query& query,
                  const std::string& body);

  const ServiceOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving HTTP/1.1 on host:port until the process is stopped.
void serve(Service& service, const std::string& host, int port);

}  // namespace skelmap
