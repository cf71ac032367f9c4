#pragma once

#include <stdexcept>
#include <string>

namespace skelmap {

enum class ErrorKind {
  kParameter,     // a precondition on an argument was violated
  kConnectivity,  // an operation needed a connected neighborhood graph
  kIo,            // file could not be read or written
  kFormat,        // input file or body was malformed
  kUndefined,     // result is mathematically undefined (e.g. zero variance)
};

// All library failures are reported with this exception. `precondition`
// names the violated rule so front ends can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string precondition, const std::string& message)
      : std::runtime_error(message),
        kind_(kind),
        precondition_(std::move(precondition)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& precondition() const noexcept { return precondition_; }

 private:
  ErrorKind kind_;
  std::string precondition_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string precondition,
                              const std::string& message) {
  throw Error(kind, std::move(precondition), message);
}

inline void require(bool condition, std::string precondition,
                    const std::string& message) {
  if (!condition) fail(ErrorKind::kParameter, std::move(precondition), message);
}

const char* to_string(ErrorKind kind) noexcept;

}  // namespace skelmap
