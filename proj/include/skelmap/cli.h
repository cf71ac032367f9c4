#pragma once

#include <iosfwd>

namespace skelmap::cli {

// Exit codes. Library errors map one-to-one onto the codes after kUsage.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,  // unknown subcommand or flag, malformed flag value
  kIo = 3,
  kFormat = 4,
  kParameter = 5,
  kConnectivity = 6,
  kUndefined = 7,
};

// Runs one subcommand. Results that are not written to a file go to `out`;
// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skelmap::cli
