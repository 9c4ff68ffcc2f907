#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gemreason::cli {

/// Stable exit-code contract (docs/cli.md).
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kParse = 2,
  kUsage = 3,
  kQuery = 4,
  kPrecondition = 5,
  kLedger = 6,
  kIo = 7,
};

/// Runs one command line (args[0] is the program name). Summaries go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gemreason::cli
