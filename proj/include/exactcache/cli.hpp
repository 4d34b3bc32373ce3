#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace exactcache::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,        // bad flags, unknown block, invalid cache geometry
  kParseError = 2,   // CFG file is not valid
  kBudgetError = 3,  // oracle or model-checking budget exceeded
  kIoError = 4,
  kDisagreement = 5, // verify found a pipeline/oracle mismatch
};

/// Runs one command line (without the program name). Reports and tables go
/// to `out` or to --out files; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exactcache::cli
