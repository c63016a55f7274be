#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrfsl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFailure = 2,       // parse, validation, estimator, or I/O error
  kCellsFailed = 3,   // sweep finished but some cells failed
};

/// Entry point for `mrfsl generate|learn|sweep`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrfsl::cli
