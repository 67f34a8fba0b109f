#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slowmix::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kUnsupported = 2,
};

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`; failures are reported on `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slowmix::cli
