#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vdsr::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // unexpected internal error
  kExitInput = 2,       // bad arguments, invalid or undersized input, malformed files
  kExitDivergence = 3,  // training produced a non-finite loss or parameter
  kExitIo = 4,          // a file could not be read or written
};

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vdsr::cli
