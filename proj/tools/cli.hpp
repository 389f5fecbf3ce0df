#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsr::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kInput = 3,
  kInternal = 4,
};

// Arguments exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsr::cli
