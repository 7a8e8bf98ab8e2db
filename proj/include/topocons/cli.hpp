#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topocons {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

/// Entry point of the `topocons` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topocons
