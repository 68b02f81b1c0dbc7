#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cwsd {

enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitData = 3,
};

// Runs `cwsd <args...>` (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cwsd
