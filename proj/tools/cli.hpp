#pragma once

#include <string>
#include <vector>

namespace wavesim::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kMissingFile = 3,
  kSimulationAbort = 4,
};

// Parses and runs one command line; returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace wavesim::cli
