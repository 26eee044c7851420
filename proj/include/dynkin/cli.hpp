#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynkin::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // oracle disagreement or violated ε-bounds
  kInvalid = 2,
  kMokobodskiFails = 3,
  kDiverged = 4,
  kTooManyStrategies = 5,
};

// Runs `dynkin <subcommand> ...`; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynkin::cli
