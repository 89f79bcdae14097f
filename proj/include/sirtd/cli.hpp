#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sirtd {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

// Entry point of the `sirtd` command line tool. `args` excludes the program
// name. Returns one of ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sirtd
