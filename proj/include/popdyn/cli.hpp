#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace popdyn::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { Success = 0, DomainError = 1, UsageError = 2 };

/// Runs one invocation; argv[0] is the program name. Reports go to `out`
/// unless --output is given, diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace popdyn::cli
