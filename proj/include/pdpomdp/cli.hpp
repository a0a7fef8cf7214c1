#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdpomdp {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kSemantic = 3, kBudget = 4 };

/// Runs one invocation; args excludes the program name. JSON goes to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdpomdp
