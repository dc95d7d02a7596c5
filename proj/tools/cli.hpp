#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobext::cli {

enum ExitCode : int { kPass = 0, kAuditFailure = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name); all output goes
/// to `out` / `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sobext::cli
