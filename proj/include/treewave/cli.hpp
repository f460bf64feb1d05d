#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treewave::cli {

enum ExitCode : int { ok = 0, usage_error = 1, numerical_failure = 2 };

/// Entry point of the command-line tool; args excludes the program name.
/// Results go to `out` (JSON summaries) and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace treewave::cli
