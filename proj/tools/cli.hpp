#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace archmark::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace archmark::cli
