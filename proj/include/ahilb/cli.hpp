#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ahilb::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kComputationError = 3, kCheckFailed = 4 };

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `--out` (written atomically) or to `out`; errors are JSON on `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SHA-256 hex digest.
std::string sha256_hex(const std::string& data);

}  // namespace ahilb::cli
