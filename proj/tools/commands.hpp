#pragma once

namespace sgm::cli {

/// Exit codes of the command-line tool.
enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Parses argv, runs one subcommand and maps errors to exit codes.
int run(int argc, const char* const* argv);

}  // namespace sgm::cli
